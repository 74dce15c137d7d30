#include "s2k/commands.hpp"

int main(int argc, char** argv) { return s2k::run_cli(argc, argv); }
