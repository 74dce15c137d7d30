#pragma once

namespace s2k {

// Entry point of the command-line tool. Returns the process exit code:
// 0 success, 2 usage error, 3 data/runtime error.
int run_cli(int argc, const char* const* argv);

}  // namespace s2k
