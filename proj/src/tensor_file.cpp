#include "s2k/tensor_file.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <memory>

#include "s2k/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "serialization assumes a little-endian host");
static_assert(sizeof(float) == 4);

namespace s2k {

namespace {

constexpr char kMagic[4] = {'S', '2', 'K', '1'};

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

void write_raw(std::FILE* f, const void* p, std::size_t n,
               const std::string& path) {
  if (std::fwrite(p, 1, n, f) != n)
    throw FormatError("short write to " + path);
}

void read_raw(std::FILE* f, void* p, std::size_t n, const std::string& path) {
  if (std::fread(p, 1, n, f) != n)
    throw FormatError("truncated tensor file " + path);
}

}  // namespace

void write_tensor_file(const std::string& path,
                       const std::vector<NamedTensor>& tensors) {
  File f(std::fopen(path.c_str(), "wb"));
  if (!f) throw FormatError("cannot open " + path + " for writing");

  write_raw(f.get(), kMagic, 4, path);
  std::uint32_t count = std::uint32_t(tensors.size());
  write_raw(f.get(), &count, 4, path);

  for (const auto& t : tensors) {
    if (t.name.size() > 0xffff)
      throw FormatError("tensor name too long: " + t.name);
    if (t.dims.size() > 0xff)
      throw FormatError("tensor rank too large: " + t.name);
    if (t.values.size() != t.count())
      throw FormatError("dims/value count mismatch for tensor " + t.name);

    std::uint16_t name_len = std::uint16_t(t.name.size());
    write_raw(f.get(), &name_len, 2, path);
    write_raw(f.get(), t.name.data(), name_len, path);
    std::uint8_t rank = std::uint8_t(t.dims.size());
    write_raw(f.get(), &rank, 1, path);
    for (std::uint32_t d : t.dims) write_raw(f.get(), &d, 4, path);
    write_raw(f.get(), t.values.data(), t.values.size() * 4, path);
  }
  if (std::fflush(f.get()) != 0) throw FormatError("short write to " + path);
}

std::vector<NamedTensor> read_tensor_file(const std::string& path) {
  File f(std::fopen(path.c_str(), "rb"));
  if (!f) throw FormatError("cannot open " + path);

  char magic[4];
  read_raw(f.get(), magic, 4, path);
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw FormatError("bad magic in " + path);

  std::uint32_t count = 0;
  read_raw(f.get(), &count, 4, path);

  std::vector<NamedTensor> out;
  out.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    NamedTensor t;
    std::uint16_t name_len = 0;
    read_raw(f.get(), &name_len, 2, path);
    t.name.resize(name_len);
    read_raw(f.get(), t.name.data(), name_len, path);
    std::uint8_t rank = 0;
    read_raw(f.get(), &rank, 1, path);
    t.dims.resize(rank);
    for (auto& d : t.dims) read_raw(f.get(), &d, 4, path);

    std::size_t n = t.count();
    // 256 MB per tensor is far beyond anything this library writes;
    // treat larger claims as corruption rather than trying to allocate.
    if (n > (256u << 20) / 4) throw FormatError("implausible tensor size in " + path);
    t.values.resize(n);
    read_raw(f.get(), t.values.data(), n * 4, path);
    out.push_back(std::move(t));
  }

  char extra;
  if (std::fread(&extra, 1, 1, f.get()) == 1)
    throw FormatError("trailing bytes in " + path);
  return out;
}

const NamedTensor& find_tensor(const std::vector<NamedTensor>& tensors,
                               const std::string& name) {
  for (const auto& t : tensors)
    if (t.name == name) return t;
  throw FormatError("tensor '" + name + "' not present in container");
}

bool has_tensor(const std::vector<NamedTensor>& tensors,
                const std::string& name) {
  for (const auto& t : tensors)
    if (t.name == name) return true;
  return false;
}

}  // namespace s2k
