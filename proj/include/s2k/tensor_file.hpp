#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace s2k {

// One named float32 tensor inside a container file.
struct NamedTensor {
  std::string name;
  std::vector<std::uint32_t> dims;  // row-major shape, may be empty (rank 0)
  std::vector<float> values;        // product(dims) entries

  std::size_t count() const {
    std::size_t n = 1;
    for (auto d : dims) n *= d;
    return n;
  }
};

// Binary container: magic "S2K1", then u32 tensor count, then per tensor
//   u16 name length, name bytes (UTF-8),
//   u8 rank, rank * u32 dims,
//   product(dims) * f32 values, row-major.
// All integers and floats little-endian. Throws FormatError on any
// structural problem (bad magic, truncation, trailing bytes).
void write_tensor_file(const std::string& path,
                       const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> read_tensor_file(const std::string& path);

// Convenience: find a tensor by name; throws FormatError when missing.
const NamedTensor& find_tensor(const std::vector<NamedTensor>& tensors,
                               const std::string& name);
bool has_tensor(const std::vector<NamedTensor>& tensors,
                const std::string& name);

}  // namespace s2k
