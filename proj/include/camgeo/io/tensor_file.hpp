#pragma once

// Binary tensor file, all fields little-endian:
//
//   offset 0   8 bytes  magic "CGTENSOR"
//   offset 8   u32      version (1)
//   offset 12  u32      dtype tag (1 = f32)
//   offset 16  u32      rank
//   offset 20  u64[rank] dims
//   then       f32[prod(dims)] row-major payload

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace camgeo::io {

inline constexpr char kTensorMagic[8] = {'C', 'G', 'T', 'E', 'N', 'S', 'O', 'R'};
inline constexpr std::uint32_t kTensorVersion = 1;
inline constexpr std::uint32_t kDtypeF32 = 1;

struct TensorData {
  std::vector<std::uint64_t> dims;
  std::vector<float> values;

  bool operator==(const TensorData&) const = default;
};

/// Values are rounded to f32. Throws ValidationError if sizes disagree.
TensorData make_tensor(std::vector<std::uint64_t> dims, std::span<const double> values);

std::string encode_tensor(const TensorData& t);
TensorData decode_tensor(std::string_view bytes);

void write_tensor_file(const std::filesystem::path& path, const TensorData& t);
TensorData read_tensor_file(const std::filesystem::path& path);

} // namespace camgeo::io
