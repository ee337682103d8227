#pragma once

// Binary epipolar mask file, all fields little-endian:
//
//   offset 0   8 bytes  magic "CGEPMASK"
//   offset 8   u32      version (1)
//   offset 12  u32      h
//   offset 16  u32      w
//   offset 20  f64      ratio
//   offset 28  u32      tau mode (0 = per-row, 1 = global)
//   offset 32  h*w rows of ceil(2*h*w / 8) bytes; key k of a row is bit
//              (k % 8) of byte k / 8, least significant bit first; padding
//              bits are zero.
//
// A binary PGM (P5) rendition, one pixel per bit (255 = attend), is
// available for inspection.

#include "camgeo/epipolar.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace camgeo::io {

inline constexpr char kMaskMagic[8] = {'C', 'G', 'E', 'P', 'M', 'A', 'S', 'K'};
inline constexpr std::uint32_t kMaskVersion = 1;

std::string encode_mask(const EpipolarMask& mask);
EpipolarMask decode_mask(std::string_view bytes);

void write_mask_file(const std::filesystem::path& path, const EpipolarMask& mask);
EpipolarMask read_mask_file(const std::filesystem::path& path);

std::string encode_mask_pgm(const EpipolarMask& mask);

} // namespace camgeo::io
