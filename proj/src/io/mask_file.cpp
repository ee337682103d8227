#include "camgeo/io/mask_file.hpp"

#include "camgeo/error.hpp"
#include "camgeo/io/atomic_write.hpp"
#include "le_bytes.hpp"

namespace camgeo::io {

std::string encode_mask(const EpipolarMask& mask) {
  const Eigen::Index hw = static_cast<Eigen::Index>(mask.h) * mask.w;
  if (mask.bits.rows() != hw || mask.bits.cols() != 2 * hw)
    throw ValidationError("mask: bit matrix is not (h*w) x (2*h*w)");
  ByteWriter w;
  w.raw(std::string_view(kMaskMagic, 8));
  w.u32(kMaskVersion);
  w.u32(static_cast<std::uint32_t>(mask.h));
  w.u32(static_cast<std::uint32_t>(mask.w));
  w.f64(mask.ratio);
  w.u32(mask.mode == TauMode::PerRow ? 0u : 1u);
  const Eigen::Index stride = (2 * hw + 7) / 8;
  for (Eigen::Index q = 0; q < hw; ++q) {
    for (Eigen::Index byte = 0; byte < stride; ++byte) {
      std::uint8_t b = 0;
      for (int bit = 0; bit < 8; ++bit) {
        const Eigen::Index k = byte * 8 + bit;
        if (k < 2 * hw && mask.bits(q, k)) b |= static_cast<std::uint8_t>(1u << bit);
      }
      w.u8(b);
    }
  }
  return w.take();
}

EpipolarMask decode_mask(std::string_view bytes) {
  ByteReader r(bytes, "mask");
  if (r.raw(8) != std::string_view(kMaskMagic, 8)) throw ValidationError("mask: bad magic");
  if (r.u32() != kMaskVersion) throw ValidationError("mask: unsupported version");
  EpipolarMask m;
  m.h = static_cast<int>(r.u32());
  m.w = static_cast<int>(r.u32());
  m.ratio = r.f64();
  const std::uint32_t mode = r.u32();
  if (m.h < 1 || m.w < 1) throw ValidationError("mask: empty grid");
  if (mode > 1) throw ValidationError("mask: unknown tau mode");
  m.mode = mode == 0 ? TauMode::PerRow : TauMode::Global;
  const Eigen::Index hw = static_cast<Eigen::Index>(m.h) * m.w;
  const Eigen::Index stride = (2 * hw + 7) / 8;
  if (r.remaining() != static_cast<std::size_t>(hw * stride))
    throw ValidationError("mask: payload length does not match h and w");
  m.bits = RowMajorMatrixXb::Zero(hw, 2 * hw);
  for (Eigen::Index q = 0; q < hw; ++q) {
    for (Eigen::Index byte = 0; byte < stride; ++byte) {
      const std::uint8_t b = r.u8();
      for (int bit = 0; bit < 8; ++bit) {
        const Eigen::Index k = byte * 8 + bit;
        const bool set = (b >> bit) & 1u;
        if (k < 2 * hw)
          m.bits(q, k) = set;
        else if (set)
          throw ValidationError("mask: non-zero padding bit");
      }
    }
  }
  return m;
}

void write_mask_file(const std::filesystem::path& path, const EpipolarMask& mask) {
  atomic_write(path, encode_mask(mask));
}

EpipolarMask read_mask_file(const std::filesystem::path& path) {
  return decode_mask(read_file(path));
}

std::string encode_mask_pgm(const EpipolarMask& mask) {
  std::string out = "P5\n" + std::to_string(mask.bits.cols()) + " " +
                    std::to_string(mask.bits.rows()) + "\n255\n";
  out.reserve(out.size() + static_cast<std::size_t>(mask.bits.size()));
  for (Eigen::Index q = 0; q < mask.bits.rows(); ++q)
    for (Eigen::Index k = 0; k < mask.bits.cols(); ++k)
      out.push_back(mask.bits(q, k) ? static_cast<char>(255) : '\0');
  return out;
}

} // namespace camgeo::io
