#include "camgeo/io/tensor_file.hpp"

#include "camgeo/error.hpp"
#include "camgeo/io/atomic_write.hpp"
#include "le_bytes.hpp"

#include <cstring>

namespace camgeo::io {

TensorData make_tensor(std::vector<std::uint64_t> dims, std::span<const double> values) {
  std::uint64_t n = 1;
  for (auto d : dims) n *= d;
  if (n != values.size()) throw ValidationError("tensor: payload size does not match dims");
  TensorData t{std::move(dims), {}};
  t.values.reserve(values.size());
  for (double v : values) t.values.push_back(static_cast<float>(v));
  return t;
}

std::string encode_tensor(const TensorData& t) {
  std::uint64_t n = 1;
  for (auto d : t.dims) n *= d;
  if (n != t.values.size()) throw ValidationError("tensor: payload size does not match dims");
  ByteWriter w;
  w.raw(std::string_view(kTensorMagic, 8));
  w.u32(kTensorVersion);
  w.u32(kDtypeF32);
  w.u32(static_cast<std::uint32_t>(t.dims.size()));
  for (auto d : t.dims) w.u64(d);
  for (float v : t.values) w.f32(v);
  return w.take();
}

TensorData decode_tensor(std::string_view bytes) {
  ByteReader r(bytes, "tensor");
  if (r.raw(8) != std::string_view(kTensorMagic, 8)) throw ValidationError("tensor: bad magic");
  if (r.u32() != kTensorVersion) throw ValidationError("tensor: unsupported version");
  if (r.u32() != kDtypeF32) throw ValidationError("tensor: unsupported dtype");
  TensorData t;
  const std::uint32_t rank = r.u32();
  std::uint64_t n = 1;
  for (std::uint32_t i = 0; i < rank; ++i) {
    t.dims.push_back(r.u64());
    n *= t.dims.back();
  }
  if (n * 4 != r.remaining()) throw ValidationError("tensor: payload length does not match dims");
  t.values.resize(n);
  for (auto& v : t.values) v = r.f32();
  return t;
}

void write_tensor_file(const std::filesystem::path& path, const TensorData& t) {
  atomic_write(path, encode_tensor(t));
}

TensorData read_tensor_file(const std::filesystem::path& path) {
  return decode_tensor(read_file(path));
}

} // namespace camgeo::io
