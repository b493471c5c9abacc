#include "hpn/tensor.hpp"

#include <algorithm>
#include <cstring>
#include <sstream>

#include "hpn/errors.hpp"

namespace hpn {

std::int64_t Tensor::element_count(const std::vector<int>& shape) {
  std::int64_t n = 1;
  for (int e : shape) {
    if (e <= 0) throw DimensionError("tensor extents must be strictly positive");
    n *= e;
  }
  return n;
}

Tensor::Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
  data_.assign(static_cast<std::size_t>(element_count(shape_)), 0.0);
}

Tensor Tensor::full(std::vector<int> shape, double value) {
  Tensor t(std::move(shape));
  t.fill(value);
  return t;
}

Tensor Tensor::from(std::vector<int> shape, std::vector<double> values) {
  const std::int64_t n = element_count(shape);
  if (n != static_cast<std::int64_t>(values.size()))
    throw DimensionError("tensor value count does not match shape");
  Tensor t;
  t.shape_ = std::move(shape);
  t.data_ = std::move(values);
  return t;
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

std::string Tensor::shape_str() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i) os << "x";
    os << shape_[i];
  }
  os << "]";
  return os.str();
}

namespace {

void require_4d(const Tensor& t, const char* who) {
  if (t.rank() != 4) throw DimensionError(std::string(who) + ": expected a [C,X,Y,Z] tensor, got " + t.shape_str());
}

}  // namespace

Tensor concat_channels_values(const std::vector<const Tensor*>& parts) {
  if (parts.empty()) throw ContractError("concat_channels: no inputs");
  require_4d(*parts[0], "concat_channels");
  const auto& s0 = parts[0]->shape();
  int channels = 0;
  for (const Tensor* p : parts) {
    require_4d(*p, "concat_channels");
    const auto& s = p->shape();
    if (s[1] != s0[1] || s[2] != s0[2] || s[3] != s0[3])
      throw DimensionError("concat_channels: spatial extents differ: " + parts[0]->shape_str() + " vs " + p->shape_str());
    channels += s[0];
  }
  Tensor out({channels, s0[1], s0[2], s0[3]});
  double* dst = out.data();
  for (const Tensor* p : parts) {
    std::memcpy(dst, p->data(), static_cast<std::size_t>(p->size()) * sizeof(double));
    dst += p->size();
  }
  return out;
}

Tensor slice_channels_values(const Tensor& t, int from, int count) {
  require_4d(t, "slice_channels");
  if (from < 0 || count <= 0 || from + count > t.extent(0))
    throw DimensionError("slice_channels: channel range out of bounds");
  const std::int64_t per_channel = t.size() / t.extent(0);
  Tensor out({count, t.extent(1), t.extent(2), t.extent(3)});
  std::memcpy(out.data(), t.data() + from * per_channel,
              static_cast<std::size_t>(count * per_channel) * sizeof(double));
  return out;
}

}  // namespace hpn
