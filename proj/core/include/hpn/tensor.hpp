#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hpn {

/// Dense row-major array of doubles. Shape is channels-first with the spatial
/// order x-fastest, so a [C, X, Y, Z] tensor stores x contiguously and one
/// whole channel as one contiguous block.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape);

  static Tensor full(std::vector<int> shape, double value);
  static Tensor from(std::vector<int> shape, std::vector<double> values);

  int rank() const { return static_cast<int>(shape_.size()); }
  const std::vector<int>& shape() const { return shape_; }
  int extent(int axis) const { return shape_[static_cast<std::size_t>(axis)]; }
  std::int64_t size() const { return static_cast<std::int64_t>(data_.size()); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  double& operator[](std::int64_t i) { return data_[static_cast<std::size_t>(i)]; }
  double operator[](std::int64_t i) const { return data_[static_cast<std::size_t>(i)]; }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
  bool empty() const { return data_.empty(); }

  void fill(double v);

  std::string shape_str() const;

  static std::int64_t element_count(const std::vector<int>& shape);

 private:
  std::vector<int> shape_;
  std::vector<double> data_;
};

/// Channel concatenation of [C,X,Y,Z] tensors with equal spatial extents.
Tensor concat_channels_values(const std::vector<const Tensor*>& parts);

/// Channel slice [from, from+count) of a [C,X,Y,Z] tensor.
Tensor slice_channels_values(const Tensor& t, int from, int count);

}  // namespace hpn
