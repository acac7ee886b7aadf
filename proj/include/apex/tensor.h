// Copyright 2026 The Apex Authors
//
// Licensed under the Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX-License-Identifier: Apache-2.0

#ifndef APEX_TENSOR_H
#define APEX_TENSOR_H

#include "apex/error.h"
#include "apex/shape.h"

#include <cstdint>
#include <ostream>
#include <random>
#include <span>
#include <vector>

namespace apex {

/// Dense row-major n-dimensional array. A rank-0 tensor holds one scalar.
template <typename Scalar> class Tensor {
public:
  using value_type = Scalar;

  Tensor() : data_(1) {}
  explicit Tensor(Dims shape, Scalar fill = Scalar{})
      : shape_(std::move(shape)), data_(checkedSize(shape_), fill) {}
  Tensor(Dims shape, std::vector<Scalar> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    if (static_cast<int64_t>(data_.size()) != checkedSize(shape_))
      fail(ErrorKind::ShapeMismatch,
           "tensor data length " + std::to_string(data_.size()) +
               " does not match shape " + dimsToString(shape_));
  }

  const Dims &shape() const { return shape_; }
  size_t rank() const { return shape_.size(); }
  int64_t size() const { return static_cast<int64_t>(data_.size()); }

  std::span<const Scalar> data() const { return data_; }
  std::span<Scalar> data() { return data_; }

  Scalar &operator[](int64_t flat) { return data_[flat]; }
  const Scalar &operator[](int64_t flat) const { return data_[flat]; }

  int64_t offset(std::span<const int64_t> index) const {
    int64_t flat = 0;
    for (size_t i = 0; i < shape_.size(); ++i)
      flat = flat * shape_[i] + index[i];
    return flat;
  }

  Scalar &at(std::span<const int64_t> index) { return data_[offset(index)]; }
  const Scalar &at(std::span<const int64_t> index) const {
    return data_[offset(index)];
  }
  Scalar &at(std::initializer_list<int64_t> index) {
    return at(std::span<const int64_t>(index.begin(), index.size()));
  }
  const Scalar &at(std::initializer_list<int64_t> index) const {
    return at(std::span<const int64_t>(index.begin(), index.size()));
  }

  /// Same data, new shape of equal element count.
  Tensor reshaped(Dims shape) const { return Tensor(std::move(shape), data_); }

  template <typename Other> Tensor<Other> cast() const {
    std::vector<Other> out(data_.begin(), data_.end());
    return Tensor<Other>(shape_, std::move(out));
  }

  friend bool operator==(const Tensor &, const Tensor &) = default;

private:
  static int64_t checkedSize(const Dims &shape) {
    for (int64_t d : shape)
      if (d < 0)
        fail(ErrorKind::InvalidAttribute, "negative tensor dimension");
    return product(shape);
  }

  Dims shape_;
  std::vector<Scalar> data_;
};

using IntTensor = Tensor<int64_t>;
using RealTensor = Tensor<double>;

/// Calls f(index) for every multi-index of `shape` in row-major order.
template <typename F> void forEachIndex(const Dims &shape, F &&f) {
  if (product(shape) == 0)
    return;
  Dims index(shape.size(), 0);
  while (true) {
    f(std::span<const int64_t>(index));
    size_t axis = shape.size();
    while (axis > 0) {
      --axis;
      if (++index[axis] < shape[axis])
        break;
      index[axis] = 0;
      if (axis == 0)
        return;
    }
    if (shape.empty())
      return;
  }
}

template <typename Scalar>
Tensor<Scalar> randomTensor(const Dims &shape, std::mt19937_64 &rng,
                            int64_t lo = -4, int64_t hi = 4) {
  std::uniform_int_distribution<int64_t> dist(lo, hi);
  Tensor<Scalar> t(shape);
  for (Scalar &v : t.data())
    v = static_cast<Scalar>(dist(rng));
  return t;
}

template <typename Scalar>
std::ostream &operator<<(std::ostream &os, const Tensor<Scalar> &t) {
  os << "tensor" << dimsToString(t.shape()) << " [";
  for (int64_t i = 0; i < t.size(); ++i)
    os << (i ? ", " : "") << t[i];
  return os << ']';
}

} // namespace apex

#endif // APEX_TENSOR_H
