// Copyright 2026 The Apex Authors
//
// Licensed under the Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX-License-Identifier: Apache-2.0

#ifndef APEX_SHAPE_H
#define APEX_SHAPE_H

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace apex {

using Dims = std::vector<int64_t>;

int64_t product(std::span<const int64_t> dims);
std::string dimsToString(std::span<const int64_t> dims);

/// Shape of an access pattern: the dimensions that are iterated over
/// (access) followed by the dimensions that are computed on (compute).
/// The underlying tensor has shape access ++ compute.
struct AccessPatternShape {
  Dims access;
  Dims compute;

  AccessPatternShape() = default;
  AccessPatternShape(Dims access, Dims compute)
      : access(std::move(access)), compute(std::move(compute)) {}

  /// Splits `dims` so that the first `numAccess` entries are access dims.
  static AccessPatternShape split(std::span<const int64_t> dims,
                                  size_t numAccess);

  Dims dims() const;
  size_t rank() const { return access.size() + compute.size(); }
  int64_t dim(size_t index) const;
  int64_t elementCount() const { return product(access) * product(compute); }

  /// Formats as "((a0, a1), (c0))", with "()" for an empty tuple.
  std::string toString() const;

  friend bool operator==(const AccessPatternShape &,
                         const AccessPatternShape &) = default;
  friend auto operator<=>(const AccessPatternShape &,
                          const AccessPatternShape &) = default;
};

/// Number of window placements per dimension:
/// out[i] = ceil((dims[i] - (window[i] - 1)) / strides[i]).
Dims windowsOutputDims(std::span<const int64_t> dims,
                       std::span<const int64_t> window,
                       std::span<const int64_t> strides);

} // namespace apex

#endif // APEX_SHAPE_H
