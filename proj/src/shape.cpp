// Copyright 2026 The Apex Authors
//
// Licensed under the Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX-License-Identifier: Apache-2.0

#include "apex/shape.h"

#include "apex/error.h"

#include <sstream>

namespace apex {

std::string_view errorKindName(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::UnboundVariable:
    return "UnboundVariable";
  case ErrorKind::DimIndexOutOfRange:
    return "DimIndexOutOfRange";
  case ErrorKind::ShapeMismatch:
    return "ShapeMismatch";
  case ErrorKind::ArityError:
    return "ArityError";
  case ErrorKind::WindowTooLarge:
    return "WindowTooLarge";
  case ErrorKind::InvalidAttribute:
    return "InvalidAttribute";
  case ErrorKind::DivisionByZero:
    return "DivisionByZero";
  case ErrorKind::SyntaxError:
    return "SyntaxError";
  case ErrorKind::UnknownForm:
    return "UnknownForm";
  case ErrorKind::UndeclaredVariable:
    return "UndeclaredVariable";
  case ErrorKind::UnknownGroup:
    return "UnknownGroup";
  case ErrorKind::EmptyClass:
    return "EmptyClass";
  case ErrorKind::NoSatisfyingShapes:
    return "NoSatisfyingShapes";
  case ErrorKind::Internal:
    return "Internal";
  }
  return "Unknown";
}

void fail(ErrorKind kind, const std::string &message) {
  throw Error(kind, message);
}

int64_t product(std::span<const int64_t> dims) {
  int64_t result = 1;
  for (int64_t d : dims)
    result *= d;
  return result;
}

std::string dimsToString(std::span<const int64_t> dims) {
  std::ostringstream os;
  os << '(';
  for (size_t i = 0; i < dims.size(); ++i) {
    if (i)
      os << ", ";
    os << dims[i];
  }
  os << ')';
  return os.str();
}

AccessPatternShape AccessPatternShape::split(std::span<const int64_t> dims,
                                             size_t numAccess) {
  if (numAccess > dims.size())
    fail(ErrorKind::DimIndexOutOfRange,
         "access split " + std::to_string(numAccess) +
             " exceeds rank " + std::to_string(dims.size()));
  return AccessPatternShape(Dims(dims.begin(), dims.begin() + numAccess),
                            Dims(dims.begin() + numAccess, dims.end()));
}

Dims AccessPatternShape::dims() const {
  Dims all = access;
  all.insert(all.end(), compute.begin(), compute.end());
  return all;
}

int64_t AccessPatternShape::dim(size_t index) const {
  if (index < access.size())
    return access[index];
  return compute.at(index - access.size());
}

std::string AccessPatternShape::toString() const {
  return "(" + dimsToString(access) + ", " + dimsToString(compute) + ")";
}

Dims windowsOutputDims(std::span<const int64_t> dims,
                       std::span<const int64_t> window,
                       std::span<const int64_t> strides) {
  if (dims.size() != window.size() || dims.size() != strides.size())
    fail(ErrorKind::ArityError,
         "windows: window " + dimsToString(window) + " and strides " +
             dimsToString(strides) + " must match compute dims " +
             dimsToString(dims));
  Dims out(dims.size());
  for (size_t i = 0; i < dims.size(); ++i) {
    if (window[i] < 1 || strides[i] < 1 || dims[i] < 1)
      fail(ErrorKind::InvalidAttribute,
           "windows: dimensions, window and strides must be positive");
    if (window[i] > dims[i])
      fail(ErrorKind::WindowTooLarge,
           "windows: window " + dimsToString(window) +
               " does not fit in " + dimsToString(dims));
    int64_t span = dims[i] - (window[i] - 1);
    out[i] = (span + strides[i] - 1) / strides[i];
  }
  return out;
}

} // namespace apex
