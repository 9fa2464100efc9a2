// Copyright 2026 prackit authors
// Licensed under the Apache License, Version 2.0

#ifndef PRAC_TENSOR_HPP
#define PRAC_TENSOR_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "prac/error.hpp"

namespace prac {

using Index = Eigen::Index;
using Shape = std::vector<Index>;

inline Index shape_size(const Shape& s) {
  Index n = 1;
  for (Index d : s) {
    require(d > 0, "tensor dimensions must be positive");
    n *= d;
  }
  return n;
}

inline std::string shape_str(const Shape& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

template <class Scalar>
using MatrixMap =
    Eigen::Map<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
template <class Scalar>
using ConstMatrixMap =
    Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
template <class Scalar>
using VectorMap = Eigen::Map<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>;
template <class Scalar>
using ConstVectorMap = Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>;

// Dense n-d array: a shape plus flat row-major (C-contiguous) storage.
// Matrix views over the flat buffer feed Eigen's expression machinery.
template <class Scalar>
struct Tensor {
  Shape shape;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values;

  Tensor() = default;
  explicit Tensor(Shape s) : shape(std::move(s)) {
    values.setZero(shape_size(shape));
  }
  Tensor(Shape s, std::initializer_list<Scalar> init) : shape(std::move(s)) {
    require(static_cast<Index>(init.size()) == shape_size(shape),
            "initializer size does not match shape " + shape_str(shape));
    values.resize(static_cast<Index>(init.size()));
    Index i = 0;
    for (Scalar v : init) values[i++] = v;
  }

  static Tensor zeros(Shape s) { return Tensor(std::move(s)); }

  Index size() const { return values.size(); }
  Scalar* data() { return values.data(); }
  const Scalar* data() const { return values.data(); }

  Scalar& operator[](Index i) { return values[i]; }
  Scalar operator[](Index i) const { return values[i]; }

  bool all_finite() const { return values.allFinite(); }

  MatrixMap<Scalar> matrix(Index rows, Index cols) {
    require(rows * cols == values.size(), "matrix view size mismatch");
    return MatrixMap<Scalar>(values.data(), rows, cols);
  }
  ConstMatrixMap<Scalar> matrix(Index rows, Index cols) const {
    require(rows * cols == values.size(), "matrix view size mismatch");
    return ConstMatrixMap<Scalar>(values.data(), rows, cols);
  }

  template <class Other>
  Tensor<Other> cast() const {
    Tensor<Other> out;
    out.shape = shape;
    out.values = values.template cast<Other>();
    return out;
  }
};

template <class Scalar>
void check_finite(const Tensor<Scalar>& t, const std::string& what) {
  if (!t.all_finite()) throw NumericError("non-finite values in " + what);
}

}  // namespace prac

#endif  // PRAC_TENSOR_HPP
