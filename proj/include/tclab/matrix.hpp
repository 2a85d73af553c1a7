// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <stdexcept>
#include <vector>

namespace tclab {

/// Dense row-major matrix.
template <class T> class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  T &operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T &operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<T> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const T> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  friend bool operator==(const Matrix &, const Matrix &) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

template <class T> Matrix<T> transpose(const Matrix<T> &m) {
  Matrix<T> t(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      t(j, i) = m(i, j);
  return t;
}

template <class To, class From> Matrix<To> matrix_cast(const Matrix<From> &m) {
  Matrix<To> out(m.rows(), m.cols());
  auto src = m.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i)
    dst[i] = static_cast<To>(src[i]);
  return out;
}

/// Rectangular identity: ones on the leading diagonal.
template <class T> Matrix<T> identity(std::size_t rows, std::size_t cols) {
  Matrix<T> m(rows, cols);
  for (std::size_t i = 0; i < rows && i < cols; ++i)
    m(i, i) = T{1};
  return m;
}

inline void require_same_shape(std::size_t r0, std::size_t c0, std::size_t r1, std::size_t c1,
                               const char *what) {
  if (r0 != r1 || c0 != c1)
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

} // namespace tclab
