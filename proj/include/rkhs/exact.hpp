#pragma once

#include <cstddef>
#include <vector>

#include "rkhs/kernel.hpp"
#include "rkhs/point.hpp"

namespace rkhs {

/// Dense matrix of arbitrary-precision integers.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}

  static IntMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  BigInt& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const BigInt& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  IntMatrix transpose() const;
  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
  friend bool operator==(const IntMatrix& a, const IntMatrix& b) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<BigInt> data_;
};

/// Exact Gram matrix of an integer-valued kernel.
IntMatrix assemble_exact_gram(const Kernel& kernel, const PointSet& points);

/// Determinant by fraction-free (Bareiss) elimination.
BigInt exact_det(const IntMatrix& m);

/// True when every leading principal minor is positive.
bool exact_strictly_pd(const IntMatrix& m);

/// (K^{-1} e_target)(target) in exact rational arithmetic. Throws
/// SingularGram when K is singular.
Rational exact_projection_norm(const IntMatrix& k, std::size_t target);

/// Copy of `m` with row and column `index` removed.
IntMatrix exact_minor(const IntMatrix& m, std::size_t index);

}  // namespace rkhs
