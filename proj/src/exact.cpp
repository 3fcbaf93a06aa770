#include "rkhs/exact.hpp"

#include <utility>

#include "rkhs/error.hpp"

namespace rkhs {

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::transpose() const {
  IntMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  }
  return t;
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols() != b.rows()) throw InvalidInput("IntMatrix product: shape mismatch");
  IntMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (a(i, k) == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
    }
  }
  return c;
}

IntMatrix assemble_exact_gram(const Kernel& kernel, const PointSet& points) {
  if (points.empty()) throw InvalidInput("cannot assemble a Gram matrix over no points");
  for (const auto& p : points.points()) {
    if (!kernel.accepts(p)) {
      throw DomainMismatch("point " + to_string(p) + " is outside the domain of kernel '" +
                           kernel.name() + "'");
    }
  }
  const std::size_t n = points.size();
  IntMatrix k(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      k(i, j) = kernel.exact(points[i], points[j]);
      k(j, i) = k(i, j);
    }
  }
  return k;
}

namespace {

// Bareiss elimination in place. Returns the sign of the row permutation,
// or 0 when the matrix is singular. With `pivoting == false` elimination
// stops (returning 0) at the first zero leading minor.
int bareiss(IntMatrix& a, bool pivoting, std::vector<BigInt>* leading_minors = nullptr) {
  const std::size_t n = a.rows();
  int sign = 1;
  BigInt prev = 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (a(k, k) == 0) {
      if (!pivoting) return 0;
      std::size_t p = k + 1;
      while (p < n && a(p, k) == 0) ++p;
      if (p == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
      sign = -sign;
    }
    if (leading_minors) leading_minors->push_back(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
      }
      a(i, k) = 0;
    }
    prev = a(k, k);
  }
  return sign;
}

}  // namespace

BigInt exact_det(const IntMatrix& m) {
  if (m.rows() != m.cols()) throw InvalidInput("determinant of a non-square matrix");
  if (m.rows() == 0) return 1;
  IntMatrix a = m;
  const int sign = bareiss(a, true);
  if (sign == 0) return 0;
  BigInt d = a(m.rows() - 1, m.rows() - 1);
  return sign > 0 ? d : BigInt(-d);
}

bool exact_strictly_pd(const IntMatrix& m) {
  IntMatrix a = m;
  std::vector<BigInt> minors;
  if (bareiss(a, false, &minors) == 0) return false;
  for (const auto& d : minors) {
    if (d <= 0) return false;
  }
  return true;
}

Rational exact_projection_norm(const IntMatrix& k, std::size_t target) {
  const std::size_t n = k.rows();
  if (target >= n) throw InvalidInput("target index out of range");
  // Gauss-Jordan on [K | e_target] over the rationals.
  std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = k(i, j);
    a[i][n] = (i == target) ? 1 : 0;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) throw SingularGram("exact Gram matrix is singular");
    std::swap(a[p], a[c]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || a[i][c] == 0) continue;
      const Rational factor = a[i][c] / a[c][c];
      for (std::size_t j = c; j <= n; ++j) a[i][j] -= factor * a[c][j];
    }
  }
  Rational x = a[target][n] / a[target][target];
  x.canonicalize();
  return x;
}

IntMatrix exact_minor(const IntMatrix& m, std::size_t index) {
  const std::size_t n = m.rows();
  IntMatrix out(n - 1, n - 1);
  for (std::size_t i = 0, a = 0; i < n; ++i) {
    if (i == index) continue;
    for (std::size_t j = 0, b = 0; j < n; ++j) {
      if (j == index) continue;
      out(a, b++) = m(i, j);
    }
    ++a;
  }
  return out;
}

}  // namespace rkhs
