#pragma once

#include <cstddef>
#include <cstdint>

#include "rkhs/exact.hpp"
#include "rkhs/kernel.hpp"

namespace rkhs {

/// C(n, k), zero when k > n.
BigInt binomial(std::uint64_t n, std::uint64_t k);

/// k_b(x, y) = sum_{n=0}^{min(x,y)} C(x, n) C(y, n).
BigInt binomial_eval(std::uint64_t x, std::uint64_t y);

/// e_n(x) = C(x, n) for n <= x, else 0.
BigInt binomial_basis_eval(std::uint64_t n, std::uint64_t x);

/// The binomial kernel on the nonnegative integers. Exact.
Kernel binomial_kernel();

/// Truncated Pascal triangle L[x][y] = C(x, y), 0 <= y <= x <= n.
class PascalMatrix {
 public:
  explicit PascalMatrix(std::size_t n);

  std::size_t size() const { return entries_.rows(); }
  const IntMatrix& entries() const { return entries_; }
  /// (L^{-1})[x][y] = (-1)^{x-y} C(x, y), built from the closed form.
  IntMatrix inverse() const;

 private:
  IntMatrix entries_;
};

struct PascalFactorization {
  PascalMatrix lower;
  IntMatrix gram;  // K_n over F_n = {0, ..., n}
};

/// K_n together with its Pascal factor; K_n = L L^t.
PascalFactorization pascal_factorization(std::size_t n);

/// sum_{k=x1}^{n} C(k, x1)^2, computed as the diagonal entry of
/// K_n^{-1} = L^{-t} L^{-1} from the exact inverse Pascal factor.
BigInt binomial_partial_norm(std::uint64_t x1, std::uint64_t n);

}  // namespace rkhs
