#include "rkhs/binomial.hpp"

#include <string>

#include "rkhs/error.hpp"

namespace rkhs {

BigInt binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  BigInt out;
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return out;
}

BigInt binomial_eval(std::uint64_t x, std::uint64_t y) {
  BigInt sum = 0;
  for (std::uint64_t n = 0; n <= std::min(x, y); ++n) sum += binomial(x, n) * binomial(y, n);
  return sum;
}

BigInt binomial_basis_eval(std::uint64_t n, std::uint64_t x) {
  return n <= x ? binomial(x, n) : BigInt(0);
}

Kernel binomial_kernel() {
  auto exact = [](const Point& a, const Point& b) {
    return binomial_eval(std::get<std::uint64_t>(a), std::get<std::uint64_t>(b));
  };
  return Kernel(
      "binomial", Domain::NonnegativeIntegers,
      [](const Point& p) { return std::holds_alternative<std::uint64_t>(p); },
      [exact](const Point& a, const Point& b) { return exact(a, b).get_d(); }, exact);
}

PascalMatrix::PascalMatrix(std::size_t n) : entries_(n + 1, n + 1) {
  for (std::size_t x = 0; x <= n; ++x) {
    for (std::size_t y = 0; y <= x; ++y) entries_(x, y) = binomial(x, y);
  }
}

IntMatrix PascalMatrix::inverse() const {
  const std::size_t m = size();
  IntMatrix inv(m, m);
  for (std::size_t x = 0; x < m; ++x) {
    for (std::size_t y = 0; y <= x; ++y) {
      const BigInt c = binomial(x, y);
      inv(x, y) = ((x - y) % 2 == 0) ? c : BigInt(-c);
    }
  }
  return inv;
}

PascalFactorization pascal_factorization(std::size_t n) {
  PascalFactorization f{PascalMatrix(n), IntMatrix(n + 1, n + 1)};
  for (std::size_t x = 0; x <= n; ++x) {
    for (std::size_t y = 0; y <= x; ++y) {
      f.gram(x, y) = binomial_eval(x, y);
      f.gram(y, x) = f.gram(x, y);
    }
  }
  return f;
}

BigInt binomial_partial_norm(std::uint64_t x1, std::uint64_t n) {
  if (x1 > n) {
    throw InvalidInput("binomial_partial_norm: x1 = " + std::to_string(x1) +
                       " exceeds n = " + std::to_string(n));
  }
  // K_n z = e_{x1} with K_n = L L^t and unit-diagonal integer L: forward
  // substitution L w = e_{x1}, then back substitution L^t z = w. Both stay
  // in the integers.
  const PascalMatrix pascal(n);
  const IntMatrix& l = pascal.entries();
  const std::size_t m = n + 1;
  std::vector<BigInt> w(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    BigInt s = (i == x1) ? 1 : 0;
    for (std::size_t j = 0; j < i; ++j) s -= l(i, j) * w[j];
    w[i] = s;
  }
  std::vector<BigInt> z(m, 0);
  for (std::size_t i = m; i-- > 0;) {
    BigInt s = w[i];
    for (std::size_t j = i + 1; j < m; ++j) s -= l(j, i) * z[j];
    z[i] = s;
  }
  return z[x1];
}

}  // namespace rkhs
