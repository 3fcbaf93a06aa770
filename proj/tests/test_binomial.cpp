#include <doctest.h>

#include "generators.hpp"
#include "rkhs/binomial.hpp"
#include "rkhs/diagnostics.hpp"
#include "rkhs/error.hpp"
#include "rkhs/exact.hpp"

using namespace rkhs;

namespace {

// Term-by-term oracle, independent of the Pascal factorization.
BigInt direct_partial_norm(std::uint64_t x1, std::uint64_t n) {
  BigInt s = 0;
  for (std::uint64_t k = x1; k <= n; ++k) {
    BigInt c = binomial(k, x1);
    s += c * c;
  }
  return s;
}

IntMatrix from_rows(std::vector<std::vector<long>> rows) {
  IntMatrix m(rows.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

}  // namespace

TEST_SUITE("binomial kernel") {
  TEST_CASE("binomial_eval examples") {
    CHECK(binomial_eval(0, 0) == 1);
    CHECK(binomial_eval(1, 1) == 2);
    CHECK(binomial_eval(2, 3) == 10);
    CHECK(binomial_eval(3, 2) == 10);
  }

  TEST_CASE("binomial_eval equals the Vandermonde closed form C(x+y, x)") {
    for (std::uint64_t x = 0; x <= 40; ++x) {
      for (std::uint64_t y = 0; y <= 40; ++y) CHECK(binomial_eval(x, y) == binomial(x + y, x));
    }
  }

  TEST_CASE("basis functions") {
    for (std::uint64_t x = 0; x <= 10; ++x) CHECK(binomial_basis_eval(0, x) == 1);
    CHECK(binomial_basis_eval(2, 4) == 6);
    CHECK(binomial_basis_eval(5, 3) == 0);
  }

  TEST_CASE("kernel object is exact and integer-valued") {
    const auto k = binomial_kernel();
    CHECK(k.is_exact());
    CHECK(k.domain() == Domain::NonnegativeIntegers);
    CHECK(k.exact(Point{std::uint64_t{2}}, Point{std::uint64_t{3}}) == 10);
    CHECK(k(Point{std::uint64_t{2}}, Point{std::uint64_t{3}}) == 10.0);
    CHECK_FALSE(k.accepts(Point{2.0}));
  }

  TEST_CASE("values exceed 64 bits without loss") {
    const BigInt v = binomial_eval(40, 40);
    CHECK(v == binomial(80, 40));
    CHECK(v > BigInt("18446744073709551615"));
  }
}

TEST_SUITE("Pascal factorization") {
  TEST_CASE("n = 1") {
    const auto f = pascal_factorization(1);
    CHECK(f.lower.entries() == from_rows({{1, 0}, {1, 1}}));
    CHECK(f.gram == from_rows({{1, 1}, {1, 2}}));
  }

  TEST_CASE("n = 2 inverse sign pattern") {
    CHECK(PascalMatrix(2).inverse() == from_rows({{1, 0, 0}, {-1, 1, 0}, {1, -2, 1}}));
  }

  TEST_CASE("K_n = L L^t and L L^-1 = I for n <= 25") {
    for (std::size_t n = 0; n <= 25; ++n) {
      const auto f = pascal_factorization(n);
      const IntMatrix& l = f.lower.entries();
      CHECK(l * l.transpose() == f.gram);
      CHECK(l * f.lower.inverse() == IntMatrix::identity(n + 1));
      CHECK(f.lower.inverse() * l == IntMatrix::identity(n + 1));
      CHECK(f.gram == assemble_exact_gram(binomial_kernel(), testing::integer_labels(n + 1)));
    }
  }

  TEST_CASE("alternating identity for 0 <= m <= n <= 12") {
    for (std::uint64_t n = 0; n <= 12; ++n) {
      for (std::uint64_t m = 0; m <= n; ++m) {
        BigInt s = 0;
        for (std::uint64_t j = 0; j <= n; ++j) {
          const BigInt term = binomial(n, j) * binomial(j, m);
          s += ((m + j) % 2 == 0) ? term : BigInt(-term);
        }
        CHECK(s == (m == n ? 1 : 0));
      }
    }
  }

  TEST_CASE("determinant of K_n is 1") {
    for (std::size_t n = 0; n <= 15; ++n) {
      CHECK(exact_det(pascal_factorization(n).gram) == 1);
      CHECK(exact_strictly_pd(pascal_factorization(n).gram));
    }
  }
}

TEST_SUITE("partial norms") {
  TEST_CASE("examples") {
    CHECK(binomial_partial_norm(0, 4) == 5);
    CHECK(binomial_partial_norm(1, 3) == 14);
    CHECK(binomial_partial_norm(2, 2) == 1);
    CHECK_THROWS_AS(binomial_partial_norm(3, 2), InvalidInput);
  }

  TEST_CASE("match the term-by-term sum and the rational Gram inverse") {
    for (std::uint64_t n = 0; n <= 18; ++n) {
      const IntMatrix g = pascal_factorization(n).gram;
      for (std::uint64_t x1 = 0; x1 <= n; ++x1) {
        const BigInt want = direct_partial_norm(x1, n);
        CHECK(binomial_partial_norm(x1, n) == want);
        CHECK(exact_projection_norm(g, x1) == Rational(want));
      }
    }
  }

  TEST_CASE("beyond 64 bits near x1 = 17, n = 34") {
    const BigInt max64("18446744073709551615");
    // The Gram entries already overflow at n = 34; the partial norm soon after.
    CHECK(binomial_eval(34, 34) > max64);
    CHECK(binomial_partial_norm(17, 34) == direct_partial_norm(17, 34));
    const BigInt v = binomial_partial_norm(17, 36);
    CHECK(v == direct_partial_norm(17, 36));
    CHECK(v > max64);
  }

  TEST_CASE("strictly increasing in n") {
    for (std::uint64_t x1 = 0; x1 <= 5; ++x1) {
      BigInt prev = 0;
      for (std::uint64_t n = x1; n <= 40; ++n) {
        const BigInt v = binomial_partial_norm(x1, n);
        CHECK(v > prev);
        prev = v;
      }
    }
  }

  TEST_CASE("no point mass is in the space: targets 0..3 diverge") {
    const auto pts = testing::integer_labels(31);
    for (std::uint64_t target = 0; target <= 3; ++target) {
      const auto t = diagnose(binomial_kernel(), Filtration::prefixes(pts, target));
      CHECK(t.verdict->verdict == Verdict::Diverging);
      CHECK(t.values.back() == direct_partial_norm(target, 30).get_d());
    }
  }
}

TEST_SUITE("exact linear algebra") {
  TEST_CASE("determinants and minors") {
    const auto m = from_rows({{2, 1, 0}, {1, 2, 1}, {0, 1, 2}});
    CHECK(exact_det(m) == 4);
    CHECK(exact_minor(m, 1) == from_rows({{2, 0}, {0, 2}}));
    CHECK(exact_projection_norm(m, 1) == Rational(1));
    CHECK(exact_projection_norm(m, 0) == Rational(3, 4));
    CHECK(exact_det(from_rows({{0, 1}, {1, 0}})) == -1);
  }

  TEST_CASE("singular matrices") {
    const auto s = from_rows({{1, 1}, {1, 1}});
    CHECK(exact_det(s) == 0);
    CHECK_FALSE(exact_strictly_pd(s));
    CHECK_THROWS_AS(exact_projection_norm(s, 0), SingularGram);
  }
}
