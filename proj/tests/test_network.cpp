#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "rkhs/error.hpp"
#include "rkhs/gram.hpp"
#include "rkhs/kernels.hpp"
#include "rkhs/network.hpp"

using namespace rkhs;
using rkhs::testing::Engine;

namespace {

Network path_oab(double c_oa = 1.0, double c_ab = 1.0) {
  return Network({"o", "a", "b"}, "o", {{"o", "a", c_oa}, {"a", "b", c_ab}});
}

Eigen::VectorXd indicator(const Network& net, const std::string& x) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(net.size()));
  e(static_cast<Eigen::Index>(net.index_of(x))) = 1.0;
  return e;
}

// Resistance from the Laplacian pseudo-inverse: (L + J/n)^{-1} = L^+ + J/n,
// and the J part cancels against e_x - e_y.
double pinv_resistance(const Network& net, std::size_t x, std::size_t y) {
  const Eigen::MatrixXd l = laplacian_matrix(net);
  const auto n = l.rows();
  const Eigen::MatrixXd inv =
      (l + Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n))).inverse();
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
  d(static_cast<Eigen::Index>(x)) += 1.0;
  d(static_cast<Eigen::Index>(y)) -= 1.0;
  return d.dot(inv * d);
}

}  // namespace

TEST_SUITE("network construction") {
  TEST_CASE("validation") {
    CHECK_THROWS_AS(Network({"o"}, "o", {}), InvalidInput);
    CHECK_THROWS_AS(Network({"o", "o"}, "o", {}), InvalidInput);
    CHECK_THROWS_AS(Network({"o", "a"}, "z", {{"o", "a", 1}}), InvalidInput);
    CHECK_THROWS_AS(Network({"o", "a"}, "o", {{"o", "o", 1}}), InvalidInput);
    CHECK_THROWS_AS(Network({"o", "a"}, "o", {{"o", "a", 0}}), InvalidInput);
    CHECK_THROWS_AS(Network({"o", "a"}, "o", {{"o", "a", -1}}), InvalidInput);
    CHECK_THROWS_AS(Network({"o", "a"}, "o", {{"o", "a", 1}, {"a", "o", 2}}), InvalidInput);
    CHECK_THROWS_AS(Network({"o", "a"}, "o", {{"o", "x", 1}}), InvalidInput);
  }

  TEST_CASE("adjacency and conductance totals") {
    const auto net = path_oab(2.0, 3.0);
    CHECK(net.size() == 3);
    CHECK(net.base_id() == "o");
    CHECK(net.total_conductance(net.index_of("a")) == 5.0);
    CHECK(net.neighbors(net.index_of("b")).size() == 1);
    CHECK(net.is_connected());
    CHECK(net.grounded_points().size() == 2);
    CHECK_THROWS_AS(net.index_of("zz"), DomainMismatch);
  }

  TEST_CASE("disconnected networks cannot be grounded") {
    const Network net({"o", "a", "b", "c"}, "o", {{"o", "a", 1}, {"b", "c", 1}});
    CHECK_FALSE(net.is_connected());
    CHECK_THROWS_AS(dipole(net, "a"), Disconnected);
    CHECK_THROWS_AS(resistance(net, "a", "b"), Disconnected);
  }

  TEST_CASE("coordinate path") {
    const std::vector<double> xs{0.5, 1, 2.5};
    const auto net = coordinate_path(xs);
    CHECK(net.vertices() == std::vector<std::string>{"o", "0.5", "1", "2.5"});
    CHECK(net.total_conductance(net.index_of("1")) == doctest::Approx(2.0 + 1.0 / 1.5));
    CHECK(net.is_interior(net.index_of("1")));
    CHECK_FALSE(net.is_interior(net.index_of("2.5")));
    CHECK(coordinate_id(0.1) == "0.1");
    const std::vector<double> bad{1, 1};
    CHECK_THROWS_AS(coordinate_path(bad), InvalidInput);
  }
}

TEST_SUITE("laplacian and energy") {
  TEST_CASE("constant functions are harmonic") {
    const auto net = path_oab();
    CHECK(laplacian_apply(net, Eigen::VectorXd::Constant(3, 4.2)).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("path 0-1-2 with f = (0, 1, 0)") {
    const Network net({"0", "1", "2"}, "0", {{"0", "1", 1}, {"1", "2", 1}});
    Eigen::VectorXd f(3);
    f << 0, 1, 0;
    Eigen::VectorXd want(3);
    want << -1, 2, -1;
    CHECK(laplacian_apply(net, f) == want);
  }

  TEST_CASE("Laplacian sums to zero; matrix form agrees") {
    Engine rng(301);
    for (int t = 0; t < 50; ++t) {
      const auto net = testing::random_connected_network(rng, testing::uniform_size(rng, 2, 12));
      const auto f = testing::random_function(rng, net.size());
      const Eigen::VectorXd lf = laplacian_apply(net, f);
      CHECK(std::abs(lf.sum()) <= 1e-10 * f.norm());
      CHECK((laplacian_matrix(net) * f - lf).cwiseAbs().maxCoeff() <= 1e-12 * (1 + f.norm()));
    }
  }

  TEST_CASE("energy of a single edge") {
    const Network net({"o", "a"}, "o", {{"o", "a", 2.5}});
    const auto e = indicator(net, "a");
    CHECK(energy_inner(net, e, e) == 2.5);
    CHECK(energy(net, Eigen::VectorXd::Constant(2, 3.0)) == 0.0);
  }

  TEST_CASE("energy is a symmetric positive form, zero only on constants") {
    Engine rng(303);
    for (int t = 0; t < 50; ++t) {
      const auto net = testing::random_connected_network(rng, testing::uniform_size(rng, 2, 12));
      const auto f = testing::random_function(rng, net.size());
      const auto g = testing::random_function(rng, net.size());
      CHECK(energy_inner(net, f, g) == doctest::Approx(energy_inner(net, g, f)));
      CHECK(energy(net, f) > 0.0);
      // Green's identity: <f, g> = sum_x f(x) (Delta g)(x).
      CHECK(energy_inner(net, f, g) == doctest::Approx(f.dot(laplacian_apply(net, g))));
    }
  }

  TEST_CASE("normalized energy functions vanish at the base") {
    const auto net = path_oab();
    Eigen::VectorXd raw(3);
    raw << 2, 3, 5;
    const auto f = EnergyFunction::normalized(net, raw);
    CHECK(f.values(0) == 0.0);
    CHECK(f.values(2) == 3.0);
  }
}

TEST_SUITE("dipoles") {
  TEST_CASE("single edge o-a") {
    const Network net({"o", "a"}, "o", {{"o", "a", 4.0}});
    const auto v = dipole(net, "a");
    CHECK(v.function.values(0) == 0.0);
    CHECK(v.function.values(1) == doctest::Approx(0.25));
  }

  TEST_CASE("series path o-a-b") {
    const auto v = dipole(path_oab(), "b");
    CHECK(v.function.values(0) == 0.0);
    CHECK(v.function.values(1) == doctest::Approx(1.0));
    CHECK(v.function.values(2) == doctest::Approx(2.0));
    CHECK_THROWS_AS(dipole(path_oab(), "o"), InvalidInput);
  }

  TEST_CASE("residual, reproducing property and v_x(x) = R(o, x)") {
    Engine rng(305);
    for (int t = 0; t < 50; ++t) {
      const auto net = testing::random_connected_network(rng, testing::uniform_size(rng, 2, 12));
      const auto f = testing::random_function(rng, net.size());
      for (std::size_t x = 0; x < net.size(); ++x) {
        if (x == net.base()) continue;
        const auto& id = net.vertex(x);
        const auto v = dipole(net, id).function.values;
        const Eigen::VectorXd want = indicator(net, id) - indicator(net, net.base_id());
        CHECK((laplacian_apply(net, v) - want).cwiseAbs().maxCoeff() <=
              1e-9 * net.total_conductance(x));
        const double fo = f(static_cast<Eigen::Index>(net.base()));
        CHECK(energy_inner(net, v, f) ==
              doctest::Approx(f(static_cast<Eigen::Index>(x)) - fo).epsilon(1e-9));
        CHECK(v(static_cast<Eigen::Index>(x)) ==
              doctest::Approx(resistance(net, net.base_id(), id)).epsilon(1e-9));
      }
    }
  }
}

TEST_SUITE("green kernel") {
  TEST_CASE("path o-a-b") {
    const auto net = path_oab();
    const auto k = green_kernel(net);
    const Point a{Vertex{"a"}}, b{Vertex{"b"}};
    CHECK(k(a, a) == doctest::Approx(1.0));
    CHECK(k(a, b) == doctest::Approx(1.0));
    CHECK(k(b, b) == doctest::Approx(2.0));
    CHECK(k.accepts(a));
    CHECK_FALSE(k.accepts(Point{Vertex{"o"}}));
    CHECK_FALSE(k.accepts(Point{Vertex{"zz"}}));
  }

  TEST_CASE("coordinate path reproduces min(s, t)") {
    Engine rng(307);
    for (int t = 0; t < 30; ++t) {
      const auto xs = testing::increasing_points(rng, testing::uniform_size(rng, 1, 12));
      const auto net = coordinate_path(xs);
      const auto g = assemble_gram(green_kernel(net), net.grounded_points());
      const auto bm = assemble_gram(brownian_kernel(), PointSet::reals(xs));
      CHECK((g.entries() - bm.entries()).cwiseAbs().maxCoeff() <= 1e-9);
    }
  }

  TEST_CASE("strict positivity, reciprocity, inverse Gram = grounded Laplacian") {
    Engine rng(309);
    for (int t = 0; t < 50; ++t) {
      const bool tree = t % 2 == 0;
      const std::size_t n = testing::uniform_size(rng, 2, 12);
      const auto net = tree ? testing::random_tree_network(rng, n)
                            : testing::random_connected_network(rng, n);
      const auto pts = net.grounded_points();
      const auto g = assemble_gram(green_kernel(net), pts);
      CHECK(check_pd(g).status == PdStatus::StrictlyPD);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = 0; j < pts.size(); ++j) {
          const auto xi = net.index_of(std::get<Vertex>(pts[i]).id);
          const auto xj = net.index_of(std::get<Vertex>(pts[j]).id);
          CHECK(net.dipole_values(xi)(static_cast<Eigen::Index>(xj)) ==
                doctest::Approx(net.dipole_values(xj)(static_cast<Eigen::Index>(xi))).epsilon(1e-9));
        }
      }
      // Every vertex of a finite network has its whole neighborhood in V,
      // so K_F^{-1} is the Laplacian with the base row and column removed.
      const Eigen::MatrixXd inv = g.entries().inverse();
      const Eigen::MatrixXd lap = laplacian_matrix(net);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = 0; j < pts.size(); ++j) {
          const auto xi = net.index_of(std::get<Vertex>(pts[i]).id);
          const auto xj = net.index_of(std::get<Vertex>(pts[j]).id);
          CHECK(inv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) ==
                doctest::Approx(lap(static_cast<Eigen::Index>(xi), static_cast<Eigen::Index>(xj)))
                    .epsilon(1e-8)
                    .scale(1.0));
        }
      }
    }
  }

  TEST_CASE("large networks go through conjugate gradients") {
    std::vector<double> xs;
    for (int i = 1; i <= 2500; ++i) xs.push_back(i);
    const auto net = coordinate_path(xs);
    REQUIRE(net.size() - 1 > kDenseSolveLimit);
    const auto k = green_kernel(net);
    for (int a : {1, 17, 1200, 2500}) {
      for (int b : {3, 999, 2500}) {
        const double got = k(Point{Vertex{coordinate_id(a)}}, Point{Vertex{coordinate_id(b)}});
        CHECK(got == doctest::Approx(std::min(a, b)).epsilon(1e-9));
      }
    }
    CHECK(resistance(net, "17", "1200") == doctest::Approx(1183.0).epsilon(1e-9));
  }
}

TEST_SUITE("point-mass energies") {
  TEST_CASE("delta_norm_sq examples") {
    const auto net = path_oab();
    CHECK(delta_norm_sq(net, "a") == 2.0);
    const Network leaf({"o", "a"}, "o", {{"o", "a", 0.7}});
    CHECK(delta_norm_sq(leaf, "a") == 0.7);
    CHECK(delta_norm_sq(leaf, "o") == 0.7);
    const std::vector<double> xs{1, 2, 3};
    const auto bm = coordinate_path(xs);
    CHECK(delta_norm_sq(bm, "2") == doctest::Approx(2.0));
    CHECK(delta_norm_sq(bm, "2") == doctest::Approx(bm_delta_norm_sq(xs, 1)));
  }

  TEST_CASE("delta_expand on o-a-b") {
    const auto net = path_oab();
    const auto e = delta_expand(net, "a");
    REQUIRE(e.terms.size() == 2);  // the o term is absorbed by v_o = 0
    Eigen::VectorXd want(3);
    want << 0, 1, 0;
    CHECK((e.evaluate(net) - want).cwiseAbs().maxCoeff() <= 1e-9);
    const auto eb = delta_expand(net, "b");
    Eigen::VectorXd want_b(3);
    want_b << 0, 0, 1;
    CHECK((eb.evaluate(net) - want_b).cwiseAbs().maxCoeff() <= 1e-9);
  }

  TEST_CASE("expansions evaluate to indicators with energy c(x)") {
    Engine rng(311);
    for (int t = 0; t < 50; ++t) {
      const auto net = testing::random_connected_network(rng, testing::uniform_size(rng, 2, 12));
      for (std::size_t x = 0; x < net.size(); ++x) {
        if (x == net.base()) continue;
        const auto f = delta_expand(net, net.vertex(x)).evaluate(net);
        CHECK((f - indicator(net, net.vertex(x))).cwiseAbs().maxCoeff() <= 1e-9);
        CHECK(energy(net, f) == doctest::Approx(delta_norm_sq(net, net.vertex(x))).epsilon(1e-9));
      }
    }
  }

  TEST_CASE("delta_o expands to -1 away from the base") {
    const auto net = path_oab();
    const auto f = delta_expand(net, "o").evaluate(net);
    CHECK(f(1) == doctest::Approx(-1.0));
    CHECK(f(2) == doctest::Approx(-1.0));
  }
}

TEST_SUITE("resistance metric") {
  TEST_CASE("coordinate path: R = |x - y|") {
    const std::vector<double> xs{1, 2, 3, 5, 8};
    const auto net = coordinate_path(xs);
    for (double a : xs) {
      for (double b : xs) {
        CHECK(resistance(net, coordinate_id(a), coordinate_id(b)) ==
              doctest::Approx(std::abs(a - b)).epsilon(1e-9));
      }
      CHECK(resistance(net, "o", coordinate_id(a)) == doctest::Approx(a));
    }
  }

  TEST_CASE("R(x, x) = 0 and kernel_from_resistance examples") {
    const auto net = path_oab();
    CHECK(resistance(net, "a", "a") == 0.0);
    CHECK(kernel_from_resistance(net, "a", "b") == doctest::Approx(1.0));
    CHECK(kernel_from_resistance(net, "a", "o") == doctest::Approx(0.0));
    CHECK(kernel_from_resistance(net, "b", "b") == doctest::Approx(2.0));
  }

  TEST_CASE("metric axioms and pseudo-inverse oracle on random graphs") {
    Engine rng(313);
    for (int t = 0; t < 40; ++t) {
      const auto net = testing::random_connected_network(rng, testing::uniform_size(rng, 2, 12));
      const std::size_t n = net.size();
      Eigen::MatrixXd r(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
              resistance(net, net.vertex(i), net.vertex(j));
        }
      }
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
          CHECK(r(a, b) == doctest::Approx(pinv_resistance(net, i, j)).epsilon(1e-9));
          CHECK(r(a, b) == doctest::Approx(r(b, a)).epsilon(1e-12));
          if (i == j) {
            CHECK(r(a, b) == 0.0);
          } else {
            CHECK(r(a, b) > 0.0);
          }
          for (std::size_t k = 0; k < n; ++k) {
            const auto c = static_cast<Eigen::Index>(k);
            CHECK(r(a, b) <= r(a, c) + r(c, b) + 1e-12);
          }
        }
      }
    }
  }

  TEST_CASE("kernel reconstruction from resistances") {
    Engine rng(315);
    for (int t = 0; t < 30; ++t) {
      const auto net = testing::random_connected_network(rng, testing::uniform_size(rng, 2, 12));
      const auto k = green_kernel(net);
      for (std::size_t i = 1; i < net.size(); ++i) {
        for (std::size_t j = 1; j < net.size(); ++j) {
          if (i == net.base() || j == net.base()) continue;
          const double want = k(Point{Vertex{net.vertex(i)}}, Point{Vertex{net.vertex(j)}});
          CHECK(std::abs(kernel_from_resistance(net, net.vertex(i), net.vertex(j)) - want) <= 1e-9);
        }
      }
    }
  }

  TEST_CASE("Lipschitz and pointwise bounds for random energy functions") {
    Engine rng(317);
    for (int t = 0; t < 40; ++t) {
      const auto net = testing::random_connected_network(rng, testing::uniform_size(rng, 2, 12));
      const auto f = testing::random_function(rng, net.size(), 3.0);
      const double e = energy(net, f);
      const double fo = f(static_cast<Eigen::Index>(net.base()));
      for (std::size_t i = 0; i < net.size(); ++i) {
        const double fi = f(static_cast<Eigen::Index>(i));
        for (std::size_t j = 0; j < net.size(); ++j) {
          const double d = fi - f(static_cast<Eigen::Index>(j));
          CHECK(d * d <= e * resistance(net, net.vertex(i), net.vertex(j)) * (1 + 1e-12) + 1e-15);
        }
        CHECK(std::abs(fi) <=
              std::abs(fo) + std::sqrt(e * resistance(net, net.base_id(), net.vertex(i))) + 1e-12);
      }
    }
  }

  TEST_CASE("product-energy bound") {
    Engine rng(319);
    for (int t = 0; t < 40; ++t) {
      const auto net = testing::random_connected_network(rng, testing::uniform_size(rng, 2, 12));
      const auto f1 = testing::random_function(rng, net.size(), 2.0);
      const auto f2 = testing::random_function(rng, net.size(), 2.0);
      const double s1 = f1.cwiseAbs().maxCoeff(), s2 = f2.cwiseAbs().maxCoeff();
      const Eigen::VectorXd prod = f1.cwiseProduct(f2);
      CHECK(energy(net, prod) <= (s1 * s1 + s2 * s2) * (energy(net, f1) + energy(net, f2)));
    }
  }
}
