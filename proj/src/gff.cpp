#include "rkhs/gff.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "parallel.hpp"
#include "rkhs/error.hpp"

namespace rkhs {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z += kGolden;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Uniform on the open interval (0, 1) from 53 random bits.
double to_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

constexpr std::size_t kRowsPerChunk = 4096;

}  // namespace

double standard_normal(std::uint64_t seed, std::uint64_t row, std::uint64_t column) {
  const std::uint64_t key = mix64(mix64(mix64(seed) ^ row) ^ column);
  for (std::uint64_t attempt = 0;; ++attempt) {
    const double u = 2.0 * to_unit(mix64(key ^ (2 * attempt) * kGolden)) - 1.0;
    const double v = 2.0 * to_unit(mix64(key ^ (2 * attempt + 1) * kGolden)) - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

SampleSet sample(const GramMatrix& gram, std::size_t n, std::uint64_t seed, unsigned threads) {
  if (n == 0) throw InvalidInput("sample: need at least one draw");
  const auto& f = gram.factorization();
  if (f.check.status == PdStatus::NotPSD) {
    throw NotPSD("covariance is not positive semidefinite", f.check.witness);
  }
  const Eigen::MatrixXd m = f.factor();
  const Eigen::Index dim = m.rows(), rank = m.cols();
  Eigen::MatrixXd draws(static_cast<Eigen::Index>(n), dim);

  const std::size_t chunks = (n + kRowsPerChunk - 1) / kRowsPerChunk;
  detail::parallel_for(chunks, threads, [&](std::size_t c) {
    Eigen::VectorXd z(rank);
    const std::size_t end = std::min(n, (c + 1) * kRowsPerChunk);
    for (std::size_t i = c * kRowsPerChunk; i < end; ++i) {
      for (Eigen::Index j = 0; j < rank; ++j) {
        z(j) = standard_normal(seed, i, static_cast<std::uint64_t>(j));
      }
      draws.row(static_cast<Eigen::Index>(i)).noalias() = (m * z).transpose();
    }
  });
  return {gram.base(), std::move(draws), seed, gram};
}

Eigen::MatrixXd empirical_covariance(const SampleSet& s) {
  const auto n = static_cast<double>(s.samples.rows());
  return (s.samples.transpose() * s.samples) / n;
}

Eigen::VectorXd empirical_mean(const SampleSet& s) {
  return s.samples.colwise().mean().transpose();
}

Eigen::MatrixXd covariance_standard_error(const GramMatrix& gram, std::size_t n) {
  const auto& k = gram.entries();
  Eigen::MatrixXd se(k.rows(), k.cols());
  for (Eigen::Index i = 0; i < k.rows(); ++i) {
    for (Eigen::Index j = 0; j < k.cols(); ++j) {
      se(i, j) = std::sqrt((k(i, i) * k(j, j) + k(i, j) * k(i, j)) / static_cast<double>(n));
    }
  }
  return se;
}

std::vector<double> delta_realization(const Network& net, const SampleSet& s,
                                      const std::string& x) {
  const std::size_t xi = net.index_of(x);
  // (column in the sample base, coefficient); X_o = 0 contributes nothing.
  std::vector<std::pair<Eigen::Index, double>> terms;
  auto column = [&](std::size_t v) -> std::optional<Eigen::Index> {
    if (v == net.base()) return std::nullopt;
    auto c = s.base.find(Vertex{net.vertex(v)});
    if (!c) {
      throw MissingNeighbor("vertex '" + net.vertex(v) + "' (neighbor of '" + x +
                            "') is not in the sample base");
    }
    return static_cast<Eigen::Index>(*c);
  };
  if (auto c = column(xi)) terms.emplace_back(*c, net.total_conductance(xi));
  for (const auto& nb : net.neighbors(xi)) {
    if (auto c = column(nb.index)) terms.emplace_back(*c, -nb.conductance);
  }
  std::vector<double> out(static_cast<std::size_t>(s.samples.rows()), 0.0);
  for (Eigen::Index i = 0; i < s.samples.rows(); ++i) {
    double v = 0.0;
    for (const auto& [c, coefficient] : terms) v += coefficient * s.samples(i, c);
    out[static_cast<std::size_t>(i)] = v;
  }
  return out;
}

TriangleCheck covariance_triangle_check(const Network& net, const std::string& x,
                                        const std::string& y, const std::string& z) {
  const std::size_t xi = net.index_of(x), yi = net.index_of(y), zi = net.index_of(z);
  if (xi == net.base() || yi == net.base() || zi == net.base()) {
    throw InvalidInput("covariance_triangle_check: vertices must differ from the base");
  }
  auto k = [&](std::size_t a, std::size_t b) {
    return net.dipole_values(a)(static_cast<Eigen::Index>(b));
  };
  const double r_oz = net.dipole_values(zi)(static_cast<Eigen::Index>(zi));
  // Grouped so that the exact-equality cases (x = z or y = z) cancel exactly.
  const double margin = (k(xi, yi) - k(xi, zi)) + (r_oz - k(zi, yi));
  const double scale = std::max({std::abs(k(xi, yi)), std::abs(k(xi, zi)), r_oz, 1.0});
  return {margin >= -1e-9 * scale, margin};
}

}  // namespace rkhs
