#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rkhs/gram.hpp"
#include "rkhs/network.hpp"

namespace rkhs {

/// Joint Gaussian draws with covariance K_F. Row i is one draw X_F.
struct SampleSet {
  PointSet base;
  Eigen::MatrixXd samples;  // n x #F
  std::uint64_t seed = 0;
  GramMatrix covariance;
};

/// Standard normal deviate for slot (row, column) of stream `seed`, by the
/// Marsaglia polar method on a counter-based uniform generator. Depends only
/// on (seed, row, column).
double standard_normal(std::uint64_t seed, std::uint64_t row, std::uint64_t column);

/// draws = Z M^t with M the rank-truncated pivoted Cholesky factor of K_F.
/// The result does not depend on `threads`. Throws NotPSD.
SampleSet sample(const GramMatrix& gram, std::size_t n, std::uint64_t seed,
                 unsigned threads = 1);

/// (1/n) sum_i X_i X_i^t (the mean is known to be zero).
Eigen::MatrixXd empirical_covariance(const SampleSet& s);
Eigen::VectorXd empirical_mean(const SampleSet& s);
/// Standard error of each entry of empirical_covariance:
/// sqrt((K_xx K_yy + K_xy^2) / n).
Eigen::MatrixXd covariance_standard_error(const GramMatrix& gram, std::size_t n);

/// Per-draw c(x) X_x - sum_{y ~ x} c_xy X_y, with X_o = 0. Throws
/// MissingNeighbor when a non-base neighbor of x is not in the sample base.
std::vector<double> delta_realization(const Network& net, const SampleSet& s,
                                      const std::string& x);

struct TriangleCheck {
  bool holds;
  double margin;  // k(x,y) + R(o,z) - k(x,z) - k(z,y)
};

/// k(x,z) + k(z,y) <= k(x,y) + R(o,z), from exact kernel values.
TriangleCheck covariance_triangle_check(const Network& net, const std::string& x,
                                        const std::string& y, const std::string& z);

}  // namespace rkhs
