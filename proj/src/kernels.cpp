#include "rkhs/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rkhs/error.hpp"

namespace rkhs {

namespace {

const double* real_of(const Point& p) { return std::get_if<double>(&p); }

void require_increasing(std::span<const double> xs, double lo, double hi,
                        const char* what) {
  if (xs.empty()) throw InvalidInput(std::string(what) + ": empty point list");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > lo && xs[i] < hi)) {
      throw DomainMismatch(std::string(what) + ": point " + std::to_string(xs[i]) +
                           " is outside the domain");
    }
    if (i > 0 && !(xs[i] > xs[i - 1])) {
      throw InvalidInput(std::string(what) + ": points must be strictly increasing");
    }
  }
}

double neighbor_gap_formula(double left, double mid, double right) {
  return (right - left) / ((mid - left) * (right - mid));
}

}  // namespace

Kernel brownian_kernel() {
  return Kernel(
      "brownian", Domain::PositiveReals,
      [](const Point& p) {
        const double* x = real_of(p);
        return x && *x > 0 && std::isfinite(*x);
      },
      [](const Point& a, const Point& b) {
        return std::min(std::get<double>(a), std::get<double>(b));
      });
}

Kernel bridge_kernel() {
  return Kernel(
      "bridge", Domain::UnitInterval,
      [](const Point& p) {
        const double* x = real_of(p);
        return x && *x > 0 && *x < 1;
      },
      [](const Point& a, const Point& b) {
        const double s = std::get<double>(a), t = std::get<double>(b);
        return std::min(s, t) - s * t;
      });
}

double bm_delta_norm_sq(std::span<const double> points, std::size_t index) {
  require_increasing(points, 0.0, INFINITY, "bm_delta_norm_sq");
  if (index + 1 >= points.size()) {
    throw BoundaryIndex("point " + std::to_string(index) +
                        " has no right neighbor; use the Gram solve instead");
  }
  const double left = index == 0 ? 0.0 : points[index - 1];
  return neighbor_gap_formula(left, points[index], points[index + 1]);
}

double bm_log_det(std::span<const double> points) {
  require_increasing(points, 0.0, INFINITY, "bm_log_det");
  double s = std::log(points[0]);
  for (std::size_t i = 1; i < points.size(); ++i) s += std::log(points[i] - points[i - 1]);
  return s;
}

double bm_det(std::span<const double> points) { return std::exp(bm_log_det(points)); }

double bridge_log_det(std::span<const double> points) {
  require_increasing(points, 0.0, 1.0, "bridge_log_det");
  double s = std::log(points[0]);
  for (std::size_t i = 1; i < points.size(); ++i) s += std::log(points[i] - points[i - 1]);
  return s + std::log1p(-points.back());
}

double bridge_det(std::span<const double> points) { return std::exp(bridge_log_det(points)); }

double bridge_delta_norm_sq(std::span<const double> points, std::size_t index) {
  require_increasing(points, 0.0, 1.0, "bridge_delta_norm_sq");
  if (index >= points.size()) throw InvalidInput("bridge_delta_norm_sq: index out of range");
  const double left = index == 0 ? 0.0 : points[index - 1];
  const double right = index + 1 == points.size() ? 1.0 : points[index + 1];
  return neighbor_gap_formula(left, points[index], right);
}

}  // namespace rkhs
