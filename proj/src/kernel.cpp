#include "rkhs/kernel.hpp"

#include <cmath>

#include "rkhs/error.hpp"

namespace rkhs {

std::string_view to_string(Domain d) {
  switch (d) {
    case Domain::PositiveReals: return "positive reals";
    case Domain::UnitInterval: return "open unit interval";
    case Domain::NonnegativeIntegers: return "nonnegative integers";
    case Domain::NetworkVertices: return "network vertices";
    case Domain::Table: return "table";
  }
  return "unknown";
}

Kernel::Kernel(std::string name, Domain domain, Acceptor accepts, Evaluator eval,
               ExactEvaluator exact)
    : name_(std::move(name)),
      domain_(domain),
      accepts_(std::move(accepts)),
      eval_(std::move(eval)),
      exact_(std::move(exact)) {}

BigInt Kernel::exact(const Point& x, const Point& y) const {
  if (!exact_) throw Error("kernel '" + name_ + "' has no exact evaluator");
  return exact_(x, y);
}

Kernel Kernel::table(PointSet labels, Eigen::MatrixXd values) {
  const auto n = static_cast<Eigen::Index>(labels.size());
  if (values.rows() != n || values.cols() != n) {
    throw InvalidInput("table kernel: values must be " + std::to_string(n) + " x " +
                       std::to_string(n));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!std::isfinite(values(i, j))) {
        throw InvalidInput("table kernel: non-finite entry");
      }
      if (values(i, j) != values(j, i)) {
        throw InvalidInput("table kernel: values are not symmetric at (" +
                           to_string(labels[i]) + ", " + to_string(labels[j]) + ")");
      }
    }
  }
  auto shared = std::make_shared<const std::pair<PointSet, Eigen::MatrixXd>>(
      std::move(labels), std::move(values));
  return Kernel(
      "table", Domain::Table,
      [shared](const Point& p) { return shared->first.contains(p); },
      [shared](const Point& x, const Point& y) {
        return shared->second(static_cast<Eigen::Index>(shared->first.index_of(x)),
                              static_cast<Eigen::Index>(shared->first.index_of(y)));
      });
}

}  // namespace rkhs
