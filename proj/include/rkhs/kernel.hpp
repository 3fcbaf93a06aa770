#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>

#include <Eigen/Dense>
#include <gmpxx.h>

#include "rkhs/point.hpp"

namespace rkhs {

using BigInt = mpz_class;
using Rational = mpq_class;

enum class Domain {
  PositiveReals,        // (0, inf)
  UnitInterval,         // (0, 1)
  NonnegativeIntegers,  // {0, 1, 2, ...}
  NetworkVertices,      // V \ {o}
  Table,                // explicit labels
};

std::string_view to_string(Domain d);

/// A symmetric positive definite function on pairs of points.
///
/// Kernels are cheap to copy and immutable. A kernel with an exact
/// evaluator (integer valued, e.g. the binomial kernel) is routed through
/// rational arithmetic by the diagnostics module.
class Kernel {
 public:
  using Evaluator = std::function<double(const Point&, const Point&)>;
  using ExactEvaluator = std::function<BigInt(const Point&, const Point&)>;
  using Acceptor = std::function<bool(const Point&)>;

  Kernel(std::string name, Domain domain, Acceptor accepts, Evaluator eval,
         ExactEvaluator exact = {});

  /// Explicit symmetric table over `labels`.
  static Kernel table(PointSet labels, Eigen::MatrixXd values);

  const std::string& name() const { return name_; }
  Domain domain() const { return domain_; }
  bool accepts(const Point& p) const { return accepts_(p); }

  /// k(x, y). Does not check the domain; assemble_gram does.
  double operator()(const Point& x, const Point& y) const { return eval_(x, y); }

  bool is_exact() const { return static_cast<bool>(exact_); }
  BigInt exact(const Point& x, const Point& y) const;

 private:
  std::string name_;
  Domain domain_;
  Acceptor accepts_;
  Evaluator eval_;
  ExactEvaluator exact_;
};

}  // namespace rkhs
