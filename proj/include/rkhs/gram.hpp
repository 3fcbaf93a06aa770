#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "rkhs/kernel.hpp"
#include "rkhs/point.hpp"

namespace rkhs {

/// Relative pivot threshold: a pivot counts as positive when it exceeds
/// kPdThreshold * max|diag K|.
inline constexpr double kPdThreshold = 1e-12;
/// Null-space residual above which delta_x is declared outside ran(K_F).
inline constexpr double kRangeTolerance = 1e-8;

enum class PdStatus { StrictlyPD, SemiDefinite, NotPSD };

struct PdCheck {
  PdStatus status = PdStatus::StrictlyPD;
  double log_det = 0.0;   // meaningful for StrictlyPD
  std::size_t rank = 0;   // numerical rank
  std::size_t witness = 0;  // NotPSD: index of the offending point
};

/// Symmetric pivoted Cholesky factorization P K P^t = L L^t, stopped at the
/// first pivot below the threshold.
struct PivotedCholesky {
  std::vector<std::size_t> perm;  // perm[j]: original index of pivot j
  Eigen::MatrixXd lower;          // n x rank, rows in pivot order
  Eigen::VectorXd pivots;         // the accepted squared pivots d_j
  double threshold = 0.0;
  PdCheck check;

  std::size_t rank() const { return check.rank; }
  /// M with K ~= M M^t, rows in the original point order (n x rank).
  Eigen::MatrixXd factor() const;
};

PivotedCholesky pivoted_cholesky(const Eigen::MatrixXd& k,
                                 double relative_threshold = kPdThreshold);

/// Dense Gram matrix K_F over an ordered point set. Immutable; the
/// factorization is computed at most once, on first use, and shared by
/// copies.
class GramMatrix {
 public:
  GramMatrix(PointSet base, Eigen::MatrixXd entries);

  const PointSet& base() const { return base_; }
  const Eigen::MatrixXd& entries() const { return entries_; }
  std::size_t size() const { return base_.size(); }
  std::size_t index_of(const Point& p) const { return base_.index_of(p); }

  const PivotedCholesky& factorization() const;

 private:
  struct Cache;
  PointSet base_;
  Eigen::MatrixXd entries_;
  std::shared_ptr<Cache> cache_;
};

enum class CoefficientRole { DeltaSolution, DualBasisRow, DipoleRestriction };

struct CoefficientVector {
  PointSet base;
  Eigen::VectorXd values;
  CoefficientRole role = CoefficientRole::DeltaSolution;

  double operator()(const Point& p) const { return values(base.index_of(p)); }
};

struct DualBasis {
  PointSet base;
  Eigen::MatrixXd coefficients;  // row x: coefficients of k_x^* on {k_y}

  CoefficientVector row(const Point& x) const;
};

/// Throws DomainMismatch for labels outside the kernel's domain, and
/// InvalidInput for an empty point set.
GramMatrix assemble_gram(const Kernel& kernel, const PointSet& points);

PdCheck check_pd(const GramMatrix& gram);

/// zeta = K_F^{-1} delta_target. Semidefinite matrices are solved in the
/// least-squares sense on the range of K_F.
CoefficientVector solve_delta(const GramMatrix& gram, const Point& target);

/// (K_F^{-1} delta_x)(x) = ||P_F delta_x||^2.
double projection_norm_sq(const GramMatrix& gram, const Point& target);

DualBasis dual_basis(const GramMatrix& gram);

double log_det(const GramMatrix& gram);

/// Gram matrix with row and column `index` removed.
GramMatrix principal_minor(const GramMatrix& gram, std::size_t index);

}  // namespace rkhs
