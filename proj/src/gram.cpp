#include "rkhs/gram.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>

#include "rkhs/error.hpp"

namespace rkhs {

Eigen::MatrixXd PivotedCholesky::factor() const {
  Eigen::MatrixXd m(lower.rows(), static_cast<Eigen::Index>(check.rank));
  for (std::size_t j = 0; j < perm.size(); ++j) {
    m.row(static_cast<Eigen::Index>(perm[j])) =
        lower.row(static_cast<Eigen::Index>(j)).head(m.cols());
  }
  return m;
}

PivotedCholesky pivoted_cholesky(const Eigen::MatrixXd& k, double relative_threshold) {
  const Eigen::Index n = k.rows();
  PivotedCholesky out;
  out.perm.resize(static_cast<std::size_t>(n));
  std::iota(out.perm.begin(), out.perm.end(), std::size_t{0});
  out.lower = Eigen::MatrixXd::Zero(n, n);

  Eigen::VectorXd d = k.diagonal();
  const double max_diag = n > 0 ? d.cwiseAbs().maxCoeff() : 0.0;
  out.threshold = relative_threshold * max_diag;
  const double tau = out.threshold;

  Eigen::Index j = 0;
  for (; j < n; ++j) {
    Eigen::Index p = 0;
    d.tail(n - j).maxCoeff(&p);
    p += j;
    if (d(p) <= tau) break;
    if (p != j) {
      std::swap(out.perm[static_cast<std::size_t>(j)], out.perm[static_cast<std::size_t>(p)]);
      std::swap(d(j), d(p));
      out.lower.row(j).head(j).swap(out.lower.row(p).head(j));
    }
    const double ljj = std::sqrt(d(j));
    out.lower(j, j) = ljj;
    const auto pj = static_cast<Eigen::Index>(out.perm[static_cast<std::size_t>(j)]);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const auto pi = static_cast<Eigen::Index>(out.perm[static_cast<std::size_t>(i)]);
      const double s = k(pi, pj) - out.lower.row(i).head(j).dot(out.lower.row(j).head(j));
      out.lower(i, j) = s / ljj;
      d(i) -= out.lower(i, j) * out.lower(i, j);
    }
  }

  const Eigen::Index rank = j;
  out.pivots = Eigen::VectorXd(rank);
  for (Eigen::Index t = 0; t < rank; ++t) out.pivots(t) = out.lower(t, t) * out.lower(t, t);
  out.lower.conservativeResize(n, rank);
  out.check.rank = static_cast<std::size_t>(rank);

  if (rank == n) {
    out.check.status = PdStatus::StrictlyPD;
    out.check.log_det = out.pivots.array().log().sum();
    return out;
  }

  // The remaining Schur complement must be (numerically) zero for K to be
  // positive semidefinite.
  auto orig = [&](Eigen::Index t) { return out.perm[static_cast<std::size_t>(t)]; };
  std::optional<std::size_t> witness;
  for (Eigen::Index t = rank; t < n; ++t) {
    if (d(t) < -tau && (!witness || orig(t) < *witness)) witness = orig(t);
  }
  if (!witness) {
    for (Eigen::Index a = rank; a < n; ++a) {
      for (Eigen::Index b = a + 1; b < n; ++b) {
        const double s = k(static_cast<Eigen::Index>(orig(a)), static_cast<Eigen::Index>(orig(b))) -
                         out.lower.row(a).dot(out.lower.row(b));
        const double bound =
            std::sqrt(std::max(d(a), 0.0) * std::max(d(b), 0.0)) + tau;
        if (std::abs(s) > bound) {
          const std::size_t w = std::max(orig(a), orig(b));
          if (!witness || w < *witness) witness = w;
        }
      }
    }
  }
  if (witness) {
    out.check.status = PdStatus::NotPSD;
    out.check.witness = *witness;
  } else {
    out.check.status = PdStatus::SemiDefinite;
  }
  return out;
}

struct GramMatrix::Cache {
  std::once_flag once;
  PivotedCholesky factorization;
};

GramMatrix::GramMatrix(PointSet base, Eigen::MatrixXd entries)
    : base_(std::move(base)), entries_(std::move(entries)), cache_(std::make_shared<Cache>()) {
  const auto n = static_cast<Eigen::Index>(base_.size());
  if (entries_.rows() != n || entries_.cols() != n) {
    throw InvalidInput("Gram matrix shape does not match its point set");
  }
}

const PivotedCholesky& GramMatrix::factorization() const {
  std::call_once(cache_->once, [this] { cache_->factorization = pivoted_cholesky(entries_); });
  return cache_->factorization;
}

CoefficientVector DualBasis::row(const Point& x) const {
  const auto i = static_cast<Eigen::Index>(base.index_of(x));
  return {base, coefficients.row(i).transpose(), CoefficientRole::DualBasisRow};
}

GramMatrix assemble_gram(const Kernel& kernel, const PointSet& points) {
  if (points.empty()) throw InvalidInput("cannot assemble a Gram matrix over no points");
  for (const auto& p : points.points()) {
    if (!kernel.accepts(p)) {
      throw DomainMismatch("point " + to_string(p) + " is outside the domain of kernel '" +
                           kernel.name() + "' (" + std::string(to_string(kernel.domain())) +
                           ")");
    }
  }
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = kernel(points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)]);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return GramMatrix(points, std::move(k));
}

PdCheck check_pd(const GramMatrix& gram) { return gram.factorization().check; }

namespace {

// x = K^{-1} b for a strictly positive definite factorization.
Eigen::VectorXd full_rank_solve(const PivotedCholesky& f, const Eigen::VectorXd& b) {
  const auto n = b.size();
  Eigen::VectorXd y(n);
  for (Eigen::Index j = 0; j < n; ++j) y(j) = b(static_cast<Eigen::Index>(f.perm[static_cast<std::size_t>(j)]));
  const auto l = f.lower.triangularView<Eigen::Lower>();
  l.solveInPlace(y);
  l.transpose().solveInPlace(y);
  Eigen::VectorXd x(n);
  for (Eigen::Index j = 0; j < n; ++j) x(static_cast<Eigen::Index>(f.perm[static_cast<std::size_t>(j)])) = y(j);
  return x;
}

}  // namespace

CoefficientVector solve_delta(const GramMatrix& gram, const Point& target) {
  const auto idx = static_cast<Eigen::Index>(gram.index_of(target));
  const auto n = static_cast<Eigen::Index>(gram.size());
  const auto& f = gram.factorization();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(idx) = 1.0;

  switch (f.check.status) {
    case PdStatus::NotPSD:
      throw NotPSD("Gram matrix is not positive semidefinite", f.check.witness);
    case PdStatus::StrictlyPD: {
      Eigen::VectorXd x = full_rank_solve(f, b);
      // One step of iterative refinement.
      const Eigen::VectorXd r = b - gram.entries() * x;
      x += full_rank_solve(f, r);
      return {gram.base(), std::move(x), CoefficientRole::DeltaSolution};
    }
    case PdStatus::SemiDefinite: {
      const Eigen::MatrixXd m = f.factor();  // K ~= M M^t, full column rank
      const Eigen::LLT<Eigen::MatrixXd> normal(m.transpose() * m);
      const Eigen::VectorXd y = normal.solve(m.transpose() * b);
      const double null_residual = (b - m * y).norm();
      if (null_residual > kRangeTolerance) {
        throw NotInRange("delta_" + to_string(target) +
                             " is not in the range of the semidefinite Gram matrix",
                         null_residual);
      }
      Eigen::VectorXd x = m * normal.solve(y);
      return {gram.base(), std::move(x), CoefficientRole::DeltaSolution};
    }
  }
  throw Error("unreachable");
}

double projection_norm_sq(const GramMatrix& gram, const Point& target) {
  return solve_delta(gram, target)(target);
}

DualBasis dual_basis(const GramMatrix& gram) {
  const auto& f = gram.factorization();
  if (f.check.status != PdStatus::StrictlyPD) {
    throw SingularGram("dual basis requires a strictly positive definite Gram matrix");
  }
  const auto n = static_cast<Eigen::Index>(gram.size());
  Eigen::MatrixXd inv(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Unit(n, j);
    Eigen::VectorXd x = full_rank_solve(f, e);
    x += full_rank_solve(f, e - gram.entries() * x);
    inv.col(j) = x;
  }
  return {gram.base(), inv.transpose()};
}

double log_det(const GramMatrix& gram) {
  const auto& c = gram.factorization().check;
  if (c.status != PdStatus::StrictlyPD) {
    throw SingularGram("log det requires a strictly positive definite Gram matrix");
  }
  return c.log_det;
}

GramMatrix principal_minor(const GramMatrix& gram, std::size_t index) {
  const auto n = static_cast<Eigen::Index>(gram.size());
  const auto r = static_cast<Eigen::Index>(index);
  Eigen::MatrixXd m(n - 1, n - 1);
  for (Eigen::Index i = 0, a = 0; i < n; ++i) {
    if (i == r) continue;
    for (Eigen::Index j = 0, b = 0; j < n; ++j) {
      if (j == r) continue;
      m(a, b++) = gram.entries()(i, j);
    }
    ++a;
  }
  return GramMatrix(gram.base().without(index), std::move(m));
}

}  // namespace rkhs
