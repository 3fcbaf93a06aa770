#include "rkhs/diagnostics.hpp"

#include <cmath>
#include <limits>

#include "parallel.hpp"
#include "rkhs/error.hpp"
#include "rkhs/exact.hpp"
#include "rkhs/gram.hpp"

namespace rkhs {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Stabilized: return "Stabilized";
    case Verdict::Converging: return "Converging";
    case Verdict::Diverging: return "Diverging";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

Filtration::Filtration(std::vector<PointSet> stages, Point target)
    : stages_(std::move(stages)), target_(std::move(target)) {
  if (stages_.empty()) throw InvalidInput("filtration has no stages");
  if (stages_.front().empty()) throw InvalidInput("filtration stage 1 is empty");
  for (std::size_t s = 1; s < stages_.size(); ++s) {
    if (!stages_[s - 1].is_strict_prefix_of(stages_[s])) {
      throw InvalidInput("filtration stage " + std::to_string(s + 1) +
                         " is not a strict prefix extension of stage " + std::to_string(s));
    }
  }
  const auto pos = stages_.back().find(target_);
  if (!pos) throw InvalidInput("target " + to_string(target_) + " is in no stage");
  first_ = 0;
  while (!stages_[first_].contains(target_)) ++first_;
}

Filtration Filtration::prefixes(const PointSet& ordered, const Point& target) {
  std::vector<PointSet> stages;
  stages.reserve(ordered.size());
  for (std::size_t n = 1; n <= ordered.size(); ++n) stages.push_back(ordered.prefix(n));
  return Filtration(std::move(stages), target);
}

Filtration Filtration::doubling(const PointSet& ordered, const Point& target) {
  std::vector<PointSet> stages;
  for (std::size_t n = 1; n < ordered.size(); n *= 2) stages.push_back(ordered.prefix(n));
  if (!ordered.empty()) stages.push_back(ordered);
  return Filtration(std::move(stages), target);
}

namespace {

struct StageResult {
  double value = 0.0;
  double det_ratio = std::numeric_limits<double>::quiet_NaN();
};

StageResult exact_stage(const Kernel& kernel, const PointSet& stage, const Point& target,
                        bool want_ratio) {
  const IntMatrix k = assemble_exact_gram(kernel, stage);
  const std::size_t t = stage.index_of(target);
  StageResult r;
  r.value = exact_projection_norm(k, t).get_d();
  if (want_ratio) {
    Rational ratio(exact_det(exact_minor(k, t)), exact_det(k));
    ratio.canonicalize();
    r.det_ratio = ratio.get_d();
  }
  return r;
}

StageResult float_stage(const Kernel& kernel, const PointSet& stage, const Point& target,
                        bool want_ratio) {
  const GramMatrix gram = assemble_gram(kernel, stage);
  const PdCheck pd = check_pd(gram);
  if (pd.status == PdStatus::NotPSD) {
    throw NotPSD("stage Gram matrix of size " + std::to_string(stage.size()) +
                     " is not positive semidefinite",
                 pd.witness);
  }
  StageResult r;
  r.value = projection_norm_sq(gram, target);
  if (want_ratio && pd.status == PdStatus::StrictlyPD) {
    const GramMatrix minor = principal_minor(gram, gram.index_of(target));
    r.det_ratio = std::exp(log_det(minor) - pd.log_det);
  }
  return r;
}

// Least-squares slope of y against x.
double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

}  // namespace

FiltrationTrace trace(const Kernel& kernel, const Filtration& filtration,
                      const TraceOptions& options) {
  const auto& stages = filtration.stages();
  const std::size_t first = filtration.first_stage();
  const std::size_t count = stages.size() - first;

  std::vector<StageResult> results(count);
  detail::parallel_for(count, options.threads, [&](std::size_t i) {
    const auto& stage = stages[first + i];
    results[i] = kernel.is_exact()
                     ? exact_stage(kernel, stage, filtration.target(), options.det_ratios)
                     : float_stage(kernel, stage, filtration.target(), options.det_ratios);
  });

  FiltrationTrace out;
  for (std::size_t i = 0; i < count; ++i) {
    out.stages.push_back(first + i + 1);
    out.sizes.push_back(stages[first + i].size());
    out.values.push_back(results[i].value);
    if (options.det_ratios) out.det_ratios.push_back(results[i].det_ratio);
  }
  for (std::size_t i = 1; i < count; ++i) {
    const double prev = out.values[i - 1];
    if (out.values[i] < prev - (1e-9 + 1e-9 * std::abs(prev))) {
      throw MonotonicityViolation(
          "projection norm decreased from " + std::to_string(prev) + " to " +
              std::to_string(out.values[i]) + " at stage " + std::to_string(out.stages[i]),
          out.stages[i]);
    }
  }
  return out;
}

Membership classify(const FiltrationTrace& t, const ClassifyOptions& options) {
  const std::size_t k = options.window;
  const auto& v = t.values;
  if (k == 0 || v.size() < k + 1) {
    throw TooFewStages("classification needs at least " + std::to_string(k + 1) +
                       " stages, got " + std::to_string(v.size()));
  }
  const std::size_t n = v.size();
  Membership m;
  m.options = options;
  m.value = v.back();
  m.last_increment = v[n - 1] - v[n - 2];

  auto increment = [&](std::size_t i) { return v[i] - v[i - 1]; };
  auto stable = [&](std::size_t i) {
    return std::abs(increment(i)) < options.tau_stab * (1.0 + std::abs(v[i]));
  };

  // Growth exponent over the last k+1 stages.
  {
    std::vector<double> lx, ly;
    bool positive = true;
    for (std::size_t i = n - k - 1; i < n; ++i) {
      if (v[i] <= 0 || t.sizes[i] == 0) positive = false;
      lx.push_back(std::log(static_cast<double>(t.sizes.at(i))));
      ly.push_back(std::log(std::max(v[i], std::numeric_limits<double>::min())));
    }
    m.growth_exponent = positive ? fitted_slope(lx, ly) : 0.0;
  }
  // Geometric ratio of the last k increments.
  bool increments_positive = true;
  {
    std::vector<double> ix, iy;
    for (std::size_t i = n - k; i < n; ++i) {
      if (increment(i) <= 0) increments_positive = false;
      ix.push_back(static_cast<double>(i));
      iy.push_back(std::log(std::max(increment(i), std::numeric_limits<double>::min())));
    }
    m.increment_ratio = increments_positive ? std::exp(fitted_slope(ix, iy)) : 0.0;
  }

  bool all_stable = true;
  for (std::size_t i = n - k; i < n; ++i) all_stable = all_stable && stable(i);
  if (all_stable) {
    std::size_t first_stable = n - 1;
    while (first_stable >= 1 && stable(first_stable)) --first_stable;
    // v[first_stable] is the first value equal (within tolerance) to the limit.
    m.verdict = Verdict::Stabilized;
    m.stage = t.stages.at(first_stable);
    return m;
  }

  bool all_large = true;
  for (std::size_t i = n - k; i < n; ++i) {
    all_large = all_large && increment(i) >= options.tau_div * (1.0 + std::abs(v[i]));
  }
  if (all_large || m.growth_exponent > options.slope_threshold) {
    m.verdict = Verdict::Diverging;
    return m;
  }

  if (increments_positive && m.increment_ratio < options.ratio_threshold) {
    const double r = m.increment_ratio;
    m.verdict = Verdict::Converging;
    m.value = v.back() + m.last_increment * r / (1.0 - r);
    return m;
  }
  m.verdict = Verdict::Inconclusive;
  return m;
}

std::vector<double> det_ratio_trace(const Kernel& kernel, const Filtration& filtration) {
  std::vector<double> out;
  const auto& stages = filtration.stages();
  for (std::size_t s = filtration.first_stage(); s < stages.size(); ++s) {
    const auto& stage = stages[s];
    const std::size_t t = stage.index_of(filtration.target());
    if (kernel.is_exact()) {
      const IntMatrix k = assemble_exact_gram(kernel, stage);
      const BigInt d = exact_det(k);
      if (d == 0) throw SingularGram("stage " + std::to_string(s + 1) + " is singular");
      Rational ratio(exact_det(exact_minor(k, t)), d);
      ratio.canonicalize();
      out.push_back(ratio.get_d());
    } else {
      const GramMatrix gram = assemble_gram(kernel, stage);
      const double full = log_det(gram);
      out.push_back(std::exp(log_det(principal_minor(gram, t)) - full));
    }
  }
  return out;
}

FiltrationTrace diagnose(const Kernel& kernel, const Filtration& filtration,
                         const ClassifyOptions& classify_options,
                         const TraceOptions& trace_options) {
  FiltrationTrace t = trace(kernel, filtration, trace_options);
  t.verdict = classify(t, classify_options);
  return t;
}

}  // namespace rkhs
