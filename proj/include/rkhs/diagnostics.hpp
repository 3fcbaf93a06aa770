#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "rkhs/kernel.hpp"
#include "rkhs/point.hpp"

namespace rkhs {

/// Nested finite sets F_1 c F_2 c ... c F_N, each a strict prefix extension
/// of the previous, together with the point whose mass is being probed.
class Filtration {
 public:
  Filtration(std::vector<PointSet> stages, Point target);

  /// F_n = first n points of `ordered`, n = 1..N.
  static Filtration prefixes(const PointSet& ordered, const Point& target);
  /// Stage sizes 1, 2, 4, ... and finally N; for asymptotic fits.
  static Filtration doubling(const PointSet& ordered, const Point& target);

  const std::vector<PointSet>& stages() const { return stages_; }
  const Point& target() const { return target_; }
  /// 0-based index of the first stage containing the target.
  std::size_t first_stage() const { return first_; }

 private:
  std::vector<PointSet> stages_;
  Point target_;
  std::size_t first_ = 0;
};

enum class Verdict { Stabilized, Converging, Diverging, Inconclusive };

std::string_view to_string(Verdict v);

/// Classification thresholds. These are policy, not mathematics: a finite
/// trace only ever certifies lower bounds on ||delta_x||^2.
struct ClassifyOptions {
  double tau_stab = 1e-10;
  double tau_div = 1e-3;
  std::size_t window = 5;
  double slope_threshold = 0.5;   // log-log growth exponent for Diverging
  double ratio_threshold = 0.9;   // fitted increment ratio for Converging
};

struct Membership {
  Verdict verdict = Verdict::Inconclusive;
  /// Stabilized: the limit. Converging: extrapolated estimate.
  /// Diverging: last value. Inconclusive: last value.
  double value = 0.0;
  /// Stabilized: 1-based filtration stage from which the value is constant.
  std::size_t stage = 0;
  double last_increment = 0.0;
  double growth_exponent = 0.0;  // fitted log-log slope over the window
  double increment_ratio = 0.0;  // fitted geometric ratio of increments
  ClassifyOptions options;
};

struct FiltrationTrace {
  std::vector<std::size_t> stages;  // 1-based filtration stage numbers
  std::vector<std::size_t> sizes;   // #F_n
  std::vector<double> values;       // zeta_n(target)
  std::vector<double> det_ratios;   // D'_F / D_F, empty when not computed
  std::optional<Membership> verdict;
};

struct TraceOptions {
  bool det_ratios = true;
  unsigned threads = 1;
};

/// zeta_n(target) = ||P_{F_n} delta_target||^2 for every stage containing
/// the target. Throws MonotonicityViolation when the sequence decreases
/// beyond 1e-9 + 1e-9 |value|.
FiltrationTrace trace(const Kernel& kernel, const Filtration& filtration,
                      const TraceOptions& options = {});

Membership classify(const FiltrationTrace& trace,
                    const ClassifyOptions& options = {});

/// D'_F / D_F per stage, where D'_F deletes the target row and column.
/// Requires every stage to be strictly positive definite.
std::vector<double> det_ratio_trace(const Kernel& kernel,
                                    const Filtration& filtration);

/// trace + classify.
FiltrationTrace diagnose(const Kernel& kernel, const Filtration& filtration,
                         const ClassifyOptions& classify_options = {},
                         const TraceOptions& trace_options = {});

}  // namespace rkhs
