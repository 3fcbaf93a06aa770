#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rkhs/network.hpp"

namespace rkhs {

/// Finite binary word; the empty word is the root (base point) of the tree.
class Word {
 public:
  Word() = default;
  /// `bits` must contain only '0' and '1'.
  explicit Word(std::string bits);

  std::size_t length() const { return bits_.size(); }
  const std::string& bits() const { return bits_; }
  Word child(char bit) const;
  Word prefix(std::size_t n) const;
  /// Vertex id in a tree network: "o" for the root, the bits otherwise.
  std::string id() const;

  friend bool operator==(const Word&, const Word&) = default;

 private:
  std::string bits_;
};

/// l(a ^ b): length of the longest common prefix.
std::size_t common_prefix_length(const Word& a, const Word& b);

/// Level resistances r(n), n >= 0. The edge alpha -> alpha t has resistance
/// r(l(alpha)). r(0) is a declared convention (default 1): a zero resistance
/// at the root would mean infinite conductance.
class LevelWeights {
 public:
  /// r(n) = q^n for n >= 1, r(0) = r0.
  static LevelWeights geometric(double q, double r0 = 1.0);
  static LevelWeights constant(double c, double r0 = 1.0);
  /// r(n) = values[n]; levels beyond the list are undefined.
  static LevelWeights table(std::vector<double> values);
  /// One real per line; line n is r(n).
  static LevelWeights from_file(const std::string& path);
  /// "geometric:q", "constant:c" or "file:path".
  static LevelWeights parse(const std::string& spec, std::optional<double> r0 = {});

  /// Throws WeightUndefined when level n has no weight.
  double operator()(std::size_t n) const;
  bool defined(std::size_t n) const;
  /// sum_{n=from}^{to-1} r(n).
  double partial_sum(std::size_t from, std::size_t to) const;
  /// sum_{n >= from} r(n) when a closed form exists.
  std::optional<double> tail(std::size_t from) const;
  bool summable() const;
  /// Human-readable description, including the r(0) convention.
  std::string describe() const;

 private:
  enum class Kind { Geometric, Constant, Table };
  Kind kind_ = Kind::Constant;
  double param_ = 1.0;
  double r0_ = 1.0;
  std::vector<double> values_;
};

/// All words of length <= depth; base = root; edge alpha -> alpha t with
/// conductance 1 / r(l(alpha)). Leaves are marked as boundary.
Network build_tree(std::size_t depth, const LevelWeights& weights);

/// 2 / r(l(alpha)) + 1 / r(l(alpha) - 1) for 1 <= l(alpha) < depth.
/// Throws BoundaryWord otherwise.
double tree_delta_norm_closed(const Word& alpha, const LevelWeights& weights,
                              std::size_t depth);

/// 2 sum_{n=split}^{depth-1} r(n): series resistance between two leaves of
/// the depth-truncated tree that share `split` leading bits.
double series_resistance(std::size_t split, std::size_t depth,
                         const LevelWeights& weights);

struct BoundaryResistance {
  std::size_t split = 0;        // l(a ^ b)
  double network = 0.0;         // resistance solved on the truncated tree
  double series = 0.0;          // path sum on the truncated tree
  std::optional<double> limit;  // 2 sum_{n >= split} r(n), when closed
};

/// Resistance between two distinct words of length `depth`. Throws
/// IdenticalWords when a == b.
BoundaryResistance boundary_resistance(const Word& a, const Word& b,
                                       const LevelWeights& weights,
                                       std::size_t depth);
/// Same, reusing an already built tree network.
BoundaryResistance boundary_resistance(const Network& tree, const Word& a,
                                       const Word& b, const LevelWeights& weights,
                                       std::size_t depth);

struct HistogramRow {
  std::size_t level;
  double energy;               // ||delta_alpha||^2 at this level
  std::size_t multiplicity;    // 2^level
  bool convention_dependent;   // level 1 depends on r(0)
};

/// One row per level 1..depth-1.
std::vector<HistogramRow> energy_histogram(std::size_t depth,
                                           const LevelWeights& weights);

void write_histogram_csv(std::ostream& out, const std::vector<HistogramRow>& rows,
                         const LevelWeights& weights);

/// Level at which the weight tail drops below 1e-8, capped at 16.
std::size_t default_depth(const LevelWeights& weights);

}  // namespace rkhs
