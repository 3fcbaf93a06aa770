#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace rkhs {

/// Opaque vertex identifier of a network.
struct Vertex {
  std::string id;
  friend auto operator<=>(const Vertex&, const Vertex&) = default;
};

/// A point label: a real coordinate, a nonnegative integer, or a vertex.
/// Labels compare exactly as given; there is no fuzzy deduplication.
using Point = std::variant<double, std::uint64_t, Vertex>;

std::string to_string(const Point& p);

/// Ordered list of pairwise distinct point labels.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(std::vector<Point> points);

  static PointSet reals(std::span<const double> xs);
  static PointSet integers(std::span<const std::uint64_t> ns);
  static PointSet vertices(std::span<const std::string> ids);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Point& operator[](std::size_t i) const { return points_[i]; }
  const std::vector<Point>& points() const { return points_; }

  std::optional<std::size_t> find(const Point& p) const;
  bool contains(const Point& p) const { return find(p).has_value(); }
  /// Index of p; throws DomainMismatch if absent.
  std::size_t index_of(const Point& p) const;

  PointSet prefix(std::size_t n) const;
  PointSet without(std::size_t index) const;
  /// True when this set is a strict prefix of `other`.
  bool is_strict_prefix_of(const PointSet& other) const;

  /// Real coordinates of every label; throws DomainMismatch otherwise.
  std::vector<double> as_reals() const;

  friend bool operator==(const PointSet& a, const PointSet& b) {
    return a.points_ == b.points_;
  }

 private:
  std::vector<Point> points_;
  std::map<Point, std::size_t> index_;
};

}  // namespace rkhs
