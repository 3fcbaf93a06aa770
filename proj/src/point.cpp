#include "rkhs/point.hpp"

#include <cmath>

#include <fmt/format.h>

#include "rkhs/error.hpp"

namespace rkhs {

std::string to_string(const Point& p) {
  struct Visitor {
    std::string operator()(double x) const { return fmt::format("{}", x); }
    std::string operator()(std::uint64_t n) const { return fmt::format("{}", n); }
    std::string operator()(const Vertex& v) const { return v.id; }
  };
  return std::visit(Visitor{}, p);
}

PointSet::PointSet(std::vector<Point> points) : points_(std::move(points)) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (const auto* x = std::get_if<double>(&points_[i]); x && std::isnan(*x)) {
      throw InvalidInput("point " + std::to_string(i) + " is NaN");
    }
    if (!index_.emplace(points_[i], i).second) {
      throw InvalidInput("duplicate point label " + to_string(points_[i]));
    }
  }
}

PointSet PointSet::reals(std::span<const double> xs) {
  return PointSet(std::vector<Point>(xs.begin(), xs.end()));
}

PointSet PointSet::integers(std::span<const std::uint64_t> ns) {
  return PointSet(std::vector<Point>(ns.begin(), ns.end()));
}

PointSet PointSet::vertices(std::span<const std::string> ids) {
  std::vector<Point> pts;
  pts.reserve(ids.size());
  for (const auto& id : ids) pts.emplace_back(Vertex{id});
  return PointSet(std::move(pts));
}

std::optional<std::size_t> PointSet::find(const Point& p) const {
  auto it = index_.find(p);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t PointSet::index_of(const Point& p) const {
  if (auto i = find(p)) return *i;
  throw DomainMismatch("point " + to_string(p) + " is not in the point set");
}

PointSet PointSet::prefix(std::size_t n) const {
  return PointSet(std::vector<Point>(points_.begin(),
                                     points_.begin() + std::min(n, points_.size())));
}

PointSet PointSet::without(std::size_t index) const {
  std::vector<Point> pts;
  pts.reserve(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (i != index) pts.push_back(points_[i]);
  }
  return PointSet(std::move(pts));
}

bool PointSet::is_strict_prefix_of(const PointSet& other) const {
  if (size() >= other.size()) return false;
  for (std::size_t i = 0; i < size(); ++i) {
    if (points_[i] != other.points_[i]) return false;
  }
  return true;
}

std::vector<double> PointSet::as_reals() const {
  std::vector<double> xs;
  xs.reserve(points_.size());
  for (const auto& p : points_) {
    const auto* x = std::get_if<double>(&p);
    if (!x) throw DomainMismatch("point " + to_string(p) + " is not a real coordinate");
    xs.push_back(*x);
  }
  return xs;
}

}  // namespace rkhs
