#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rkhs/kernel.hpp"
#include "rkhs/point.hpp"

namespace rkhs {

struct Edge {
  std::string u;
  std::string v;
  double conductance = 1.0;
};

struct Neighbor {
  std::size_t index;
  double conductance;
};

/// Reduced systems up to this many unknowns are solved by dense Cholesky;
/// larger ones by Jacobi-preconditioned conjugate gradients.
inline constexpr std::size_t kDenseSolveLimit = 2000;

/// Finite weighted graph (V, E, c) with base point o.
///
/// Immutable after construction; copies share the lazily built grounded
/// solver and dipole cache. `boundary` lists vertices of a finite truncation
/// whose neighborhood in the infinite graph is incomplete.
class Network {
 public:
  Network(std::vector<std::string> vertices, std::string base,
          std::vector<Edge> edges, std::vector<std::string> boundary = {});

  std::size_t size() const;
  const std::string& vertex(std::size_t i) const;
  std::size_t index_of(const std::string& id) const;
  std::optional<std::size_t> find(const std::string& id) const;
  std::size_t base() const;
  const std::string& base_id() const { return vertex(base()); }
  const std::vector<std::string>& vertices() const;
  const std::vector<Edge>& edges() const;
  const std::vector<std::string>& boundary() const;

  std::span<const Neighbor> neighbors(std::size_t i) const;
  /// c(x) = sum_{y ~ x} c_xy.
  double total_conductance(std::size_t i) const;
  /// False for truncation-boundary vertices.
  bool is_interior(std::size_t i) const;
  bool is_connected() const;

  /// Vertices other than the base, in vertex order.
  PointSet grounded_points() const;

  /// v_x as values on all vertices (v_x(o) = 0). Cached per pole.
  const Eigen::VectorXd& dipole_values(std::size_t pole) const;
  /// Solves the grounded system Delta u = rhs on V \ {o}, u(o) = 0.
  Eigen::VectorXd grounded_solve(const Eigen::VectorXd& rhs) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

/// Vertex values with f(o) = 0.
struct EnergyFunction {
  Eigen::VectorXd values;

  /// Subtracts f(o) from every entry.
  static EnergyFunction normalized(const Network& net, Eigen::VectorXd raw);
};

struct Dipole {
  std::size_t pole;
  EnergyFunction function;
};

/// (Delta f)(x) = sum_{y ~ x} c_xy (f(x) - f(y)).
Eigen::VectorXd laplacian_apply(const Network& net, const Eigen::VectorXd& f);

/// 1/2 sum sum c_xy (f(x) - f(y)) (g(x) - g(y)).
double energy_inner(const Network& net, const Eigen::VectorXd& f,
                    const Eigen::VectorXd& g);
double energy(const Network& net, const Eigen::VectorXd& f);

/// Dense graph Laplacian matrix over all vertices.
Eigen::MatrixXd laplacian_matrix(const Network& net);

/// Solution of Delta v_x = delta_x - delta_o, v_x(o) = 0. Throws
/// InvalidInput for x = o and Disconnected when the grounded system is
/// singular.
Dipole dipole(const Network& net, const std::string& x);

/// k(x, y) = <v_x, v_y> = v_x(y) on V \ {o}, labelled by Vertex ids.
Kernel green_kernel(const Network& net);

/// ||delta_x||^2 = c(x). Defined for every vertex, the base included.
double delta_norm_sq(const Network& net, const std::string& x);

/// delta_x = c(x) v_x - sum_{y ~ x} c_xy v_y. Terms on the base are dropped
/// because v_o = 0.
struct DeltaExpansion {
  std::size_t pole;
  std::vector<std::pair<std::size_t, double>> terms;  // (vertex, coefficient)

  /// Pointwise sum of the dipoles with these coefficients.
  Eigen::VectorXd evaluate(const Network& net) const;
};

DeltaExpansion delta_expand(const Network& net, const std::string& x);

/// R(x, y) = ||v_x - v_y||^2, the voltage drop for a unit current x -> y.
double resistance(const Network& net, const std::string& x, const std::string& y);

/// (R(o,x) + R(o,y) - R(x,y)) / 2.
double kernel_from_resistance(const Network& net, const std::string& x,
                              const std::string& y);

/// Nearest-neighbor path on 0 < x_1 < x_2 < ... with c = 1/gap; the base
/// "o" sits at coordinate 0. Vertex ids are the shortest round-trip decimal
/// form of each coordinate. The last point is marked as boundary.
Network coordinate_path(std::span<const double> points);

std::string coordinate_id(double x);

}  // namespace rkhs
