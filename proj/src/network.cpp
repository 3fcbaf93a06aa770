#include "rkhs/network.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <queue>
#include <set>
#include <unordered_map>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <fmt/format.h>

#include "rkhs/error.hpp"

namespace rkhs {

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;
using ConjugateGradient =
    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper,
                             Eigen::DiagonalPreconditioner<double>>;

// Reduced Laplacian with the base row and column deleted.
struct GroundedSystem {
  bool dense = true;
  Eigen::LLT<Eigen::MatrixXd> llt;
  SparseMatrix matrix;
  ConjugateGradient cg;
};

}  // namespace

struct Network::Impl {
  std::vector<std::string> vertices;
  std::size_t base = 0;
  std::vector<Edge> edges;
  std::vector<std::string> boundary;
  std::vector<bool> on_boundary;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::vector<Neighbor>> adjacency;
  std::vector<double> total;
  bool connected = false;

  // vertex -> unknown in the grounded system (-1 for the base)
  std::vector<Eigen::Index> reduced;

  mutable std::once_flag system_once;
  mutable std::unique_ptr<GroundedSystem> system;
  mutable std::mutex dipole_mutex;
  mutable std::unordered_map<std::size_t, std::shared_ptr<const Eigen::VectorXd>> dipoles;

  const GroundedSystem& grounded() const;
};

const GroundedSystem& Network::Impl::grounded() const {
  std::call_once(system_once, [this] {
    if (!connected) throw Disconnected("network is not connected to its base vertex");
    const auto m = static_cast<Eigen::Index>(vertices.size() - 1);
    auto sys = std::make_unique<GroundedSystem>();
    sys->dense = static_cast<std::size_t>(m) <= kDenseSolveLimit;
    if (sys->dense) {
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
      for (std::size_t x = 0; x < vertices.size(); ++x) {
        if (x == base) continue;
        a(reduced[x], reduced[x]) = total[x];
        for (const auto& nb : adjacency[x]) {
          if (nb.index != base) a(reduced[x], reduced[nb.index]) -= nb.conductance;
        }
      }
      sys->llt.compute(a);
      if (sys->llt.info() != Eigen::Success) {
        throw Disconnected("grounded Laplacian is singular");
      }
    } else {
      std::vector<Eigen::Triplet<double>> triplets;
      for (std::size_t x = 0; x < vertices.size(); ++x) {
        if (x == base) continue;
        triplets.emplace_back(reduced[x], reduced[x], total[x]);
        for (const auto& nb : adjacency[x]) {
          if (nb.index != base) triplets.emplace_back(reduced[x], reduced[nb.index], -nb.conductance);
        }
      }
      sys->matrix.resize(m, m);
      sys->matrix.setFromTriplets(triplets.begin(), triplets.end());
      sys->cg.setTolerance(1e-14);
      sys->cg.setMaxIterations(std::max<Eigen::Index>(1000, 20 * m));
      sys->cg.compute(sys->matrix);
    }
    system = std::move(sys);
  });
  return *system;
}

Network::Network(std::vector<std::string> vertices, std::string base,
                 std::vector<Edge> edges, std::vector<std::string> boundary) {
  auto impl = std::make_shared<Impl>();
  impl->vertices = std::move(vertices);
  if (impl->vertices.size() < 2) throw InvalidInput("network needs at least two vertices");
  for (std::size_t i = 0; i < impl->vertices.size(); ++i) {
    if (!impl->index.emplace(impl->vertices[i], i).second) {
      throw InvalidInput("duplicate vertex '" + impl->vertices[i] + "'");
    }
  }
  auto lookup = [&](const std::string& id, const std::string& where) {
    auto it = impl->index.find(id);
    if (it == impl->index.end()) throw InvalidInput(where + ": unknown vertex '" + id + "'");
    return it->second;
  };
  impl->base = lookup(base, "base");

  impl->adjacency.resize(impl->vertices.size());
  impl->total.assign(impl->vertices.size(), 0.0);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto& edge = edges[e];
    const std::string where = "edge " + std::to_string(e);
    const std::size_t u = lookup(edge.u, where), v = lookup(edge.v, where);
    if (u == v) throw InvalidInput(where + ": self-loop at '" + edge.u + "'");
    if (!(edge.conductance > 0) || !std::isfinite(edge.conductance)) {
      throw InvalidInput(where + ": conductance must be positive and finite");
    }
    if (!seen.emplace(std::min(u, v), std::max(u, v)).second) {
      throw InvalidInput(where + ": duplicate edge '" + edge.u + "'-'" + edge.v + "'");
    }
    impl->adjacency[u].push_back({v, edge.conductance});
    impl->adjacency[v].push_back({u, edge.conductance});
    impl->total[u] += edge.conductance;
    impl->total[v] += edge.conductance;
  }
  impl->edges = std::move(edges);

  impl->on_boundary.assign(impl->vertices.size(), false);
  for (const auto& id : boundary) impl->on_boundary[lookup(id, "boundary")] = true;
  impl->boundary = std::move(boundary);

  std::vector<bool> reached(impl->vertices.size(), false);
  std::queue<std::size_t> queue;
  queue.push(impl->base);
  reached[impl->base] = true;
  std::size_t count = 1;
  while (!queue.empty()) {
    const std::size_t x = queue.front();
    queue.pop();
    for (const auto& nb : impl->adjacency[x]) {
      if (!reached[nb.index]) {
        reached[nb.index] = true;
        ++count;
        queue.push(nb.index);
      }
    }
  }
  impl->connected = count == impl->vertices.size();

  impl->reduced.assign(impl->vertices.size(), -1);
  Eigen::Index next = 0;
  for (std::size_t x = 0; x < impl->vertices.size(); ++x) {
    if (x != impl->base) impl->reduced[x] = next++;
  }
  impl_ = std::move(impl);
}

std::size_t Network::size() const { return impl_->vertices.size(); }
const std::string& Network::vertex(std::size_t i) const { return impl_->vertices.at(i); }

std::optional<std::size_t> Network::find(const std::string& id) const {
  auto it = impl_->index.find(id);
  if (it == impl_->index.end()) return std::nullopt;
  return it->second;
}

std::size_t Network::index_of(const std::string& id) const {
  if (auto i = find(id)) return *i;
  throw DomainMismatch("unknown vertex '" + id + "'");
}

std::size_t Network::base() const { return impl_->base; }
const std::vector<std::string>& Network::vertices() const { return impl_->vertices; }
const std::vector<Edge>& Network::edges() const { return impl_->edges; }
const std::vector<std::string>& Network::boundary() const { return impl_->boundary; }

std::span<const Neighbor> Network::neighbors(std::size_t i) const {
  return impl_->adjacency.at(i);
}

double Network::total_conductance(std::size_t i) const { return impl_->total.at(i); }
bool Network::is_interior(std::size_t i) const { return !impl_->on_boundary.at(i); }
bool Network::is_connected() const { return impl_->connected; }

PointSet Network::grounded_points() const {
  std::vector<Point> pts;
  for (std::size_t i = 0; i < size(); ++i) {
    if (i != base()) pts.emplace_back(Vertex{vertex(i)});
  }
  return PointSet(std::move(pts));
}

Eigen::VectorXd Network::grounded_solve(const Eigen::VectorXd& rhs) const {
  const auto& sys = impl_->grounded();
  const auto n = static_cast<Eigen::Index>(size());
  if (rhs.size() != n) throw InvalidInput("grounded_solve: rhs has the wrong length");
  Eigen::VectorXd b(n - 1);
  for (Eigen::Index x = 0; x < n; ++x) {
    if (impl_->reduced[static_cast<std::size_t>(x)] >= 0) b(impl_->reduced[static_cast<std::size_t>(x)]) = rhs(x);
  }
  Eigen::VectorXd u;
  if (sys.dense) {
    u = sys.llt.solve(b);
  } else {
    u = sys.cg.solve(b);
    if (sys.cg.info() != Eigen::Success) {
      throw Error("conjugate gradients did not converge (error " +
                  std::to_string(sys.cg.error()) + ")");
    }
  }
  Eigen::VectorXd full = Eigen::VectorXd::Zero(n);
  for (Eigen::Index x = 0; x < n; ++x) {
    if (impl_->reduced[static_cast<std::size_t>(x)] >= 0) full(x) = u(impl_->reduced[static_cast<std::size_t>(x)]);
  }
  return full;
}

const Eigen::VectorXd& Network::dipole_values(std::size_t pole) const {
  if (pole >= size()) throw InvalidInput("dipole pole out of range");
  if (pole == base()) throw InvalidInput("the base vertex has no dipole");
  {
    std::lock_guard lock(impl_->dipole_mutex);
    if (auto it = impl_->dipoles.find(pole); it != impl_->dipoles.end()) return *it->second;
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size()));
  rhs(static_cast<Eigen::Index>(pole)) = 1.0;
  auto values = std::make_shared<const Eigen::VectorXd>(grounded_solve(rhs));
  std::lock_guard lock(impl_->dipole_mutex);
  auto [it, inserted] = impl_->dipoles.emplace(pole, std::move(values));
  return *it->second;
}

EnergyFunction EnergyFunction::normalized(const Network& net, Eigen::VectorXd raw) {
  const double at_base = raw(static_cast<Eigen::Index>(net.base()));
  raw.array() -= at_base;
  return {std::move(raw)};
}

Eigen::VectorXd laplacian_apply(const Network& net, const Eigen::VectorXd& f) {
  const auto n = static_cast<Eigen::Index>(net.size());
  if (f.size() != n) throw InvalidInput("laplacian_apply: function has the wrong length");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (Eigen::Index x = 0; x < n; ++x) {
    double s = 0.0;
    for (const auto& nb : net.neighbors(static_cast<std::size_t>(x))) {
      s += nb.conductance * (f(x) - f(static_cast<Eigen::Index>(nb.index)));
    }
    out(x) = s;
  }
  return out;
}

double energy_inner(const Network& net, const Eigen::VectorXd& f, const Eigen::VectorXd& g) {
  const auto n = static_cast<Eigen::Index>(net.size());
  if (f.size() != n || g.size() != n) {
    throw InvalidInput("energy_inner: function has the wrong length");
  }
  // Each undirected edge once; equals the symmetric half double sum.
  double s = 0.0;
  for (const auto& e : net.edges()) {
    const auto u = static_cast<Eigen::Index>(net.index_of(e.u));
    const auto v = static_cast<Eigen::Index>(net.index_of(e.v));
    s += e.conductance * (f(u) - f(v)) * (g(u) - g(v));
  }
  return s;
}

double energy(const Network& net, const Eigen::VectorXd& f) { return energy_inner(net, f, f); }

Eigen::MatrixXd laplacian_matrix(const Network& net) {
  const auto n = static_cast<Eigen::Index>(net.size());
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index x = 0; x < n; ++x) {
    l(x, x) = net.total_conductance(static_cast<std::size_t>(x));
    for (const auto& nb : net.neighbors(static_cast<std::size_t>(x))) {
      l(x, static_cast<Eigen::Index>(nb.index)) = -nb.conductance;
    }
  }
  return l;
}

Dipole dipole(const Network& net, const std::string& x) {
  const std::size_t i = net.index_of(x);
  return {i, {net.dipole_values(i)}};
}

Kernel green_kernel(const Network& net) {
  auto vertex_index = [net](const Point& p) -> std::optional<std::size_t> {
    const auto* v = std::get_if<Vertex>(&p);
    if (!v) return std::nullopt;
    auto i = net.find(v->id);
    if (!i || *i == net.base()) return std::nullopt;
    return i;
  };
  return Kernel(
      "network", Domain::NetworkVertices,
      [vertex_index](const Point& p) { return vertex_index(p).has_value(); },
      [net, vertex_index](const Point& x, const Point& y) {
        const std::size_t i = vertex_index(x).value();
        const std::size_t j = vertex_index(y).value();
        return net.dipole_values(i)(static_cast<Eigen::Index>(j));
      });
}

double delta_norm_sq(const Network& net, const std::string& x) {
  return net.total_conductance(net.index_of(x));
}

DeltaExpansion delta_expand(const Network& net, const std::string& x) {
  const std::size_t i = net.index_of(x);
  DeltaExpansion out{i, {}};
  if (i != net.base()) out.terms.emplace_back(i, net.total_conductance(i));
  for (const auto& nb : net.neighbors(i)) {
    if (nb.index != net.base()) out.terms.emplace_back(nb.index, -nb.conductance);
  }
  return out;
}

Eigen::VectorXd DeltaExpansion::evaluate(const Network& net) const {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(net.size()));
  for (const auto& [v, coefficient] : terms) f += coefficient * net.dipole_values(v);
  return f;
}

double resistance(const Network& net, const std::string& x, const std::string& y) {
  const std::size_t i = net.index_of(x), j = net.index_of(y);
  if (i == j) return 0.0;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(net.size()));
  rhs(static_cast<Eigen::Index>(i)) += 1.0;
  rhs(static_cast<Eigen::Index>(j)) -= 1.0;
  // u = v_x - v_y; R = <u, u> = u(x) - u(y).
  const Eigen::VectorXd u = net.grounded_solve(rhs);
  return u(static_cast<Eigen::Index>(i)) - u(static_cast<Eigen::Index>(j));
}

double kernel_from_resistance(const Network& net, const std::string& x, const std::string& y) {
  const std::string& o = net.base_id();
  return 0.5 * (resistance(net, o, x) + resistance(net, o, y) - resistance(net, x, y));
}

std::string coordinate_id(double x) { return fmt::format("{}", x); }

Network coordinate_path(std::span<const double> points) {
  if (points.empty()) throw InvalidInput("coordinate_path: no points");
  std::vector<std::string> vertices{"o"};
  std::vector<Edge> edges;
  double prev = 0.0;
  std::string prev_id = "o";
  for (double x : points) {
    if (!(x > prev)) throw InvalidInput("coordinate_path: points must be positive and increasing");
    std::string id = coordinate_id(x);
    vertices.push_back(id);
    edges.push_back({prev_id, id, 1.0 / (x - prev)});
    prev = x;
    prev_id = std::move(id);
  }
  return Network(std::move(vertices), "o", std::move(edges), {prev_id});
}

}  // namespace rkhs
