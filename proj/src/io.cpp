#include "rkhs/io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "rkhs/binomial.hpp"
#include "rkhs/error.hpp"
#include "rkhs/kernels.hpp"

namespace rkhs::io {

std::string format_double(double x) {
  return fmt::format("{:.17g}", x);
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

namespace {

const json& member(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object()) throw InvalidInput(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw InvalidInput(where + ": missing field '" + key + "'");
  return *it;
}

std::string id_from_json(const json& j, const std::string& field) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return j.dump();
  if (j.is_number_float()) return coordinate_id(j.get<double>());
  throw InvalidInput(field + ": vertex id must be a string or a number");
}

bool is_nonnegative_integer(const json& j) {
  return j.is_number_unsigned() || (j.is_number_integer() && j.get<std::int64_t>() >= 0);
}

double number_from_json(const json& j, const std::string& field) {
  if (!j.is_number()) throw InvalidInput(field + ": expected a number");
  return j.get<double>();
}

}  // namespace

Point point_from_json(const json& label, Domain domain, const std::string& field) {
  switch (domain) {
    case Domain::PositiveReals:
    case Domain::UnitInterval:
      return number_from_json(label, field);
    case Domain::NonnegativeIntegers:
      if (!is_nonnegative_integer(label)) {
        throw InvalidInput(field + ": expected a nonnegative integer");
      }
      return label.get<std::uint64_t>();
    case Domain::NetworkVertices:
      return Vertex{id_from_json(label, field)};
    case Domain::Table:
      if (label.is_string()) return Vertex{label.get<std::string>()};
      if (is_nonnegative_integer(label)) return label.get<std::uint64_t>();
      if (label.is_number()) return label.get<double>();
      throw InvalidInput(field + ": label must be a string or a number");
  }
  throw InvalidInput(field + ": unsupported domain");
}

json point_to_json(const Point& p) {
  return std::visit(
      [](const auto& v) -> json {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, Vertex>) {
          return v.id;
        } else {
          return v;
        }
      },
      p);
}

Network network_from_json(const json& doc) {
  const std::string where = "network";
  const json& vs = member(doc, "vertices", where);
  if (!vs.is_array()) throw InvalidInput("network.vertices: expected an array");
  std::vector<std::string> vertices;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    vertices.push_back(id_from_json(vs[i], fmt::format("network.vertices[{}]", i)));
  }
  std::string base = id_from_json(member(doc, "base", where), "network.base");
  const json& es = member(doc, "edges", where);
  if (!es.is_array()) throw InvalidInput("network.edges: expected an array");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < es.size(); ++i) {
    const std::string field = fmt::format("network.edges[{}]", i);
    const json& e = es[i];
    if (!e.is_array() || (e.size() != 2 && e.size() != 3)) {
      throw InvalidInput(field + ": expected [u, v] or [u, v, conductance]");
    }
    edges.push_back({id_from_json(e[0], field), id_from_json(e[1], field),
                     e.size() == 3 ? number_from_json(e[2], field) : 1.0});
  }
  std::vector<std::string> boundary;
  if (auto it = doc.find("boundary"); it != doc.end()) {
    if (!it->is_array()) throw InvalidInput("network.boundary: expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      boundary.push_back(id_from_json((*it)[i], fmt::format("network.boundary[{}]", i)));
    }
  }
  return Network(std::move(vertices), std::move(base), std::move(edges), std::move(boundary));
}

json network_to_json(const Network& net) {
  json edges = json::array();
  for (const auto& e : net.edges()) edges.push_back(json::array({e.u, e.v, e.conductance}));
  json doc = {{"vertices", net.vertices()}, {"base", net.base_id()}, {"edges", edges}};
  if (!net.boundary().empty()) doc["boundary"] = net.boundary();
  return doc;
}

Network load_network(const std::string& path) {
  return network_from_json(read_json_file(path));
}

Kernel builtin_kernel(const std::string& type) {
  if (type == "brownian") return brownian_kernel();
  if (type == "bridge") return bridge_kernel();
  if (type == "binomial") return binomial_kernel();
  throw InvalidInput("unknown kernel type '" + type +
                     "' (expected brownian, bridge or binomial)");
}

namespace {

PointSet points_from_json(const json& arr, Domain domain) {
  if (!arr.is_array()) throw InvalidInput("points: expected an array");
  std::vector<Point> pts;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    pts.push_back(point_from_json(arr[i], domain, fmt::format("points[{}]", i)));
  }
  return PointSet(std::move(pts));
}

}  // namespace

KernelConfig kernel_config_from_json(const json& doc) {
  const json& spec = member(doc, "kernel", "config");
  const std::string type = [&] {
    const json& t = member(spec, "type", "kernel");
    if (!t.is_string()) throw InvalidInput("kernel.type: expected a string");
    return t.get<std::string>();
  }();
  const auto points_field = doc.find("points");
  const bool has_points = points_field != doc.end();

  if (type == "table") {
    const json& labels = member(spec, "labels", "kernel");
    PointSet label_set = points_from_json(labels, Domain::Table);
    const json& rows = member(spec, "values", "kernel");
    const auto n = static_cast<Eigen::Index>(label_set.size());
    if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != n) {
      throw InvalidInput(fmt::format("kernel.values: expected {} rows", n));
    }
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const json& row = rows[static_cast<std::size_t>(i)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
        throw InvalidInput(fmt::format("kernel.values[{}]: expected {} entries", i, n));
      }
      for (Eigen::Index j = 0; j < n; ++j) {
        m(i, j) = number_from_json(row[static_cast<std::size_t>(j)],
                                   fmt::format("kernel.values[{}][{}]", i, j));
      }
    }
    Kernel k = Kernel::table(label_set, std::move(m));
    PointSet pts = has_points ? points_from_json(*points_field, Domain::Table) : label_set;
    return {std::move(k), std::move(pts), std::nullopt};
  }
  if (type == "network") {
    Network net = network_from_json(member(spec, "network", "kernel"));
    Kernel k = green_kernel(net);
    PointSet pts = has_points ? points_from_json(*points_field, Domain::NetworkVertices)
                              : net.grounded_points();
    return {std::move(k), std::move(pts), std::move(net)};
  }
  Kernel k = builtin_kernel(type);
  if (!has_points) throw InvalidInput("config: missing field 'points'");
  PointSet pts = points_from_json(*points_field, k.domain());
  return {std::move(k), std::move(pts), std::nullopt};
}

KernelConfig load_kernel_config(const std::string& path) {
  return kernel_config_from_json(read_json_file(path));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

void write_matrix_csv(std::ostream& out, const std::vector<std::string>& labels,
                      const Eigen::MatrixXd& m) {
  for (const auto& l : labels) out << ',' << l;
  out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << labels[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << ',' << format_double(m(i, j));
    out << '\n';
  }
}

void write_matrix_csv(std::ostream& out, const PointSet& labels, const Eigen::MatrixXd& m) {
  std::vector<std::string> names;
  for (const auto& p : labels.points()) names.push_back(to_string(p));
  write_matrix_csv(out, names, m);
}

namespace {

double parse_double(const std::string& s, const std::string& where) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  try {
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw InvalidInput(where + ": '" + s + "' is not a number");
}

std::size_t parse_size(const std::string& s, const std::string& where) {
  std::size_t used = 0;
  try {
    const unsigned long long v = std::stoull(s, &used);
    if (used == s.size()) return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
  }
  throw InvalidInput(where + ": '" + s + "' is not a nonnegative integer");
}

}  // namespace

LabeledMatrix read_matrix_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("matrix csv: empty input");
  auto header = split_csv_line(line);
  LabeledMatrix out;
  out.labels.assign(header.begin() + 1, header.end());
  const auto n = static_cast<Eigen::Index>(out.labels.size());
  out.values.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw InvalidInput(fmt::format("matrix csv: missing row {}", i + 1));
    auto fields = split_csv_line(line);
    const std::string where = fmt::format("matrix csv line {}", i + 2);
    if (static_cast<Eigen::Index>(fields.size()) != n + 1) {
      throw InvalidInput(where + ": wrong number of fields");
    }
    if (fields[0] != out.labels[static_cast<std::size_t>(i)]) {
      throw InvalidInput(where + ": row label does not match the header");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      out.values(i, j) = parse_double(fields[static_cast<std::size_t>(j + 1)], where);
    }
  }
  return out;
}

namespace {

json finite_or_null(double x) {
  return std::isfinite(x) ? json(x) : json(nullptr);
}

double number_or_nan(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

Verdict verdict_from_string(const std::string& s) {
  for (Verdict v : {Verdict::Stabilized, Verdict::Converging, Verdict::Diverging,
                    Verdict::Inconclusive}) {
    if (to_string(v) == s) return v;
  }
  throw InvalidInput("unknown verdict '" + s + "'");
}

}  // namespace

json membership_to_json(const Membership& m) {
  return {{"verdict", std::string(to_string(m.verdict))},
          {"value", finite_or_null(m.value)},
          {"stage", m.stage},
          {"last_increment", finite_or_null(m.last_increment)},
          {"growth_exponent", finite_or_null(m.growth_exponent)},
          {"increment_ratio", finite_or_null(m.increment_ratio)},
          {"options",
           {{"tau_stab", m.options.tau_stab},
            {"tau_div", m.options.tau_div},
            {"window", m.options.window},
            {"slope_threshold", m.options.slope_threshold},
            {"ratio_threshold", m.options.ratio_threshold}}}};
}

Membership membership_from_json(const json& j) {
  try {
    Membership m;
    m.verdict = verdict_from_string(j.at("verdict").get<std::string>());
    m.value = number_or_nan(j.at("value"));
    m.stage = j.at("stage").get<std::size_t>();
    m.last_increment = number_or_nan(j.at("last_increment"));
    m.growth_exponent = number_or_nan(j.at("growth_exponent"));
    m.increment_ratio = number_or_nan(j.at("increment_ratio"));
    const json& o = j.at("options");
    m.options.tau_stab = o.at("tau_stab").get<double>();
    m.options.tau_div = o.at("tau_div").get<double>();
    m.options.window = o.at("window").get<std::size_t>();
    m.options.slope_threshold = o.at("slope_threshold").get<double>();
    m.options.ratio_threshold = o.at("ratio_threshold").get<double>();
    return m;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("verdict json: ") + e.what());
  }
}

void write_trace_csv(std::ostream& out, const FiltrationTrace& t) {
  out << "stage_index,stage_size,zeta_value,det_ratio,increment\n";
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    const double prev = i == 0 ? 0.0 : t.values[i - 1];
    out << t.stages[i] << ',' << t.sizes[i] << ',' << format_double(t.values[i]) << ',';
    if (i < t.det_ratios.size()) out << format_double(t.det_ratios[i]);
    out << ',' << format_double(t.values[i] - prev) << '\n';
  }
  if (t.verdict) out << membership_to_json(*t.verdict).dump() << '\n';
}

FiltrationTrace read_trace_csv(std::istream& in) {
  std::string line;
  while (std::getline(in, line) && !line.empty() && line.front() == '#') {
  }
  if (line.rfind("stage_index,", 0) != 0) {
    throw InvalidInput("trace csv: missing header");
  }
  FiltrationTrace t;
  bool have_ratios = true;
  for (std::size_t lineno = 2; std::getline(in, line); ++lineno) {
    if (line.empty() || line.front() == '#') continue;
    const std::string where = fmt::format("trace csv line {}", lineno);
    if (line.front() == '{') {
      try {
        t.verdict = membership_from_json(json::parse(line));
      } catch (const json::parse_error& e) {
        throw InvalidInput(where + ": " + e.what());
      }
      continue;
    }
    auto f = split_csv_line(line);
    if (f.size() != 5) throw InvalidInput(where + ": expected 5 fields");
    t.stages.push_back(parse_size(f[0], where));
    t.sizes.push_back(parse_size(f[1], where));
    t.values.push_back(parse_double(f[2], where));
    if (f[3].empty()) {
      have_ratios = false;
    } else {
      t.det_ratios.push_back(parse_double(f[3], where));
    }
  }
  if (!have_ratios) t.det_ratios.clear();
  return t;
}

}  // namespace rkhs::io
