#include "rkhs/cli.hpp"

#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "rkhs/diagnostics.hpp"
#include "rkhs/error.hpp"
#include "rkhs/gff.hpp"
#include "rkhs/gram.hpp"
#include "rkhs/io.hpp"
#include "rkhs/reproduce.hpp"
#include "rkhs/tree.hpp"

namespace rkhs::cli {

namespace {

using io::json;

struct Options {
  // shared
  std::string config;
  std::string kernel;
  std::string points;
  std::string range;
  std::string out;
  std::string format = "csv";
  std::string network;
  unsigned threads = 1;
  std::uint64_t seed = 42;

  // kernel eval
  std::string x, y;

  // diagnose
  std::vector<std::string> targets;
  std::optional<double> tau_stab, tau_div;
  std::optional<std::size_t> window;

  // gff
  std::size_t draws = 100000;

  // tree
  std::optional<std::size_t> depth;
  std::string weights = "geometric:0.5";
  std::optional<double> r0;
  std::string a, b;

  // reproduce
  std::string example;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  for (auto& f : io::split_csv_line(s)) {
    const auto first = f.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    out.push_back(f.substr(first, f.find_last_not_of(" \t") - first + 1));
  }
  return out;
}

// A command-line token as a JSON label: numbers stay numbers, anything that
// does not parse is taken as a string id.
json token_to_json(const std::string& token) {
  json j = json::parse(token, nullptr, false);
  if (j.is_discarded() || !(j.is_number() || j.is_string())) return token;
  return j;
}

Point parse_point(const std::string& token, Domain domain, const std::string& field) {
  return io::point_from_json(token_to_json(token), domain, field);
}

PointSet parse_range(const std::string& range) {
  const auto colon = range.find(':');
  std::size_t used_lo = 0, used_hi = 0;
  std::uint64_t lo = 0, hi = 0;
  try {
    if (colon == std::string::npos) throw std::invalid_argument(range);
    lo = std::stoull(range.substr(0, colon), &used_lo);
    hi = std::stoull(range.substr(colon + 1), &used_hi);
  } catch (const std::exception&) {
    throw InvalidInput("--range: expected lo:hi, got '" + range + "'");
  }
  if (used_lo != colon || used_hi != range.size() - colon - 1 || hi < lo) {
    throw InvalidInput("--range: expected lo:hi with lo <= hi, got '" + range + "'");
  }
  std::vector<std::uint64_t> ns;
  for (std::uint64_t i = lo; i <= hi; ++i) ns.push_back(i);
  return PointSet::integers(ns);
}

// Loads the kernel and point list from --config, then lets flags override.
io::KernelConfig resolve_kernel(const Options& o, json* doc_out = nullptr,
                               bool need_points = true) {
  std::optional<io::KernelConfig> cfg;
  if (!o.config.empty()) {
    json doc = io::read_json_file(o.config);
    cfg = io::kernel_config_from_json(doc);
    if (doc_out) *doc_out = std::move(doc);
  }
  if (!o.kernel.empty()) {
    Kernel k = io::builtin_kernel(o.kernel);
    PointSet pts = cfg ? cfg->points : PointSet{};
    cfg = io::KernelConfig{std::move(k), std::move(pts), std::nullopt};
  }
  if (!cfg) throw InvalidInput("no kernel given (use --config or --kernel)");
  if (!o.points.empty() && !o.range.empty()) {
    throw InvalidInput("--points and --range are mutually exclusive");
  }
  if (!o.points.empty()) {
    std::vector<Point> pts;
    const auto tokens = split_list(o.points);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      pts.push_back(parse_point(tokens[i], cfg->kernel.domain(), fmt::format("--points[{}]", i)));
    }
    cfg->points = PointSet(std::move(pts));
  } else if (!o.range.empty()) {
    cfg->points = parse_range(o.range);
  }
  if (need_points && cfg->points.empty()) throw InvalidInput("point list is empty");
  for (std::size_t i = 0; i < cfg->points.size(); ++i) {
    if (!cfg->kernel.accepts(cfg->points[i])) {
      throw InvalidInput(fmt::format("points[{}] = {} is outside the domain of the {} kernel", i,
                                     to_string(cfg->points[i]), cfg->kernel.name()));
    }
  }
  return *cfg;
}

void emit(const Options& o, std::ostream& out, const std::function<void(std::ostream&)>& body) {
  if (o.out.empty()) {
    body(out);
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw InvalidInput("cannot write '" + o.out + "'");
  body(f);
  f.flush();
  if (!f) throw Error("failed writing '" + o.out + "'");
}

void check_format(const Options& o) {
  if (o.format != "csv" && o.format != "json") {
    throw InvalidInput("--format must be csv or json");
  }
}

int cmd_kernel_eval(const Options& o, std::ostream& out) {
  const auto cfg = resolve_kernel(o, nullptr, false);
  const Point x = parse_point(o.x, cfg.kernel.domain(), "--x");
  const Point y = parse_point(o.y, cfg.kernel.domain(), "--y");
  for (const auto& [p, flag] : {std::pair{x, "--x"}, std::pair{y, "--y"}}) {
    if (!cfg.kernel.accepts(p)) {
      throw DomainMismatch(std::string(flag) + ": " + to_string(p) + " is outside the domain of the " +
                           cfg.kernel.name() + " kernel");
    }
  }
  if (cfg.kernel.is_exact()) {
    out << cfg.kernel.exact(x, y).get_str() << '\n';
  } else {
    out << io::format_double(cfg.kernel(x, y)) << '\n';
  }
  return kOk;
}

int cmd_kernel_gram(const Options& o, std::ostream& out) {
  check_format(o);
  const auto cfg = resolve_kernel(o);
  const GramMatrix g = assemble_gram(cfg.kernel, cfg.points);
  emit(o, out, [&](std::ostream& s) {
    if (o.format == "json") {
      json labels = json::array();
      for (const auto& p : cfg.points.points()) labels.push_back(io::point_to_json(p));
      json rows = json::array();
      for (Eigen::Index i = 0; i < g.entries().rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < g.entries().cols(); ++j) row.push_back(g.entries()(i, j));
        rows.push_back(row);
      }
      s << json{{"labels", labels}, {"values", rows}}.dump() << '\n';
    } else {
      io::write_matrix_csv(s, cfg.points, g.entries());
    }
  });
  return kOk;
}

json trace_to_json(const Point& target, const FiltrationTrace& t) {
  json ratios = json::array();
  for (double r : t.det_ratios) ratios.push_back(std::isfinite(r) ? json(r) : json(nullptr));
  json doc = {{"target", io::point_to_json(target)},
              {"stages", t.stages},
              {"sizes", t.sizes},
              {"values", t.values},
              {"det_ratios", ratios}};
  if (t.verdict) doc["verdict"] = io::membership_to_json(*t.verdict);
  return doc;
}

int cmd_diagnose(const Options& o, std::ostream& out) {
  check_format(o);
  json doc;
  const auto cfg = resolve_kernel(o, &doc);

  ClassifyOptions copt;
  std::vector<std::string> target_tokens = o.targets;
  if (doc.is_object()) {
    if (auto it = doc.find("options"); it != doc.end() && it->is_object()) {
      copt.tau_stab = it->value("tau_stab", copt.tau_stab);
      copt.tau_div = it->value("tau_div", copt.tau_div);
      copt.window = it->value("window", copt.window);
    }
  }
  if (o.tau_stab) copt.tau_stab = *o.tau_stab;
  if (o.tau_div) copt.tau_div = *o.tau_div;
  if (o.window) copt.window = *o.window;
  if (!(copt.tau_stab > 0) || !(copt.tau_div > 0) || copt.window < 1) {
    throw InvalidInput("tolerances must be positive and the window at least 1");
  }

  std::vector<Point> targets;
  if (!target_tokens.empty()) {
    for (std::size_t i = 0; i < target_tokens.size(); ++i) {
      targets.push_back(
          parse_point(target_tokens[i], cfg.kernel.domain(), fmt::format("--target[{}]", i)));
    }
  } else if (doc.is_object() && doc.contains("targets")) {
    const json& ts = doc["targets"];
    if (!ts.is_array()) throw InvalidInput("targets: expected an array");
    for (std::size_t i = 0; i < ts.size(); ++i) {
      targets.push_back(
          io::point_from_json(ts[i], cfg.kernel.domain(), fmt::format("targets[{}]", i)));
    }
  } else {
    targets.push_back(cfg.points[0]);
  }

  TraceOptions topt;
  topt.threads = o.threads;
  std::vector<FiltrationTrace> traces;
  for (const auto& t : targets) {
    if (!cfg.points.contains(t)) {
      throw InvalidInput("target " + to_string(t) + " is not among the points");
    }
    traces.push_back(diagnose(cfg.kernel, Filtration::prefixes(cfg.points, t), copt, topt));
  }

  emit(o, out, [&](std::ostream& s) {
    if (o.format == "json") {
      json all = json::array();
      for (std::size_t i = 0; i < targets.size(); ++i) {
        all.push_back(trace_to_json(targets[i], traces[i]));
      }
      s << all.dump() << '\n';
      return;
    }
    for (std::size_t i = 0; i < targets.size(); ++i) {
      s << "# target " << to_string(targets[i]) << '\n';
      io::write_trace_csv(s, traces[i]);
    }
  });
  return kOk;
}

int cmd_network(const std::string& what, const Options& o, std::ostream& out) {
  if (o.network.empty()) throw InvalidInput("--network is required");
  const Network net = io::load_network(o.network);
  if (what == "green") {
    const PointSet pts = net.grounded_points();
    const GramMatrix g = assemble_gram(green_kernel(net), pts);
    emit(o, out, [&](std::ostream& s) { io::write_matrix_csv(s, pts, g.entries()); });
  } else if (what == "resistance") {
    const auto n = static_cast<Eigen::Index>(net.size());
    // R(x,y) = v_x(x) + v_y(y) - 2 v_x(y), with v_o = 0.
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (static_cast<std::size_t>(i) == net.base()) continue;
      const auto& vi = net.dipole_values(static_cast<std::size_t>(i));
      r(i, static_cast<Eigen::Index>(net.base())) = vi(i);
      r(static_cast<Eigen::Index>(net.base()), i) = vi(i);
      for (Eigen::Index j = 0; j < i; ++j) {
        if (static_cast<std::size_t>(j) == net.base()) continue;
        const auto& vj = net.dipole_values(static_cast<std::size_t>(j));
        r(i, j) = r(j, i) = vi(i) + vj(j) - 2.0 * vi(j);
      }
    }
    emit(o, out, [&](std::ostream& s) { io::write_matrix_csv(s, net.vertices(), r); });
  } else {
    emit(o, out, [&](std::ostream& s) {
      s << "vertex,delta_norm_sq,interior\n";
      for (std::size_t i = 0; i < net.size(); ++i) {
        s << net.vertex(i) << ',' << io::format_double(net.total_conductance(i)) << ','
          << (net.is_interior(i) ? 1 : 0) << '\n';
      }
    });
  }
  return kOk;
}

int cmd_gff(const std::string& what, const Options& o, std::ostream& out) {
  if (o.network.empty()) throw InvalidInput("--network is required");
  if (o.draws == 0) throw InvalidInput("--n must be positive");
  const Network net = io::load_network(o.network);
  const PointSet pts = net.grounded_points();
  const GramMatrix k = assemble_gram(green_kernel(net), pts);
  const SampleSet s = sample(k, o.draws, o.seed, o.threads);
  if (what == "sample") {
    emit(o, out, [&](std::ostream& f) {
      for (std::size_t j = 0; j < pts.size(); ++j) f << (j ? "," : "") << to_string(pts[j]);
      f << '\n';
      for (Eigen::Index i = 0; i < s.samples.rows(); ++i) {
        for (Eigen::Index j = 0; j < s.samples.cols(); ++j) {
          f << (j ? "," : "") << io::format_double(s.samples(i, j));
        }
        f << '\n';
      }
    });
    return kOk;
  }
  const auto n = static_cast<double>(o.draws);
  const Eigen::MatrixXd cov = empirical_covariance(s);
  const Eigen::MatrixXd se = covariance_standard_error(k, o.draws);
  std::vector<CheckResult> checks;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i; j < pts.size(); ++j) {
      const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
      const double z = std::abs(cov(a, b) - k.entries()(a, b)) / se(a, b);
      checks.push_back({fmt::format("cov({},{}) within 5 SE", to_string(pts[i]), to_string(pts[j])),
                        z <= 5.0, io::format_double(cov(a, b)),
                        fmt::format("{} ({:.2f} SE)", io::format_double(k.entries()(a, b)), z)});
    }
  }
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (i == net.base()) continue;
    const auto d = delta_realization(net, s, net.vertex(i));
    double m2 = 0.0;
    for (double v : d) m2 += v * v;
    m2 /= n;
    const double c = net.total_conductance(i);
    const double z = std::abs(m2 - c) / (c * std::sqrt(2.0 / n));
    checks.push_back({fmt::format("Var(delta~_{}) within 5 SE", net.vertex(i)), z <= 5.0,
                      io::format_double(m2), fmt::format("{} ({:.2f} SE)", io::format_double(c), z)});
  }
  emit(o, out, [&](std::ostream& f) { print_checks(f, checks); });
  for (const auto& c : checks) {
    if (!c.passed) return kReproductionFailure;
  }
  return kOk;
}

int cmd_tree(const std::string& what, const Options& o, std::ostream& out) {
  const auto weights = LevelWeights::parse(o.weights, o.r0);
  const std::size_t depth = o.depth.value_or(default_depth(weights));
  if (what == "histogram") {
    const auto rows = energy_histogram(depth, weights);
    emit(o, out, [&](std::ostream& s) { write_histogram_csv(s, rows, weights); });
    return kOk;
  }
  if (o.a.empty() || o.b.empty()) throw InvalidInput("--a and --b are required");
  const auto r = boundary_resistance(Word(o.a), Word(o.b), weights, depth);
  emit(o, out, [&](std::ostream& s) {
    s << "# weights: " << weights.describe() << '\n';
    s << "split,network,series,limit\n";
    s << r.split << ',' << io::format_double(r.network) << ',' << io::format_double(r.series)
      << ',' << (r.limit ? io::format_double(*r.limit) : std::string()) << '\n';
  });
  return kOk;
}

int cmd_reproduce(const Options& o, std::ostream& out) {
  ReproduceOptions ro;
  if (o.depth) ro.tree_depth = *o.depth;
  ro.histogram_path = o.out.empty() ? std::string("tree_histogram.csv") : o.out;
  ro.gff_draws = o.draws;
  ro.seed = o.seed;
  ro.threads = o.threads;
  const auto checks = reproduce(o.example, ro);
  print_checks(out, checks);
  for (const auto& c : checks) {
    if (!c.passed) return kReproductionFailure;
  }
  return kOk;
}

void add_kernel_source(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "JSON kernel config");
  cmd->add_option("--kernel", o.kernel, "builtin kernel: brownian, bridge, binomial");
  cmd->add_option("--points", o.points, "comma-separated point labels");
  cmd->add_option("--range", o.range, "integer points lo:hi (inclusive)");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Reproducing-kernel diagnostics: point masses, networks, Gaussian fields"};
  app.name("rkhs");
  app.require_subcommand(1);

  auto* kernel = app.add_subcommand("kernel", "evaluate a kernel or its Gram matrix");
  kernel->require_subcommand(1);
  auto* eval = kernel->add_subcommand("eval", "print k(x, y)");
  add_kernel_source(eval, o);
  eval->add_option("--x", o.x, "first label")->required();
  eval->add_option("--y", o.y, "second label")->required();
  auto* gram = kernel->add_subcommand("gram", "print the Gram matrix of the points");
  add_kernel_source(gram, o);
  gram->add_option("--out", o.out, "output file (default stdout)");
  gram->add_option("--format", o.format, "csv or json");

  auto* diag = app.add_subcommand("diagnose", "trace ||P_F delta_x||^2 along prefixes");
  add_kernel_source(diag, o);
  diag->add_option("--target", o.targets, "target label (repeatable; default first point)");
  diag->add_option("--tau-stab", o.tau_stab, "stabilization tolerance");
  diag->add_option("--tau-div", o.tau_div, "divergence increment threshold");
  diag->add_option("--window", o.window, "number of trailing stages examined");
  diag->add_option("--threads", o.threads, "worker threads");
  diag->add_option("--out", o.out, "output file (default stdout)");
  diag->add_option("--format", o.format, "csv or json");

  auto* network = app.add_subcommand("network", "Green kernel, resistance and c(x) of a network");
  network->require_subcommand(1);
  std::vector<std::pair<std::string, CLI::App*>> network_cmds;
  for (const char* name : {"green", "resistance", "delta-norm"}) {
    auto* c = network->add_subcommand(name);
    c->add_option("--network", o.network, "network JSON")->required();
    c->add_option("--out", o.out, "output file (default stdout)");
    network_cmds.emplace_back(name, c);
  }
  network->get_subcommand("green")->description("Gram matrix of the Green kernel on V \\ {o}");
  network->get_subcommand("resistance")->description("effective resistance between all vertices");
  network->get_subcommand("delta-norm")->description("||delta_x||^2 = c(x) for every vertex");

  auto* gff = app.add_subcommand("gff", "Gaussian free field draws");
  gff->require_subcommand(1);
  std::vector<std::pair<std::string, CLI::App*>> gff_cmds;
  for (const char* name : {"sample", "check"}) {
    auto* c = gff->add_subcommand(name);
    c->add_option("--network", o.network, "network JSON")->required();
    c->add_option("--n", o.draws, "number of draws");
    c->add_option("--seed", o.seed, "random seed");
    c->add_option("--threads", o.threads, "worker threads");
    c->add_option("--out", o.out, "output file (default stdout)");
    gff_cmds.emplace_back(name, c);
  }
  gff->get_subcommand("sample")->description("write draws as CSV, one row per draw");
  gff->get_subcommand("check")->description("compare empirical moments with the kernel");

  auto* tree = app.add_subcommand("tree", "dyadic tree example");
  tree->require_subcommand(1);
  std::vector<std::pair<std::string, CLI::App*>> tree_cmds;
  for (const char* name : {"histogram", "resistance"}) {
    auto* c = tree->add_subcommand(name);
    c->add_option("--depth", o.depth, "truncation depth");
    c->add_option("--weights", o.weights, "geometric:q, constant:c or file:path");
    c->add_option("--r0", o.r0, "r(0) convention (default 1)");
    c->add_option("--out", o.out, "output file (default stdout)");
    tree_cmds.emplace_back(name, c);
  }
  tree->get_subcommand("histogram")->description("per-level ||delta_alpha||^2 as CSV");
  auto* tres = tree->get_subcommand("resistance");
  tres->description("resistance between two words of length depth");
  tres->add_option("--a", o.a, "first word (bits)");
  tres->add_option("--b", o.b, "second word (bits)");

  auto* repro = app.add_subcommand("reproduce", "run the closed-form checks of an example");
  repro->add_option("name", o.example, "brownian, bridge, binomial, network-path, tree, gff")
      ->required();
  repro->add_option("--depth", o.depth, "tree depth (default 6)");
  repro->add_option("--out", o.out, "tree histogram destination");
  repro->add_option("--n", o.draws, "gff draws");
  repro->add_option("--seed", o.seed, "gff seed");
  repro->add_option("--threads", o.threads, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (eval->parsed()) return cmd_kernel_eval(o, out);
    if (gram->parsed()) return cmd_kernel_gram(o, out);
    if (diag->parsed()) return cmd_diagnose(o, out);
    for (const auto& [name, c] : network_cmds) {
      if (c->parsed()) return cmd_network(name, o, out);
    }
    for (const auto& [name, c] : gff_cmds) {
      if (c->parsed()) return cmd_gff(name, o, out);
    }
    for (const auto& [name, c] : tree_cmds) {
      if (c->parsed()) return cmd_tree(name, o, out);
    }
    if (repro->parsed()) return cmd_reproduce(o, out);
  } catch (const MonotonicityViolation& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalBreakdown;
  } catch (const NotPSD& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalBreakdown;
  } catch (const NotInRange& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalBreakdown;
  } catch (const SingularGram& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalBreakdown;
  } catch (const Error& e) {
    // Every other library error describes a problem with the input.
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalBreakdown;
  }
  return kInputError;
}

}  // namespace rkhs::cli
