#include "rkhs/tree.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

#include <fmt/format.h>

#include "rkhs/error.hpp"

namespace rkhs {

Word::Word(std::string bits) : bits_(std::move(bits)) {
  for (char b : bits_) {
    if (b != '0' && b != '1') throw InvalidInput("word '" + bits_ + "' has a non-binary digit");
  }
}

Word Word::child(char bit) const {
  return Word(bits_ + bit);
}

Word Word::prefix(std::size_t n) const {
  if (n > bits_.size()) throw InvalidInput("prefix longer than the word");
  return Word(bits_.substr(0, n));
}

std::string Word::id() const {
  return bits_.empty() ? std::string("o") : bits_;
}

std::size_t common_prefix_length(const Word& a, const Word& b) {
  std::size_t n = 0;
  while (n < a.length() && n < b.length() && a.bits()[n] == b.bits()[n]) ++n;
  return n;
}

namespace {

void require_positive(double v, const std::string& what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidInput(fmt::format("{} must be positive and finite, got {}", what, v));
  }
}

double parse_real(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw InvalidInput(what + ": '" + text + "' is not a number");
  }
  while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
  if (used != text.size()) throw InvalidInput(what + ": '" + text + "' is not a number");
  return v;
}

}  // namespace

LevelWeights LevelWeights::geometric(double q, double r0) {
  require_positive(q, "geometric ratio");
  require_positive(r0, "r(0)");
  LevelWeights w;
  w.kind_ = Kind::Geometric;
  w.param_ = q;
  w.r0_ = r0;
  return w;
}

LevelWeights LevelWeights::constant(double c, double r0) {
  require_positive(c, "constant weight");
  require_positive(r0, "r(0)");
  LevelWeights w;
  w.kind_ = Kind::Constant;
  w.param_ = c;
  w.r0_ = r0;
  return w;
}

LevelWeights LevelWeights::table(std::vector<double> values) {
  if (values.empty()) throw InvalidInput("weight table is empty");
  for (std::size_t n = 0; n < values.size(); ++n) {
    require_positive(values[n], fmt::format("r({})", n));
  }
  LevelWeights w;
  w.kind_ = Kind::Table;
  w.r0_ = values.front();
  w.values_ = std::move(values);
  return w;
}

LevelWeights LevelWeights::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open weight file '" + path + "'");
  std::vector<double> values;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    values.push_back(parse_real(line, fmt::format("{}:{}", path, lineno)));
  }
  return table(std::move(values));
}

LevelWeights LevelWeights::parse(const std::string& spec, std::optional<double> r0) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) {
    throw InvalidInput("weight spec '" + spec + "' must be geometric:q, constant:c or file:path");
  }
  const std::string kind = spec.substr(0, colon), arg = spec.substr(colon + 1);
  if (kind == "geometric") return geometric(parse_real(arg, "geometric ratio"), r0.value_or(1.0));
  if (kind == "constant") return constant(parse_real(arg, "constant weight"), r0.value_or(1.0));
  if (kind == "file") {
    auto w = from_file(arg);
    if (r0) {
      require_positive(*r0, "r(0)");
      w.values_.front() = *r0;
      w.r0_ = *r0;
    }
    return w;
  }
  throw InvalidInput("unknown weight kind '" + kind + "'");
}

double LevelWeights::operator()(std::size_t n) const {
  if (n == 0) return r0_;
  switch (kind_) {
    case Kind::Geometric:
      return std::pow(param_, static_cast<double>(n));
    case Kind::Constant:
      return param_;
    case Kind::Table:
      if (n < values_.size()) return values_[n];
      break;
  }
  throw WeightUndefined(fmt::format("no weight for level {}", n));
}

bool LevelWeights::defined(std::size_t n) const {
  return kind_ != Kind::Table || n < values_.size();
}

double LevelWeights::partial_sum(std::size_t from, std::size_t to) const {
  double s = 0.0;
  for (std::size_t n = from; n < to; ++n) s += (*this)(n);
  return s;
}

std::optional<double> LevelWeights::tail(std::size_t from) const {
  if (kind_ != Kind::Geometric || param_ >= 1.0) return std::nullopt;
  if (from == 0) return r0_ + param_ / (1.0 - param_);
  return std::pow(param_, static_cast<double>(from)) / (1.0 - param_);
}

bool LevelWeights::summable() const {
  return kind_ == Kind::Geometric && param_ < 1.0;
}

std::string LevelWeights::describe() const {
  switch (kind_) {
    case Kind::Geometric:
      return fmt::format("geometric r(n)={:.17g}^n, r(0)={:.17g} (convention)", param_, r0_);
    case Kind::Constant:
      return fmt::format("constant r(n)={:.17g}, r(0)={:.17g} (convention)", param_, r0_);
    case Kind::Table:
      break;
  }
  return fmt::format("table of {} levels, r(0)={:.17g} (convention)", values_.size(), r0_);
}

namespace {

// Breadth-first position of a word: 2^l - 1 + (bits read as binary).
std::vector<std::string> tree_ids(std::size_t depth) {
  std::vector<std::string> ids;
  ids.reserve((std::size_t{2} << depth) - 1);
  ids.emplace_back("o");
  std::vector<std::string> level{""};
  for (std::size_t l = 1; l <= depth; ++l) {
    std::vector<std::string> next;
    next.reserve(level.size() * 2);
    for (const auto& w : level) {
      next.push_back(w + '0');
      next.push_back(w + '1');
    }
    ids.insert(ids.end(), next.begin(), next.end());
    level = std::move(next);
  }
  return ids;
}

}  // namespace

Network build_tree(std::size_t depth, const LevelWeights& weights) {
  if (depth < 1) throw InvalidInput("tree depth must be at least 1");
  if (depth > 20) throw InvalidInput(fmt::format("tree depth {} is too large (max 20)", depth));
  std::vector<std::string> ids = tree_ids(depth);
  std::vector<Edge> edges;
  edges.reserve(ids.size() - 1);
  for (std::size_t i = 1; i < ids.size(); ++i) {
    const std::string& w = ids[i];
    const std::size_t parent_level = w.size() - 1;
    const std::string parent = parent_level == 0 ? std::string("o") : w.substr(0, parent_level);
    edges.push_back({parent, w, 1.0 / weights(parent_level)});
  }
  const std::size_t first_leaf = (std::size_t{1} << depth) - 1;
  std::vector<std::string> leaves(ids.begin() + static_cast<std::ptrdiff_t>(first_leaf), ids.end());
  return Network(std::move(ids), "o", std::move(edges), std::move(leaves));
}

double tree_delta_norm_closed(const Word& alpha, const LevelWeights& weights,
                              std::size_t depth) {
  const std::size_t l = alpha.length();
  if (l == 0 || l >= depth) {
    throw BoundaryWord(fmt::format("word '{}' (level {}) is not interior to a depth-{} tree",
                                   alpha.id(), l, depth));
  }
  return 2.0 / weights(l) + 1.0 / weights(l - 1);
}

double series_resistance(std::size_t split, std::size_t depth, const LevelWeights& weights) {
  return 2.0 * weights.partial_sum(split, depth);
}

namespace {

void check_pair(const Word& a, const Word& b, std::size_t depth) {
  if (a.length() != depth || b.length() != depth) {
    throw InvalidInput(fmt::format("words must have length {} (got {} and {})", depth,
                                   a.length(), b.length()));
  }
  if (a == b) throw IdenticalWords("boundary words coincide: '" + a.id() + "'");
}

}  // namespace

BoundaryResistance boundary_resistance(const Word& a, const Word& b,
                                       const LevelWeights& weights, std::size_t depth) {
  check_pair(a, b, depth);
  return boundary_resistance(build_tree(depth, weights), a, b, weights, depth);
}

BoundaryResistance boundary_resistance(const Network& tree, const Word& a, const Word& b,
                                       const LevelWeights& weights, std::size_t depth) {
  check_pair(a, b, depth);
  BoundaryResistance out;
  out.split = common_prefix_length(a, b);
  out.network = resistance(tree, a.id(), b.id());
  out.series = series_resistance(out.split, depth, weights);
  if (auto t = weights.tail(out.split)) out.limit = 2.0 * *t;
  return out;
}

std::vector<HistogramRow> energy_histogram(std::size_t depth, const LevelWeights& weights) {
  if (depth < 2) throw InvalidInput("histogram needs depth at least 2");
  std::vector<HistogramRow> rows;
  for (std::size_t l = 1; l < depth; ++l) {
    rows.push_back({l, 2.0 / weights(l) + 1.0 / weights(l - 1), std::size_t{1} << l, l == 1});
  }
  return rows;
}

void write_histogram_csv(std::ostream& out, const std::vector<HistogramRow>& rows,
                         const LevelWeights& weights) {
  out << "# weights: " << weights.describe() << '\n';
  out << "level,energy,multiplicity,convention_dependent\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{:.17g},{},{}\n", r.level, r.energy, r.multiplicity,
                       r.convention_dependent ? 1 : 0);
  }
}

std::size_t default_depth(const LevelWeights& weights) {
  constexpr std::size_t kCap = 16;
  for (std::size_t d = 2; d < kCap; ++d) {
    auto t = weights.tail(d);
    if (!t) break;
    if (*t < 1e-8) return d;
  }
  return kCap;
}

}  // namespace rkhs
