#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "rkhs/diagnostics.hpp"
#include "rkhs/kernel.hpp"
#include "rkhs/network.hpp"
#include "rkhs/point.hpp"

namespace rkhs::io {

using nlohmann::json;

/// 17 significant digits, so every double round-trips.
std::string format_double(double x);

/// A kernel description plus the point list it is evaluated on.
///
///   {"kernel": {"type": "table"|"brownian"|"bridge"|"binomial"|"network", ...},
///    "points": [...]}
///
/// "table" takes "labels" and "values"; "network" takes an inline
/// "network" object (see network_from_json). When "points" is omitted the
/// table labels or the grounded network vertices are used.
struct KernelConfig {
  Kernel kernel;
  PointSet points;
  std::optional<Network> network;
};

KernelConfig kernel_config_from_json(const json& doc);
KernelConfig load_kernel_config(const std::string& path);

/// A kernel by its builtin name (brownian, bridge, binomial).
Kernel builtin_kernel(const std::string& type);

/// Converts a JSON label to a point of the given domain. Throws InvalidInput
/// naming `field` when the label does not fit.
Point point_from_json(const json& label, Domain domain, const std::string& field);
json point_to_json(const Point& p);

/// {"vertices": [...], "base": id, "edges": [[u, v, c], ...]} and an
/// optional "boundary": [...]. Numeric ids are converted to strings.
Network network_from_json(const json& doc);
json network_to_json(const Network& net);
Network load_network(const std::string& path);

json read_json_file(const std::string& path);

/// CSV with a header row of labels; each row starts with its label.
void write_matrix_csv(std::ostream& out, const std::vector<std::string>& labels,
                      const Eigen::MatrixXd& m);
void write_matrix_csv(std::ostream& out, const PointSet& labels,
                      const Eigen::MatrixXd& m);

struct LabeledMatrix {
  std::vector<std::string> labels;
  Eigen::MatrixXd values;
};
LabeledMatrix read_matrix_csv(std::istream& in);

/// stage_index,stage_size,zeta_value,det_ratio,increment rows, followed by
/// the verdict as one JSON line when present.
void write_trace_csv(std::ostream& out, const FiltrationTrace& t);
FiltrationTrace read_trace_csv(std::istream& in);

json membership_to_json(const Membership& m);
Membership membership_from_json(const json& j);

/// Splits "a,b,c" into fields (no quoting; labels never contain commas).
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace rkhs::io
