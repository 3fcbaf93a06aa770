#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rkhs {

struct CheckResult {
  std::string name;
  bool passed;
  std::string observed;
  std::string expected;
};

struct ReproduceOptions {
  std::size_t tree_depth = 6;
  std::optional<std::string> histogram_path;  // tree: CSV destination
  std::size_t gff_draws = 100000;
  unsigned long long seed = 42;
  unsigned threads = 1;
};

/// Example names accepted by reproduce().
const std::vector<std::string>& example_names();

/// Runs the closed-form checks of one example. Throws InvalidInput for an
/// unknown name.
std::vector<CheckResult> reproduce(const std::string& name,
                                   const ReproduceOptions& options = {});

void print_checks(std::ostream& out, const std::vector<CheckResult>& checks);

}  // namespace rkhs
