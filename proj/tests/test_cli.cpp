#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "rkhs/cli.hpp"
#include "rkhs/io.hpp"

using namespace rkhs;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "rkhs");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

// Temporary file removed on scope exit.
struct TempFile {
  std::string path;
  explicit TempFile(std::string p, const std::string& content = {}) : path(std::move(p)) {
    if (!content.empty()) std::ofstream(path) << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

const char* kPathNetwork = R"({"vertices": ["o", "a", "b"], "base": "o",
  "edges": [["o", "a", 1], ["a", "b", 1]]})";

std::vector<io::json> verdict_lines(const std::string& text) {
  std::vector<io::json> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.front() == '{') out.push_back(io::json::parse(line));
  }
  return out;
}

}  // namespace

TEST_SUITE("cli diagnose") {
  TEST_CASE("brownian points 1..10, target 1 stabilizes at stage 2") {
    const auto r = run({"diagnose", "--kernel", "brownian", "--points", "1,2,3,4,5,6,7,8,9,10",
                        "--target", "1"});
    CHECK(r.code == cli::kOk);
    const auto v = verdict_lines(r.out);
    REQUIRE(v.size() == 1);
    CHECK(v[0]["verdict"] == "Stabilized");
    CHECK(v[0]["stage"] == 2);
    CHECK(v[0]["value"].get<double>() == doctest::Approx(2.0).epsilon(1e-12));
    std::istringstream in(r.out);
    const auto t = io::read_trace_csv(in);
    CHECK(t.values.size() == 10);
    CHECK(t.values[1] == doctest::Approx(2.0).epsilon(1e-12));
  }

  TEST_CASE("binomial targets 0..3 over 0..30 all diverge") {
    const auto r = run({"diagnose", "--kernel", "binomial", "--range", "0:30", "--target", "0",
                        "--target", "1", "--target", "2", "--target", "3"});
    CHECK(r.code == cli::kOk);
    const auto v = verdict_lines(r.out);
    REQUIRE(v.size() == 4);
    for (const auto& j : v) CHECK(j["verdict"] == "Diverging");
  }

  TEST_CASE("json format") {
    const auto r = run({"diagnose", "--kernel", "brownian", "--points", "1,2,3,4,5,6,7",
                        "--format", "json"});
    CHECK(r.code == cli::kOk);
    const auto j = io::json::parse(r.out);
    CHECK(j[0]["target"] == 1.0);
    CHECK(j[0]["verdict"]["verdict"] == "Stabilized");
  }

  TEST_CASE("input errors exit 1") {
    CHECK(run({"diagnose", "--kernel", "brownian", "--points", ""}).code == cli::kInputError);
    CHECK(run({"diagnose", "--kernel", "brownian", "--points", "1,2", "--target", "5"}).code ==
          cli::kInputError);
    CHECK(run({"diagnose", "--kernel", "bridge", "--points", "0.5,1.5"}).code == cli::kInputError);
    CHECK(run({"diagnose", "--kernel", "cubic", "--points", "1"}).code == cli::kInputError);
    CHECK(run({"diagnose", "--kernel", "brownian", "--points", "1,2"}).code == cli::kInputError);
    CHECK(run({"diagnose", "--kernel", "binomial", "--range", "5:2"}).code == cli::kInputError);
    CHECK(run({"diagnose"}).code == cli::kInputError);
    CHECK(run({"frobnicate"}).code == cli::kInputError);
    const auto bad = run({"diagnose", "--kernel", "brownian", "--points", "1,x"});
    CHECK(bad.code == cli::kInputError);
    CHECK(bad.err.find("--points[1]") != std::string::npos);
  }

  TEST_CASE("indefinite table is a numerical breakdown") {
    TempFile cfg("test_cli_indefinite.json",
                 R"({"kernel": {"type": "table", "labels": [0, 1], "values": [[1, 2], [2, 1]]}})");
    CHECK(run({"diagnose", "--config", cfg.path, "--window", "1"}).code ==
          cli::kNumericalBreakdown);
  }

  TEST_CASE("config file, with flags taking precedence") {
    TempFile cfg("test_cli_config.json", R"({"kernel": {"type": "brownian"},
      "points": [1, 2, 3, 4, 5, 6, 7], "targets": [2], "options": {"window": 4}})");
    const auto from_file = run({"diagnose", "--config", cfg.path});
    CHECK(from_file.code == cli::kOk);
    auto v = verdict_lines(from_file.out);
    REQUIRE(v.size() == 1);
    CHECK(v[0]["options"]["window"] == 4);
    CHECK(v[0]["value"] == doctest::Approx(2.0));

    const auto flags = run({"diagnose", "--config", cfg.path, "--points", "1,3,6,10,15,21,28",
                            "--target", "3", "--window", "3"});
    CHECK(flags.code == cli::kOk);
    v = verdict_lines(flags.out);
    CHECK(v[0]["options"]["window"] == 3);
    CHECK(v[0]["value"] == doctest::Approx(5.0 / 6.0));
  }

  TEST_CASE("malformed config reports the position") {
    TempFile cfg("test_cli_bad.json", "{\"kernel\":\n  nope}");
    const auto r = run({"diagnose", "--config", cfg.path});
    CHECK(r.code == cli::kInputError);
    CHECK(r.err.find("line 2") != std::string::npos);
  }

  TEST_CASE("identical configs give byte-identical files") {
    TempFile a("test_cli_a.csv"), b("test_cli_b.csv");
    for (const auto* p : {&a, &b}) {
      CHECK(run({"diagnose", "--kernel", "bridge", "--points", "0.5,0.75,0.875,0.9375,0.96875,0.984375",
                 "--target", "0.5", "--out", p->path})
                .code == cli::kOk);
    }
    CHECK(slurp(a.path) == slurp(b.path));
    CHECK_FALSE(slurp(a.path).empty());
  }
}

TEST_SUITE("cli kernel") {
  TEST_CASE("exact binomial values") {
    const auto r = run({"kernel", "eval", "--kernel", "binomial", "--x", "30", "--y", "30"});
    CHECK(r.code == cli::kOk);
    CHECK(r.out == "118264581564861424\n");
    CHECK(run({"kernel", "eval", "--kernel", "binomial", "--x", "-1", "--y", "3"}).code ==
          cli::kInputError);
  }

  TEST_CASE("floating values and domain checks") {
    CHECK(run({"kernel", "eval", "--kernel", "bridge", "--x", "0.25", "--y", "0.5"}).out ==
          "0.125\n");
    CHECK(run({"kernel", "eval", "--kernel", "brownian", "--x", "-1", "--y", "2"}).code ==
          cli::kInputError);
  }

  TEST_CASE("gram csv and json") {
    const auto csv = run({"kernel", "gram", "--kernel", "brownian", "--points", "1,2"});
    CHECK(csv.out == ",1,2\n1,1,1\n2,1,2\n");
    std::istringstream in(csv.out);
    CHECK(io::read_matrix_csv(in).values(1, 1) == 2.0);
    const auto js = run({"kernel", "gram", "--kernel", "brownian", "--points", "1,2", "--format",
                         "json"});
    CHECK(io::json::parse(js.out)["values"][1][1] == 2.0);
    CHECK(run({"kernel", "gram", "--kernel", "brownian", "--points", "1", "--format", "xml"})
              .code == cli::kInputError);
  }
}

TEST_SUITE("cli network, gff, tree") {
  TEST_CASE("network subcommands") {
    TempFile net("test_cli_net.json", kPathNetwork);
    const auto g = run({"network", "green", "--network", net.path});
    CHECK(g.code == cli::kOk);
    CHECK(g.out.rfind(",a,b\n", 0) == 0);
    std::istringstream gin(g.out);
    const auto green = io::read_matrix_csv(gin).values;
    const Eigen::Matrix2d green_expected{{1, 1}, {1, 2}};
    CHECK((green - green_expected).cwiseAbs().maxCoeff() < 1e-12);
    const auto r = run({"network", "resistance", "--network", net.path});
    std::istringstream rin(r.out);
    const auto res = io::read_matrix_csv(rin);
    CHECK(res.labels == std::vector<std::string>{"o", "a", "b"});
    const Eigen::Matrix3d res_expected{{0, 1, 2}, {1, 0, 1}, {2, 1, 0}};
    CHECK((res.values - res_expected).cwiseAbs().maxCoeff() < 1e-12);
    const auto d = run({"network", "delta-norm", "--network", net.path});
    CHECK(d.out == "vertex,delta_norm_sq,interior\no,1,1\na,2,1\nb,1,1\n");
    CHECK(run({"network", "green", "--network", "/nonexistent.json"}).code == cli::kInputError);
  }

  TEST_CASE("disconnected networks are input errors") {
    TempFile net("test_cli_disc.json", R"({"vertices": ["o", "a", "b", "c"], "base": "o",
      "edges": [["o", "a", 1], ["b", "c", 1]]})");
    CHECK(run({"network", "green", "--network", net.path}).code == cli::kInputError);
  }

  TEST_CASE("gff sample is reproducible across runs and threads") {
    TempFile net("test_cli_gff.json", kPathNetwork);
    TempFile a("test_cli_gff_a.csv"), b("test_cli_gff_b.csv");
    CHECK(run({"gff", "sample", "--network", net.path, "--n", "5000", "--out", a.path}).code ==
          cli::kOk);
    CHECK(run({"gff", "sample", "--network", net.path, "--n", "5000", "--threads", "3", "--out",
               b.path})
              .code == cli::kOk);
    const std::string text = slurp(a.path);
    CHECK(text == slurp(b.path));
    CHECK(text.rfind("a,b\n", 0) == 0);
    CHECK(run({"gff", "check", "--network", net.path, "--n", "20000"}).code == cli::kOk);
    CHECK(run({"gff", "sample", "--network", net.path, "--n", "0"}).code == cli::kInputError);
  }

  TEST_CASE("tree histogram and resistance") {
    const auto h = run({"tree", "histogram", "--depth", "4", "--weights", "geometric:0.5"});
    CHECK(h.code == cli::kOk);
    CHECK(h.out ==
          "# weights: geometric r(n)=0.5^n, r(0)=1 (convention)\n"
          "level,energy,multiplicity,convention_dependent\n"
          "1,5,2,1\n2,10,4,0\n3,20,8,0\n");
    const auto r = run({"tree", "resistance", "--depth", "3", "--a", "000", "--b", "111"});
    CHECK(r.code == cli::kOk);
    CHECK(r.out.find("0,3.5") != std::string::npos);
    CHECK(run({"tree", "resistance", "--depth", "3", "--a", "000", "--b", "000"}).code ==
          cli::kInputError);
    CHECK(run({"tree", "histogram", "--weights", "nope"}).code == cli::kInputError);
  }
}

TEST_SUITE("cli reproduce") {
  TEST_CASE("brownian passes") {
    const auto r = run({"reproduce", "brownian"});
    CHECK(r.code == cli::kOk);
    CHECK(r.out.find("FAIL") == std::string::npos);
    CHECK(r.out.find("PASS") != std::string::npos);
  }

  TEST_CASE("tree writes the histogram") {
    TempFile hist("test_cli_hist.csv");
    const auto r = run({"reproduce", "tree", "--depth", "6", "--out", hist.path});
    CHECK(r.code == cli::kOk);
    CHECK(slurp(hist.path).find("5,") != std::string::npos);
  }

  TEST_CASE("every example passes") {
    TempFile hist("test_cli_hist2.csv");
    for (const char* name : {"bridge", "binomial", "network-path", "gff"}) {
      CHECK(run({"reproduce", name, "--out", hist.path}).code == cli::kOk);
    }
  }

  TEST_CASE("unknown example and help") {
    CHECK(run({"reproduce", "nope"}).code == cli::kInputError);
    CHECK(run({"--help"}).code == cli::kOk);
  }
}
