#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hardy/ab_loop.hpp"
#include "hardy/cli.hpp"
#include "hardy/config.hpp"

using namespace hardy;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string config(const std::string& name) { return std::string(HARDY_CONFIG_DIR) + "/" + name; }

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream is(s);
  for (std::string l; std::getline(is, l);) v.push_back(l);
  return v;
}

}  // namespace

TEST_CASE("shipped configurations parse and round-trip") {
  for (const auto& entry : std::filesystem::directory_iterator(HARDY_CONFIG_DIR)) {
    std::ifstream f(entry.path());
    std::stringstream ss;
    ss << f.rdbuf();
    CAPTURE(entry.path().string());
    const RunConfig cfg = parse_config(ss.str());
    CHECK(parse_config(to_text(cfg)) == cfg);
  }
  const RunConfig c = parse_config(
      "generations = [(1.0, 2), (0.5, 3)]  # comment\n"
      "tail = periodic(2)\n"
      "weight = pwl([(0, 1), (2, 3), (6, 0)])\n"
      "flux = sampled([0.1, 0.2, 0.3])\n"
      "alpha = 0.123456789012345678\n"
      "seed = 18446744073709551615\n"
      "out = results.csv\n");
  CHECK(parse_config(to_text(c)) == c);
  CHECK(c.tree().branching(2) == 3);
  CHECK(*c.seed == 18446744073709551615ull);
}

TEST_CASE("configuration errors") {
  CHECK_THROWS_WITH_AS(parse_config("bogus = 1\n"), doctest::Contains("unknown key 'bogus'"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("b = 2\nb = 3\n"), doctest::Contains("line 2"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("generations = [(1, 1)]\n"),
                       doctest::Contains("(b(x) > 1 at every vertex other than the root)"), ConfigError);
  CHECK_THROWS_AS(parse_config("T = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("weight = power(1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("min = 1\nmax = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("b = 1\n"), ConfigError);

  const Run r = run({"tree", "info", "--generations", "[(1, 1)]"});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("b(x) > 1") != std::string::npos);
  CHECK(run({"tree", "info", "-c", "/nonexistent.cfg"}).code == kExitUsage);
  CHECK(run({"loop", "nonsense"}).code == kExitUsage);
  CHECK(run({"tree", "info", "-c", config("loop.cfg")}).code == kExitUsage);
  CHECK(run({"--help"}).code == kExitPass);
}

TEST_CASE("loop lambda-star") {
  const Run r = run({"loop", "lambda-star", "--alpha", "0.5"});
  CHECK(r.code == kExitPass);
  CHECK(r.out == "0.1735\n");
  const Run full = run({"loop", "lambda-star", "--alpha", "0.5", "--digits", "12"});
  CHECK(std::stod(full.out) == doctest::Approx(lambda_star(0.5)).epsilon(1e-11));
}

TEST_CASE("loop figure1 is a deterministic symmetric CSV") {
  const Run a = run({"loop", "figure1"});
  const Run b = run({"loop", "figure1"});
  CHECK(a.code == kExitPass);
  CHECK(a.out == b.out);
  const auto rows = lines(a.out);
  REQUIRE(rows.size() == 302);
  CHECK(rows[0] == "alpha,lambda_star");
  std::vector<std::pair<double, double>> v;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto comma = rows[i].find(',');
    v.emplace_back(std::stod(rows[i].substr(0, comma)), std::stod(rows[i].substr(comma + 1)));
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    CHECK(v[i].first == -v[v.size() - 1 - i].first);
    CHECK(v[i].second == v[v.size() - 1 - i].second);
    if (v[i].first == std::round(v[i].first)) CHECK(v[i].second == 0.0);
  }
  CHECK(v[150].first == 0.0);
  CHECK(v[0].first == -1.5);
}

TEST_CASE("tree verbs") {
  const Run m = run({"tree", "muckenhoupt", "-c", config("binary_tree.cfg")});
  CHECK(m.code == kExitPass);
  CHECK(m.out.find("0.535898") != std::string::npos);
  const Run ray = run({"tree", "muckenhoupt", "-c", config("ray.cfg")});
  CHECK(ray.code == kExitFail);
  CHECK(ray.out.find("DIVERGENT") != std::string::npos);
  CHECK(run({"tree", "info", "-c", config("periodic_tree.cfg")}).code == kExitPass);
}

TEST_CASE("homogeneous tree verbs") {
  const Run l = run({"homog", "lambda-b", "--b", "2"});
  CHECK(l.code == kExitPass);
  CHECK(std::stod(l.out) == doctest::Approx(0.11548912502732907).epsilon(1e-15));
  const Run g = run({"homog", "groundstate", "--b", "2", "--horizon", "3", "--samples", "4"});
  CHECK(g.code == kExitPass);
  const auto rows = lines(g.out);
  CHECK(rows[0] == "t,omega,sqrt_g0_omega_over_1pt");
  CHECK(rows.size() == 1 + 3 * 4 + 1);
}

TEST_CASE("verify verbs and exit codes") {
  const Run h = run({"verify", "hardy", "-c", config("binary_tree.cfg"), "--T", "20"});
  CHECK(h.code == kExitPass);
  CHECK(h.out.find("PASS") != std::string::npos);
  CHECK(h.out.find("parameter,value,status") != std::string::npos);
  CHECK(run({"verify", "hardy", "-c", config("ray.cfg"), "--T", "40"}).code == kExitPass);
  CHECK(run({"verify", "decomposition", "--depth", "2"}).code == kExitPass);
  CHECK(run({"verify", "homo", "--T", "20"}).code == kExitPass);
  // α = 0.3 at T = 40 sits well above λ*; a tight margin must fail, not error
  CHECK(run({"verify", "loop", "--alpha", "0.3", "--T", "40", "--h", "0.02", "--margin", "1e-6"}).code ==
        kExitFail);
  CHECK(run({"verify", "gauge", "-c", config("loop.cfg"), "--T", "20", "--h", "0.02"}).code == kExitPass);
}

TEST_CASE("CSV goes to the configured file") {
  const auto path = std::filesystem::temp_directory_path() / "hardy_test_figure.csv";
  std::filesystem::remove(path);
  const Run r = run({"loop", "figure1", "--min", "0", "--max", "0.5", "--step", "0.1", "--out", path.string()});
  CHECK(r.code == kExitPass);
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(lines(ss.str()).size() == 7);
  std::filesystem::remove(path);
}
