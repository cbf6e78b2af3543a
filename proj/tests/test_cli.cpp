#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "doctest.h"
#include "plab/cli.hpp"
#include "plab/errors.hpp"

using namespace plab;
using namespace plab::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("plab_cli_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

json load(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

std::vector<std::string> lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("parse: documented invocations") {
  auto c = parse_config({"criterion", "--set", "log:c=0.6366", "--n-max", "10000", "--out", "json"});
  CHECK(c.command == Command::Criterion);
  CHECK(c.set_spec == "log:c=0.6366");
  CHECK(c.n_max == 10000);
  CHECK(c.out == OutFormat::Json);

  auto d = parse_config({"certificate", "--set", "arith:a=1,b=0", "--kernel", "phipp", "--q", "inf", "--n", "1"});
  CHECK(d.command == Command::Certificate);
  CHECK(d.kernel == "phipp");
  CHECK(std::isinf(d.q));
  CHECK(d.n == 1);
  CHECK(d.n_max == 41);
  CHECK(d.h == 1.0 / 64);

  auto a = parse_config({"approx", "--set", "log:c=2/pi", "--h", "1/32", "--T", "200", "--ladder", "16,256"});
  CHECK(a.kernel == "poisson");
  CHECK(a.h == 1.0 / 32);
  CHECK(a.ladder == std::vector<std::size_t>{16, 256});
}

TEST_CASE("parse: errors carry positions and reasons") {
  try {
    parse_config({"criterion", "--set", "log:c="});
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.column() == 7);
  }
  CHECK_THROWS_AS(parse_config({"criterion", "--set", "log:c=1", "--kernel", "psi"}), ConfigError);
  CHECK_THROWS_AS(parse_config({"nonsense"}), ConfigError);
  CHECK_THROWS_AS(parse_config({"approx", "--set", "log:c=1", "--T", "1", "--h", "0.3"}), ConfigError);
  CHECK_THROWS_AS(parse_config({"approx", "--set", "log:c=1", "--p", "3"}), ConfigError);
  CHECK_THROWS_AS(parse_config({"approx", "--set", "log:c=1", "--ladder", "8,-1"}), ConfigError);
  CHECK_THROWS_AS(parse_config({"certificate", "--set", "arith:a=1", "--q", "0.5"}), ConfigError);
  CHECK_THROWS_AS(parse_config({"certificate", "--set", "arith:a=1", "--kernel", "lorentz"}), ParseError);
  CHECK_THROWS_AS(parse_config({"verify"}), ConfigError);
}

TEST_CASE("config round trip through the canonical rendering") {
  std::vector<RunConfig> cs{
      parse_config({"criterion", "--set", "poly:c=1,k=2", "--out", "csv"}),
      parse_config({"certificate", "--set", "list:0,1.5,-2", "--kernel", "quasi:sin,a=2,b=1", "--q", "2", "--n", "2"}),
      parse_config({"approx", "--set", "log:c=2/pi,d=1", "--p", "1", "--h", "1/48", "--T", "30", "--target",
                    "indicator", "--ladder", "1,2,3"}),
      parse_config({"report", "--input", "/tmp/somewhere"})};
  for (const auto& c : cs) {
    CAPTURE(to_string(c.command));
    json j = render_config(c);
    CHECK(config_from_json(j) == c);
    CHECK(config_from_json(json::parse(j.dump())) == c);
  }
}

TEST_CASE("strict config keys") {
  json j = render_config(parse_config({"criterion", "--set", "arith:a=1"}));
  j["tolerence"] = 1e-3;
  CHECK_THROWS_WITH_AS(config_from_json(j), doctest::Contains("tolerence"), ConfigError);
  json k = render_config(parse_config({"criterion", "--set", "arith:a=1"}));
  k["n_max"] = "many";
  CHECK_THROWS_AS(config_from_json(k), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::array()), ConfigError);
}

TEST_CASE("config file with explicit flag overrides") {
  TempDir dir("config");
  json cfg{{"set", "arith:a=1,b=0"}, {"n_max", 500}, {"out", "csv"}};
  std::ofstream(dir.path / "run.json") << cfg.dump();
  auto c = parse_config({"criterion", "--config", (dir.path / "run.json").string(), "--out", "json"});
  CHECK(c.set_spec == "arith:a=1,b=0");
  CHECK(c.n_max == 500);
  CHECK(c.out == OutFormat::Json);

  json bad{{"command", "approx"}, {"set", "arith:a=1"}};
  std::ofstream(dir.path / "bad.json") << bad.dump();
  CHECK_THROWS_AS(parse_config({"criterion", "--config", (dir.path / "bad.json").string()}), ConfigError);
}

TEST_CASE("criterion run: Convergent verdict, config and version embedded") {
  TempDir dir("criterion");
  auto r = run({"criterion", "--set", "arith:a=1,b=0", "--output-dir", dir.str()});
  REQUIRE(r.status == kExitOk);
  REQUIRE(r.written.size() == 1);
  CHECK(r.written[0].filename().string().find("criterion_") == 0);
  json j = load(r.written[0]);
  CHECK(j["verdict"] == "Convergent");
  CHECK(j["tool_version"] == kVersion);
  CHECK(j["schema"] == "plab.criterion/1");
  CHECK(config_from_json(j["config"]) == parse_config({"criterion", "--set", "arith:a=1,b=0", "--output-dir", dir.str()}));
  // no temp files left behind
  for (const auto& e : fs::directory_iterator(dir.path)) CHECK(e.path().string().find(".tmp.") == std::string::npos);
}

TEST_CASE("exit statuses and the error report") {
  TempDir dir("errors");
  auto r = run({"certificate", "--set", "log:c=2/pi", "--output-dir", dir.str()});
  CHECK(r.status == kExitPrecondition);
  CHECK(r.message.find("Divergent") != std::string::npos);
  json e = load(dir.path / "error.json");
  CHECK(e["category"] == "precondition");
  CHECK(e["status"] == kExitPrecondition);
  CHECK(e["config"]["set"] == "log:c=2/pi");

  auto p = run({"criterion", "--set", "log:c=", "--output-dir", dir.str()});
  CHECK(p.status == kExitParse);
  CHECK(load(dir.path / "error.json")["category"] == "parse");

  auto m = run({"report", "--input", (dir.path / "missing").string(), "--output-dir", dir.str()});
  CHECK(m.status == kExitPrecondition);

  ::setenv("PLAB_WORKERS", "zero", 1);
  auto w = run({"approx", "--set", "arith:a=1", "--T", "10", "--h", "1/8", "--ladder", "2", "--output-dir", dir.str()});
  ::unsetenv("PLAB_WORKERS");
  CHECK(w.status == kExitParse);

  auto h = run({"--help"});
  CHECK(h.status == kExitOk);
  CHECK(h.message.find("certificate") != std::string::npos);
}

TEST_CASE("approx ladder: CSV with a monotone error column, then a report") {
  TempDir dir("approx");
  ::setenv("PLAB_WORKERS", "2", 1);
  auto r = run({"approx", "--set", "log:c=2/pi", "--T", "40", "--h", "1/16", "--ladder", "4,8,16,32", "--out", "csv",
                "--output-dir", dir.str()});
  ::unsetenv("PLAB_WORKERS");
  REQUIRE(r.status == kExitOk);
  auto ls = lines(r.written.at(0));
  REQUIRE(ls.size() == 3 + 4);
  CHECK(ls[0].rfind("# plab.approx/1", 0) == 0);
  CHECK(ls[1].find("\"set\":\"log:c=2/pi\"") != std::string::npos);
  CHECK(ls[2] == "N,error,gap,lower_bound,lower_bound_budget,coefficient_norm");
  double prev = 1e300;
  for (std::size_t i = 3; i < ls.size(); ++i) {
    std::stringstream ss(ls[i]);
    std::string n, err;
    std::getline(ss, n, ',');
    std::getline(ss, err, ',');
    double e = std::stod(err);
    CHECK(e <= prev);
    prev = e;
  }

  auto z = run({"approx", "--set", "arith:a=1,b=0", "--T", "40", "--h", "1/16", "--ladder", "3,5", "--output-dir",
                dir.str()});
  REQUIRE(z.status == kExitOk);
  json j = load(z.written.at(0));
  for (const auto& e : j["ladder"]) CHECK_FALSE(e["lower_bound"].is_null());

  auto rep = run({"report", "--input", dir.str()});
  REQUIRE(rep.status == kExitOk);
  CHECK(fs::exists(dir.path / "summary.txt"));
  bool curve = false;
  for (const auto& p : rep.written) curve = curve || p.string().find(".curve.dat") != std::string::npos;
  CHECK(curve);
}

TEST_CASE("certificate artifact: verify, tamper, report") {
  TempDir dir("cert");
  auto r = run({"certificate", "--set", "list:-1,1", "--T", "16", "--output-dir", dir.str()});
  REQUIRE(r.status == kExitOk);
  const auto file = r.written.at(0);
  json j = load(file);
  CHECK(j["schema"] == "plab.certificate/1");
  CHECK(j["g"]["values"].size() == 2 * 16 * 64 + 1);
  CHECK(j["verification"]["valid"] == true);

  auto v = run({"verify", "--input", file.string(), "--output-dir", dir.str()});
  CHECK(v.status == kExitOk);

  for (auto& x : j["g"]["values"]) x = x.get<double>() * 1.01;
  std::ofstream(dir.path / "tampered.json") << j.dump();
  fs::create_directories(dir.path / "t");
  auto t = run({"verify", "--input", (dir.path / "tampered.json").string(), "--output-dir", (dir.path / "t").string()});
  CHECK(t.status == kExitBudget);
  CHECK(t.message.find("pairing") != std::string::npos);
  fs::remove(dir.path / "tampered.json");

  std::ofstream(dir.path / "broken.json") << "{ not json";
  auto b = run({"report", "--input", dir.str()});
  CHECK(b.status == kExitParse);
  fs::remove(dir.path / "broken.json");
  auto ok = run({"report", "--input", dir.str()});
  CHECK(ok.status == kExitOk);
}
