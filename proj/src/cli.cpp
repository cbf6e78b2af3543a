#include "plab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <sstream>
#include <thread>
#include <unistd.h>

#include "CLI11.hpp"
#include "plab/annihilator.hpp"
#include "plab/criterion.hpp"
#include "plab/errors.hpp"
#include "plab/format.hpp"
#include "plab/fourier.hpp"
#include "plab/kernels.hpp"
#include "plab/spanning.hpp"

namespace plab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

const std::vector<double> kProbes{0.0, 1.0, -1.0, 0.5, -0.5, 3.0, -3.0};

struct HelpRequested {
  std::string text;
};

// JSON has no infinities: non-finite values are written as strings
json num(double x) {
  if (std::isfinite(x)) return x;
  return fmt_double(x);
}

json opt_num(const std::optional<double>& x) { return x ? num(*x) : json(nullptr); }

double read_num(const json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_number(j.get<std::string>(), what);
  throw ConfigError(what + ": expected a number");
}

Command command_from(const std::string& s) {
  static const std::map<std::string, Command> m{{"criterion", Command::Criterion},
                                                {"certificate", Command::Certificate},
                                                {"approx", Command::Approx},
                                                {"verify", Command::Verify},
                                                {"report", Command::Report}};
  auto it = m.find(s);
  if (it == m.end()) throw ConfigError("unknown command '" + s + "'");
  return it->second;
}

OutFormat format_from(const std::string& s) {
  if (s == "json") return OutFormat::Json;
  if (s == "csv") return OutFormat::Csv;
  throw ConfigError("--out must be json or csv, got '" + s + "'");
}

RunConfig defaults_for(Command c) {
  RunConfig r;
  r.command = c;
  if (c == Command::Certificate) r.n_max = 41;
  if (c == Command::Approx) {
    r.kernel = "poisson";
    r.T = 40.0;
  }
  return r;
}

std::vector<std::size_t> parse_ladder(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string item;
  std::size_t col = 1;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (item.empty() || used != item.size() || item[0] == '-')
      throw ConfigError("--ladder: bad entry '" + item + "' at column " + std::to_string(col));
    out.push_back(static_cast<std::size_t>(v));
    col += item.size() + 1;
  }
  if (out.empty()) throw ConfigError("--ladder: empty");
  return out;
}

void validate(RunConfig& c) {
  const bool needs_set = c.command == Command::Criterion || c.command == Command::Certificate ||
                         c.command == Command::Approx;
  if (needs_set) {
    if (c.set_spec.empty()) throw ConfigError("--set is required for " + to_string(c.command));
    parse_growth_law(c.set_spec);  // ParseError carries the column
  }
  if ((c.command == Command::Verify || c.command == Command::Report) && c.input.empty())
    throw ConfigError("--input is required for " + to_string(c.command));
  if (c.command == Command::Certificate || c.command == Command::Approx) kernel_from_spec(c.kernel);
  if (!(c.T > 0.0) || !std::isfinite(c.T) || !(c.h > 0.0) || !std::isfinite(c.h))
    throw ConfigError("grid: T and h must be positive and finite");
  try {
    grid_half_count(c.T, c.h);
  } catch (const PreconditionError&) {
    throw ConfigError("grid: T = " + fmt_double(c.T) + " is not an integer multiple of h = " + fmt_double(c.h));
  }
  if (c.p != 1.0 && c.p != 2.0) throw ConfigError("p must be 1 or 2");
  if (!(c.q >= 1.0)) throw ConfigError("q must lie in [1, inf]");
  if (c.n < 0) throw ConfigError("n must be >= 0");
  if (c.n_max < 1) throw ConfigError("n-max must be >= 1");
  if (c.ladder.empty()) throw ConfigError("ladder must not be empty");
  const auto presets = target_presets();
  if (std::find(presets.begin(), presets.end(), c.target) == presets.end())
    throw ConfigError("unknown target '" + c.target + "'");
}

// a flag value from the command line or the same key in a config file
void apply(RunConfig& c, const std::string& key, const std::string& v) {
  if (key == "set") c.set_spec = v;
  else if (key == "n-max") c.n_max = parse_ladder(v).at(0);
  else if (key == "kernel") c.kernel = v;
  else if (key == "q") c.q = parse_number(v, "--q");
  else if (key == "p") c.p = parse_number(v, "--p");
  else if (key == "n") {
    double x = parse_number(v, "--n");
    if (x != std::floor(x) || std::abs(x) > 1e6) throw ConfigError("--n must be an integer");
    c.n = static_cast<int>(x);
  } else if (key == "T") c.T = parse_number(v, "--T");
  else if (key == "h") c.h = parse_number(v, "--h");
  else if (key == "ladder") c.ladder = parse_ladder(v);
  else if (key == "target") c.target = v;
  else if (key == "out") c.out = format_from(v);
  else if (key == "output-dir") c.output_dir = v;
  else if (key == "input") c.input = v;
  else throw ConfigError("unknown option '" + key + "'");
}

json read_json_file(const fs::path& p, const std::string& what) {
  std::ifstream in(p);
  if (!in) throw PreconditionError(what + " not found: " + p.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("corrupt " + what + " " + p.string() + ": " + e.what());
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json envelope(const std::string& schema, const RunConfig& c) {
  return json{{"schema", schema}, {"tool_version", kVersion}, {"config", render_config(c)}};
}

std::string csv_preamble(const std::string& schema, const RunConfig& c) {
  return "# " + schema + " plab " + kVersion + "\n# config " + render_config(c).dump() + "\n";
}

std::string stem(const std::string& command, const RunConfig& c) {
  return command + "_" + fnv1a_hex(c.set_spec);
}

fs::path out_path(const RunConfig& c, const std::string& name) { return fs::path(c.output_dir) / name; }

// ---- criterion ----

RunResult run_criterion(const RunConfig& c) {
  auto s = DiscreteSet::parse(c.set_spec, c.n_max);
  auto r = classify(s);
  RunResult res{kExitOk, {}, "verdict " + to_string(r.verdict)};
  const auto base = stem("criterion", c);
  if (c.out == OutFormat::Json) {
    json j = envelope("plab.criterion/1", c);
    j["set"] = s.spec();
    j["points"] = s.size();
    j["verdict"] = to_string(r.verdict);
    j["blaschke_sum"] = num(r.blaschke_sum);
    j["origin_excluded"] = r.origin_excluded;
    j["comparability_ratio"] =
        r.comparability_ratio ? json{num(r.comparability_ratio->lo), num(r.comparability_ratio->hi)} : json(nullptr);
    j["certificate"] = r.certificate;
    j["tail_bound"] = opt_num(r.tail_bound);
    j["limit"] = opt_num(r.limit);
    json ps = json::array();
    for (auto [N, S] : r.partial_sums) ps.push_back({N, num(S)});
    j["partial_sums"] = ps;
    auto p = out_path(c, base + ".json");
    write_atomic(p, dump(j));
    res.written.push_back(p);
  } else {
    std::string out = csv_preamble("plab.criterion/1", c);
    out += "# verdict " + to_string(r.verdict) + "\nN,partial_sum\n";
    for (auto [N, S] : r.partial_sums) out += std::to_string(N) + "," + fmt_double(S) + "\n";
    auto p = out_path(c, base + ".csv");
    write_atomic(p, out);
    res.written.push_back(p);
  }
  return res;
}

// ---- certificate ----

CertificateOptions certificate_options(const RunConfig& c) {
  CertificateOptions o;
  o.q = c.q;
  o.n = c.n;
  o.half_width = c.T;
  o.step = c.h;
  o.fft_size = next_pow2(std::max<std::size_t>(std::size_t{1} << 16, 4 * (2 * grid_half_count(c.T, c.h) + 1)));
  o.probes = kProbes;
  return o;
}

json norm_json(const StripNorm& n) {
  return {{"q", num(n.q)}, {"finite", n.finite}, {"norm", num(n.norm)}, {"worst_line", num(n.worst_line)},
          {"tail_budget", num(n.tail_budget)}};
}

json rows_json(const std::vector<PairingRow>& rows) {
  json a = json::array();
  for (const auto& r : rows)
    a.push_back({{"lambda", r.lambda}, {"pairing", num(r.pairing)}, {"F", num(r.F)}, {"abs_error", num(r.abs_error)},
                 {"rel_error", num(r.rel_error)}, {"budget", num(r.budget)}});
  return a;
}

json verification_json(const VerificationReport& v) {
  return {{"valid", v.valid},
          {"failures", v.failures},
          {"max_analytic_residual", num(v.max_analytic_residual)},
          {"max_pairing_error", num(v.max_pairing_error)},
          {"max_pairing_rel_error", num(v.max_pairing_rel_error)},
          {"witness", {{"mu", v.witness.mu}, {"pairing", num(v.witness.value)}}},
          {"rows", rows_json(v.rows)}};
}

RunResult run_certificate(const RunConfig& c) {
  auto s = DiscreteSet::parse(c.set_spec, c.n_max);
  auto k = kernel_from_spec(c.kernel);
  auto cert = build_certificate(s, k, certificate_options(c));
  auto v = verify_certificate(cert, kProbes);

  RunResult res{v.valid ? kExitOk : kExitBudget, {}, ""};
  res.message = v.valid ? "certificate valid" : "certificate failed verification:";
  for (const auto& f : v.failures) res.message += " [" + f + "]";

  const auto base = stem("certificate", c);
  if (c.out == OutFormat::Json) {
    json j = envelope("plab.certificate/1", c);
    j["set"] = s.spec();
    j["points"] = s.points();
    j["kernel"] = k.name();
    j["n"] = c.n;
    j["q"] = num(c.q);
    j["verdict"] = to_string(cert.verdict);
    json an = json::array();
    for (auto [l, r] : cert.analytic_residuals) an.push_back({{"lambda", l}, {"abs_F", num(r)}});
    j["analytic_residuals"] = an;
    j["quadrature_residuals"] = rows_json(cert.quadrature_residuals);
    j["witness"] = {{"mu", cert.witness.mu}, {"abs_F", num(cert.witness.value)}};
    j["norms"] = {{"F", norm_json(cert.norm_F)}, {"F2", norm_json(cert.norm_F2)}};
    j["band"] = {{"Xi", cert.recovery.band},
                 {"noise_floor", num(cert.recovery.noise_floor)},
                 {"truncation_budget", num(cert.recovery.truncation_budget)}};
    j["blaschke"] = {{"zeros", cert.blaschke.size()},
                     {"K", num(cert.blaschke.K())},
                     {"dropped_tail_bound", num(cert.blaschke_tail)}};
    std::vector<double> g = cert.recovery.g.real_part();
    j["g"] = {{"T", c.T}, {"h", c.h}, {"values", g}};
    j["verification"] = verification_json(v);
    auto p = out_path(c, base + ".json");
    write_atomic(p, dump(j));
    res.written.push_back(p);
  } else {
    std::string out = csv_preamble("plab.certificate/1", c);
    out += "kind,lambda,abs_F,pairing,F,rel_error,budget\n";
    for (auto [l, r] : cert.analytic_residuals) out += "analytic," + fmt_double(l) + "," + fmt_double(r) + ",,,,\n";
    for (const auto& r : v.rows)
      out += "pairing," + fmt_double(r.lambda) + ",," + fmt_double(r.pairing) + "," + fmt_double(r.F) + "," +
             fmt_double(r.rel_error) + "," + fmt_double(r.budget) + "\n";
    auto p = out_path(c, base + ".csv");
    write_atomic(p, out);
    res.written.push_back(p);
  }
  return res;
}

// ---- approx ----

RunResult run_approx(const RunConfig& c) {
  auto k = kernel_from_spec(c.kernel);
  auto law = parse_growth_law(c.set_spec);
  auto target = target_preset(c.target, c.T, c.h);
  CurveOptions o;
  o.approx.p = c.p;
  o.workers = worker_count();
  auto rep = spanning_curve(target, c.target, k, law, c.ladder, o);

  RunResult res{kExitOk, {}, ""};
  std::ostringstream msg;
  msg << "error(" << rep.ladder.front().result.N << ") = " << fmt_double(rep.ladder.front().result.error) << ", error("
      << rep.ladder.back().result.N << ") = " << fmt_double(rep.ladder.back().result.error);
  res.message = msg.str();

  const std::string base = "approx_p" + std::to_string(static_cast<int>(c.p)) + "_" + fnv1a_hex(c.set_spec);
  if (c.out == OutFormat::Json) {
    json j = envelope("plab.approx/1", c);
    j["p"] = rep.p;
    j["target"] = rep.target;
    j["set"] = rep.set_spec;
    j["kernel"] = rep.kernel;
    j["T"] = rep.half_width;
    j["h"] = rep.step;
    json a = json::array();
    for (const auto& e : rep.ladder)
      a.push_back({{"N", e.result.N},
                   {"error", num(e.result.error)},
                   {"coefficient_norm", num(e.result.coefficient_norm)},
                   {"gap", num(e.result.solver.duality_gap)},
                   {"iterations", e.result.solver.iterations},
                   {"orthogonality", num(e.result.solver.orthogonality)},
                   {"rank_flag", e.result.solver.rank_flag},
                   {"method", e.result.solver.method},
                   {"lower_bound", opt_num(e.lower_bound)},
                   {"lower_bound_budget", opt_num(e.lower_bound_budget)}});
    j["ladder"] = a;
    auto p = out_path(c, base + ".json");
    write_atomic(p, dump(j));
    res.written.push_back(p);
  } else {
    std::string out = csv_preamble("plab.approx/1", c);
    out += "N,error,gap,lower_bound,lower_bound_budget,coefficient_norm\n";
    for (const auto& e : rep.ladder)
      out += std::to_string(e.result.N) + "," + fmt_double(e.result.error) + "," +
             fmt_double(e.result.solver.duality_gap) + "," + (e.lower_bound ? fmt_double(*e.lower_bound) : "") + "," +
             (e.lower_bound_budget ? fmt_double(*e.lower_bound_budget) : "") + "," +
             fmt_double(e.result.coefficient_norm) + "\n";
    auto p = out_path(c, base + ".csv");
    write_atomic(p, out);
    res.written.push_back(p);
  }
  return res;
}

// ---- verify ----

RunResult run_verify(const RunConfig& c) {
  json art = read_json_file(c.input, "certificate");
  if (art.value("schema", "") != "plab.certificate/1")
    throw ConfigError("not a certificate artifact (schema " + art.value("schema", std::string("missing")) + ")");
  RunConfig cc;
  std::vector<double> values;
  double T = 0, h = 0;
  try {
    cc = config_from_json(art.at("config"));
    T = art.at("g").at("T").get<double>();
    h = art.at("g").at("h").get<double>();
    values = art.at("g").at("values").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ConfigError("corrupt certificate " + c.input + ": " + e.what());
  }
  auto s = DiscreteSet::parse(cc.set_spec, cc.n_max);
  auto k = kernel_from_spec(cc.kernel);
  auto cert = build_certificate(s, k, certificate_options(cc));
  const std::size_t K = grid_half_count(T, h);
  if (values.size() != 2 * K + 1) throw ConfigError("corrupt certificate: g has the wrong number of samples");
  std::vector<cplx> gv(values.begin(), values.end());
  SampledFunction g(h, K, std::move(gv));
  if (!g.same_grid(cert.recovery.g)) throw PreconditionError("stored g does not live on the certificate grid");
  auto v = verify_certificate(cert, g, kProbes);

  RunResult res{v.valid ? kExitOk : kExitBudget, {}, v.valid ? "stored certificate verified" : "verification failed:"};
  for (const auto& f : v.failures) res.message += " [" + f + "]";
  json j = envelope("plab.verify/1", c);
  j["certificate_config"] = render_config(cc);
  j["verification"] = verification_json(v);
  auto p = out_path(c, "verify_" + fnv1a_hex(cc.set_spec) + ".json");
  write_atomic(p, dump(j));
  res.written.push_back(p);
  return res;
}

// ---- report ----

std::string dat_row(std::initializer_list<double> xs) {
  std::string s;
  bool first = true;
  for (double x : xs) {
    s += (first ? "" : " ") + fmt_double(x);
    first = false;
  }
  return s + "\n";
}

double jnum(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_number(j.get<std::string>(), "artifact value");
  return std::numeric_limits<double>::quiet_NaN();
}

RunResult run_report(const RunConfig& c) {
  const fs::path dir(c.input);
  if (!fs::is_directory(dir)) throw PreconditionError("artifact directory not found: " + c.input);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());

  RunResult res{kExitOk, {}, ""};
  std::string summary = std::string("plab ") + kVersion + " report for " + dir.string() + "\n\n";
  std::string index;
  std::size_t count = 0;
  auto emit = [&](const std::string& name, const std::string& content) {
    auto p = out_path(c, name);
    write_atomic(p, content);
    res.written.push_back(p);
    index += "  " + name + "\n";
  };

  for (const auto& f : files) {
    json j = read_json_file(f, "artifact");
    const std::string schema = j.is_object() ? j.value("schema", "") : "";
    const std::string st = f.stem().string();
    try {
      if (schema == "plab.criterion/1") {
        summary += "criterion    " + j.at("set").get<std::string>() + ": " + j.at("verdict").get<std::string>() +
                   " (" + j.at("certificate").get<std::string>() + ")\n";
        std::string d = "# N partial_sum\n";
        for (const auto& r : j.at("partial_sums")) d += dat_row({jnum(r[0]), jnum(r[1])});
        emit(st + ".partial_sums.dat", d);
      } else if (schema == "plab.certificate/1") {
        const auto& v = j.at("verification");
        summary += "certificate  " + j.at("set").get<std::string>() + ", kernel " + j.at("kernel").get<std::string>() +
                   ": " + (v.at("valid").get<bool>() ? "valid" : "INVALID") +
                   ", max |F(lambda)| = " + fmt_double(jnum(v.at("max_analytic_residual"))) +
                   ", max pairing rel. error = " + fmt_double(jnum(v.at("max_pairing_rel_error"))) + "\n";
        std::string a = "# lambda abs_F\n";
        for (const auto& r : j.at("analytic_residuals")) a += dat_row({jnum(r.at("lambda")), jnum(r.at("abs_F"))});
        emit(st + ".analytic.dat", a);
        std::string q = "# lambda pairing F rel_error budget\n";
        for (const auto& r : v.at("rows"))
          q += dat_row({jnum(r.at("lambda")), jnum(r.at("pairing")), jnum(r.at("F")), jnum(r.at("rel_error")),
                        jnum(r.at("budget"))});
        emit(st + ".residuals.dat", q);
      } else if (schema == "plab.approx/1") {
        const auto& L = j.at("ladder");
        summary += "approx       " + j.at("set").get<std::string>() + ", p = " + fmt_double(jnum(j.at("p"))) +
                   ", target " + j.at("target").get<std::string>() + ": error " +
                   fmt_double(jnum(L.front().at("error"))) + " -> " + fmt_double(jnum(L.back().at("error"))) + " over N = " +
                   fmt_double(jnum(L.front().at("N"))) + ".." + fmt_double(jnum(L.back().at("N"))) + "\n";
        std::string d = "# N error\n", fl = "# N lower_bound budget\n";
        bool any_floor = false;
        for (const auto& r : L) {
          d += dat_row({jnum(r.at("N")), jnum(r.at("error"))});
          if (!r.at("lower_bound").is_null()) {
            any_floor = true;
            fl += dat_row({jnum(r.at("N")), jnum(r.at("lower_bound")), jnum(r.at("lower_bound_budget"))});
          }
        }
        emit(st + ".curve.dat", d);
        if (any_floor) emit(st + ".floor.dat", fl);
      } else if (schema == "plab.verify/1") {
        const auto& v = j.at("verification");
        summary += "verify       " + j.at("certificate_config").at("set").get<std::string>() + ": " +
                   (v.at("valid").get<bool>() ? "valid" : "INVALID") + "\n";
      } else if (schema == "plab.error/1") {
        summary += "error        status " + std::to_string(j.at("status").get<int>()) + ": " +
                   j.at("message").get<std::string>() + "\n";
      } else {
        continue;
      }
    } catch (const json::exception& e) {
      throw ConfigError("corrupt artifact " + f.string() + ": " + e.what());
    }
    ++count;
  }
  if (count == 0) throw PreconditionError("no plab artifacts in " + dir.string());
  summary += "\ndata files:\n" + index;
  emit("summary.txt", summary);
  res.message = std::to_string(count) + " artifacts summarized";
  return res;
}

std::string flag_value(const std::vector<std::string>& args, const std::string& flag) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == flag && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind(flag + "=", 0) == 0) return args[i].substr(flag.size() + 1);
  }
  return "";
}

}  // namespace

std::string to_string(Command c) {
  switch (c) {
    case Command::Criterion: return "criterion";
    case Command::Certificate: return "certificate";
    case Command::Approx: return "approx";
    case Command::Verify: return "verify";
    case Command::Report: return "report";
  }
  return "?";
}

std::string to_string(OutFormat f) { return f == OutFormat::Json ? "json" : "csv"; }

double parse_number(const std::string& s, const std::string& what) {
  if (s == "inf" || s == "+inf" || s == "infinity") return inf;
  if (s == "-inf") return -inf;
  auto atom = [&](const std::string& a) {
    if (a == "pi") return std::numbers::pi;
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(a, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (a.empty() || used != a.size() || !std::isfinite(v)) throw ConfigError(what + ": bad number '" + s + "'");
    return v;
  };
  std::string body = s;
  double sign = 1.0;
  if (!body.empty() && body[0] == '-') {
    sign = -1.0;
    body = body.substr(1);
  }
  auto op = body.find_first_of("*/");
  if (op == std::string::npos) return sign * atom(body);
  double a = atom(body.substr(0, op)), b = atom(body.substr(op + 1));
  if (body[op] == '*') return sign * a * b;
  if (b == 0.0) throw ConfigError(what + ": division by zero in '" + s + "'");
  return sign * a / b;
}

unsigned worker_count() {
  if (const char* e = std::getenv("PLAB_WORKERS")) {
    std::string v(e);
    std::size_t used = 0;
    unsigned long w = 0;
    try {
      w = std::stoul(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (v.empty() || used != v.size() || w < 1 || w > 1024) throw ConfigError("PLAB_WORKERS must be an integer in [1, 1024]");
    return static_cast<unsigned>(w);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

json render_config(const RunConfig& c) {
  return json{{"command", to_string(c.command)},
              {"set", c.set_spec},
              {"n_max", c.n_max},
              {"kernel", c.kernel},
              {"T", c.T},
              {"h", c.h},
              {"q", num(c.q)},
              {"p", c.p},
              {"n", c.n},
              {"ladder", c.ladder},
              {"target", c.target},
              {"out", to_string(c.out)},
              {"output_dir", c.output_dir},
              {"input", c.input}};
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (!j.contains("command")) throw ConfigError("config: missing key 'command'");
  RunConfig c;
  try {
    c = defaults_for(command_from(j.at("command").get<std::string>()));
    for (const auto& [key, v] : j.items()) {
      if (key == "command") continue;
      else if (key == "set") c.set_spec = v.get<std::string>();
      else if (key == "n_max") c.n_max = v.get<std::size_t>();
      else if (key == "kernel") c.kernel = v.get<std::string>();
      else if (key == "T") c.T = read_num(v, "T");
      else if (key == "h") c.h = read_num(v, "h");
      else if (key == "q") c.q = read_num(v, "q");
      else if (key == "p") c.p = read_num(v, "p");
      else if (key == "n") c.n = v.get<int>();
      else if (key == "ladder") c.ladder = v.get<std::vector<std::size_t>>();
      else if (key == "target") c.target = v.get<std::string>();
      else if (key == "out") c.out = format_from(v.get<std::string>());
      else if (key == "output_dir") c.output_dir = v.get<std::string>();
      else if (key == "input") c.input = v.get<std::string>();
      else throw ConfigError("config: unknown key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

RunConfig parse_config(const std::vector<std::string>& args) {
  CLI::App app{"plab: spanning of Poisson-type translates, certificates and approximation experiments"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print help");
  app.set_version_flag("--version", kVersion);

  // raw flag text, converted after parsing so that explicit flags can override a config file
  std::map<std::string, std::string> raw;
  std::map<std::string, CLI::Option*> given;
  std::map<std::string, std::string> cfg;
  std::map<std::string, CLI::App*> subs;

  auto add = [&](CLI::App* sub, const std::string& key, const std::string& help) {
    given[sub->get_name() + "/" + key] = sub->add_option("--" + key, raw[sub->get_name() + "/" + key], help);
  };
  const std::vector<std::pair<std::string, std::vector<std::string>>> layout{
      {"criterion", {"set", "n-max", "out", "output-dir"}},
      {"certificate", {"set", "n-max", "kernel", "q", "n", "T", "h", "out", "output-dir"}},
      {"approx", {"set", "kernel", "p", "T", "h", "ladder", "target", "out", "output-dir"}},
      {"verify", {"input", "output-dir"}},
      {"report", {"input", "output-dir"}}};
  const std::map<std::string, std::string> help{
      {"set", "set spec: list:..., arith:a=,b=, log:c=,d=, poly:c=,k="},
      {"n-max", "number of points taken from the law"},
      {"kernel", "poisson | poisson-dd | psi | exp | phipp | quasi:<family>,..."},
      {"q", "E^q exponent, 1..inf"},
      {"p", "approximation norm, 1 or 2"},
      {"n", "weight exponent in H = (1 - w^2)^(4n) beta"},
      {"T", "window half-width"},
      {"h", "grid step, e.g. 1/64"},
      {"ladder", "comma-separated N values"},
      {"target", "poisson-shift | indicator | gaussian"},
      {"out", "json | csv"},
      {"output-dir", "directory for artifacts"},
      {"input", "certificate file (verify) or artifact directory (report)"}};
  const std::map<std::string, std::string> descr{
      {"criterion", "classify a set by its exp-sum"},
      {"certificate", "build and check an annihilator for a Convergent set"},
      {"approx", "best-approximation ladder"},
      {"verify", "re-check a stored certificate"},
      {"report", "text summary and data files for a directory of artifacts"}};
  for (const auto& [name, keys] : layout) {
    CLI::App* sub = app.add_subcommand(name, descr.at(name));
    subs[name] = sub;
    for (const auto& k : keys) add(sub, k, help.at(k));
    sub->add_option("--config", cfg[name], "JSON config file (strict keys); explicit flags win");
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested{app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help()};
  } catch (const CLI::CallForVersion&) {
    throw HelpRequested{std::string(kVersion) + "\n"};
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }

  const std::string name = app.get_subcommands().front()->get_name();
  const Command cmd = command_from(name);
  RunConfig c = defaults_for(cmd);
  if (!cfg[name].empty()) {
    json j = read_json_file(cfg[name], "config file");
    if (j.is_object() && !j.contains("command")) j["command"] = name;
    c = config_from_json(j);
    if (c.command != cmd) throw ConfigError("config file is for '" + to_string(c.command) + "', not '" + name + "'");
  }
  for (const auto& [key, opt] : given) {
    if (opt->count() == 0 || key.rfind(name + "/", 0) != 0) continue;
    apply(c, key.substr(name.size() + 1), raw[key]);
  }
  if (cmd == Command::Report && !given[name + "/output-dir"]->count() && (cfg[name].empty() || c.output_dir == "."))
    c.output_dir = c.input;
  validate(c);
  return c;
}

void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

RunResult dispatch(const RunConfig& c) {
  switch (c.command) {
    case Command::Criterion: return run_criterion(c);
    case Command::Certificate: return run_certificate(c);
    case Command::Approx: return run_approx(c);
    case Command::Verify: return run_verify(c);
    case Command::Report: return run_report(c);
  }
  throw std::logic_error("unreachable command");
}

RunResult run(const std::vector<std::string>& args) {
  std::optional<RunConfig> cfg;
  RunResult res{kExitOk, {}, ""};
  std::string category;
  try {
    cfg = parse_config(args);
    res = dispatch(*cfg);
    if (res.status == kExitOk) return res;
    category = "numerical-budget";
  } catch (const HelpRequested& h) {
    return {kExitOk, {}, h.text};
  } catch (const ParseError& e) {
    res = {kExitParse, {}, e.what()};
    category = "parse";
  } catch (const ConfigError& e) {
    res = {kExitParse, {}, e.what()};
    category = "parse";
  } catch (const PreconditionError& e) {
    res = {kExitPrecondition, {}, e.what()};
    category = "precondition";
  } catch (const UnsupportedError& e) {
    res = {kExitPrecondition, {}, e.what()};
    category = "precondition";
  } catch (const NumericalBudgetError& e) {
    res = {kExitBudget, {}, e.what()};
    category = "numerical-budget";
  } catch (const std::exception& e) {
    res = {kExitInternal, {}, e.what()};
    category = "internal";
  }

  json j{{"schema", "plab.error/1"},
         {"tool_version", kVersion},
         {"status", res.status},
         {"category", category},
         {"message", res.message},
         {"args", args},
         {"config", cfg ? render_config(*cfg) : json(nullptr)}};
  std::string dir = cfg ? cfg->output_dir : flag_value(args, "--output-dir");
  if (dir.empty()) dir = ".";
  try {
    auto p = fs::path(dir) / "error.json";
    write_atomic(p, dump(j));
    res.written.push_back(p);
  } catch (const std::exception&) {
    // the report is best effort; the exit status still carries the failure
  }
  return res;
}

}  // namespace plab::cli
