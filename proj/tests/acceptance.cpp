// One PASS/FAIL line per acceptance criterion. Tolerances are fixed here, not read from anywhere.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <unistd.h>

#include "plab/annihilator.hpp"
#include "plab/blaschke.hpp"
#include "plab/cli.hpp"
#include "plab/conformal.hpp"
#include "plab/criterion.hpp"
#include "plab/errors.hpp"
#include "plab/fourier.hpp"
#include "plab/kernels.hpp"
#include "plab/spanning.hpp"
#include "plab/strip_norms.hpp"
#include "probes.hpp"

using namespace plab;
using std::numbers::pi;
using C = std::complex<double>;

namespace {

// 1
constexpr double kFtT = 1000.0, kFtStep = 1.0 / 64, kFtBand = 4.0;
constexpr double kFtPoissonSlack = 1e-6, kFtOtherTol = 1e-3;
// 2
constexpr double kRoundTripTol = 1e-12, kPhiConstTol = 1e-10;
// 3
constexpr double kZeroTol = 1e-12, kModulusTol = 1e-12, kCauchyRel = 1e-8;
constexpr std::size_t kCircleSamples = 4096;
// 4
constexpr double kAnalyticTol = 1e-12, kPairingRel = 1e-3;
constexpr double kFHalfPinned = 0.04735554827334636, kFHalfRel = 1e-12;
// 5
constexpr double kLog16Pinned = 1.833668417734248e-4, kLog256Pinned = 1.7221847569005733e-4, kLadderRel = 1e-6;
constexpr double kPlateauRatio = 0.9, kMonotoneSlack = 1e-12;
// 6
constexpr double kTransferRel = 1e-4;
constexpr int kTransferTrials = 50;
// 7
constexpr double kReconstructionRel = 1e-3;
// 8
constexpr double kBoundaryRel = 1e-6;

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string sci(double x) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3e", x);
  return b;
}

double halton(int i, int base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * (i % base);
    i /= base;
  }
  return r;
}

double ft_error(const std::function<double(double)>& k, const std::function<double(double)>& exact) {
  auto f = SampledFunction::sample_real(k, kFtT, kFtStep);
  auto ft = numeric_ft(f, {.max_frequency = kFtBand});
  double worst = 0.0;
  for (std::size_t j = 0; j < ft.spectrum.size(); ++j) {
    double xi = ft.spectrum.point(j);
    if (std::abs(xi) <= kFtBand) worst = std::max(worst, std::abs(ft.spectrum[j] - exact(xi)));
  }
  return worst;
}

Outcome criterion1() {
  Outcome o;
  double ep = ft_error(eval_poisson, [](double xi) { return std::exp(-2 * pi * std::abs(xi)); });
  double es = ft_error(eval_psi, [](double xi) { return (1 + 4 * pi * pi * xi * xi) * std::exp(-2 * pi * std::abs(xi)); });
  double eq = ft_error([](double t) { return eval_phi_pp(t); },
                       [](double xi) { return std::exp(-2 * pi * std::abs(xi)) / (pi * (1 + xi * xi)); });
  const double tolP = 2.0 / (pi * kFtT) + kFtPoissonSlack;
  o.require(ep <= tolP, "P error " + sci(ep) + " > " + sci(tolP));
  o.require(es <= kFtOtherTol, "psi error " + sci(es));
  o.require(eq <= kFtOtherTol, "phi_pp error " + sci(eq));
  o.note("P " + sci(ep) + " (tol " + sci(tolP) + "), psi " + sci(es) + ", phi_pp " + sci(eq));
  return o;
}

Outcome criterion2() {
  Outcome o;
  double worst = 0.0;
  for (int i = 1; i <= 10000; ++i) {
    C z(20.0 * halton(i, 2) - 10.0, 1.98 * halton(i, 3) - 0.99);
    worst = std::max(worst, std::abs(phi_inverse(phi_map(StripPoint::interior(z))).value() - z));
  }
  o.require(worst <= kRoundTripTol, "round trip " + sci(worst));
  C at_i = phi_map(StripPoint::closed(C(0, 1))).value();
  // exp form of the map, evaluated directly
  const double e = std::exp(pi / 2);
  const double phi1 = (e - 1) / (e + 1);
  double v1 = phi_map(StripPoint::interior(1.0)).value().real();
  o.require(std::abs(at_i - C(0, 1)) <= kPhiConstTol, "Phi(i) = " + sci(at_i.real()) + " + " + sci(at_i.imag()) + "i");
  o.require(std::abs(v1 - phi1) <= kPhiConstTol && std::abs(v1 - 0.65579) < 1e-5, "Phi(1) = " + sci(v1));
  o.note("round trip " + sci(worst) + ", Phi(1) = " + std::to_string(v1));
  return o;
}

Outcome criterion3() {
  Outcome o;
  std::vector<double> lam;
  for (int k = -20; k <= 20; ++k) lam.push_back(k);
  auto b = BlaschkeProduct::from_strip_points(lam);

  double zmax = 0.0;
  for (const auto& z : b.zeros()) zmax = std::max(zmax, std::abs(eval_beta(b, z.point())));
  zmax = std::max(zmax, std::abs(eval_beta(b, 0.0)));
  o.require(zmax <= kZeroTol, "|beta| at zeros " + sci(zmax));

  double mod = 0.0;
  for (std::size_t j = 0; j < kCircleSamples; ++j)
    mod = std::max(mod, std::abs(std::abs(eval_beta(b, DiskPoint::on_circle(2 * pi * (j + 0.5) / kCircleSamples))) - 1));
  o.require(mod <= kModulusTol, "circle modulus " + sci(mod));

  auto r = verify_bounds(b, kCircleSamples);
  std::size_t first = 0, second = 0;
  for (const auto& v : r.literal) (v.bound.find("beta''") != std::string::npos ? second : first)++;
  o.require(first == 0, "first-derivative bound 2K/|1-z^2|^2 fails at " + std::to_string(first) +
                            " samples (worst ratio " + std::to_string(r.worst_first_ratio) + ")");
  o.require(second == 0, "second-derivative bound fails at " + std::to_string(second) + " samples");
  o.note("second-bound worst ratio " + std::to_string(r.worst_second_ratio) + ", corrected chain bounds " +
         (r.chain.empty() ? "hold" : "FAIL"));

  HolomorphicSampler f([&](C w) { return eval_beta(b, w); }, Domain::Disk);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    C w = std::polar(0.95 * std::sqrt(U(rng)), 2 * pi * U(rng));
    C a1 = eval_beta_prime(b, w), a2 = eval_beta_second(b, w);
    worst = std::max(worst, std::abs(a1 - f.cauchy_derivative(w, 1).value) / std::abs(a1));
    worst = std::max(worst, std::abs(a2 - f.cauchy_derivative(w, 2).value) / std::abs(a2));
  }
  o.require(worst <= kCauchyRel, "Cauchy mismatch " + sci(worst));
  o.note("Cauchy rel " + sci(worst));
  return o;
}

Outcome criterion4() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  auto s = DiscreteSet::parse("arith:a=1,b=0", 41);
  CertificateOptions opts;
  opts.q = std::numeric_limits<double>::infinity();
  opts.n = 1;
  opts.probes = {0.0, 1.0, -1.0, 0.5, -0.5, 3.0, -3.0};
  auto c = build_certificate(s, Kernel::phi_pp(), opts);
  auto v = verify_certificate(c, opts.probes);

  double an = 0.0;
  for (const auto& [l, r] : c.analytic_residuals) an = std::max(an, r);
  o.require(c.analytic_residuals.size() == 41 && an <= kAnalyticTol, "analytic residual " + sci(an));

  // direct product with tanh, no complements
  const double w = std::tanh(pi / 8);
  double direct = std::pow(1 - w * w, 4);
  for (int k = -20; k <= 20; ++k) {
    double g = std::tanh(pi * k / 4);
    direct *= (w - g) / (1 - g * w);
  }
  const double fh = c.F(0.5).real();
  o.require(std::abs(fh) > 0.0, "F(1/2) = 0");
  o.require(std::abs(fh - kFHalfPinned) <= kFHalfRel * kFHalfPinned, "F(1/2) drifted from the pinned value");
  o.require(std::abs(fh - direct) <= kFHalfRel * std::abs(direct), "F(1/2) vs direct product " + sci(fh - direct));

  o.require(c.norm_F.finite && c.norm_F2.finite, "E^inf norms not finite");
  o.require(v.max_pairing_rel_error <= kPairingRel, "pairing rel " + sci(v.max_pairing_rel_error));
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.require(secs <= 300.0, "runtime " + std::to_string(secs) + " s");
  o.note("max |F(lambda)| " + sci(an) + ", F(1/2) " + std::to_string(fh) + ", ||F|| " + sci(c.norm_F.norm) +
         ", ||F''|| " + sci(c.norm_F2.norm) + ", pairing rel " + sci(v.max_pairing_rel_error) + ", " +
         std::to_string(static_cast<int>(secs * 10) / 10.0).substr(0, 4) + " s");
  return o;
}

bool monotone(const ApproxReport& r) {
  for (std::size_t i = 1; i < r.ladder.size(); ++i)
    if (r.ladder[i].result.error > r.ladder[i - 1].result.error * (1 + kMonotoneSlack)) return false;
  return true;
}

Outcome criterion5() {
  Outcome o;
  auto t = target_preset("poisson-shift", 200.0, 1.0 / 32);
  CurveOptions opts;
  opts.approx.p = 2.0;
  opts.workers = std::max(1u, std::thread::hardware_concurrency());

  auto lg = spanning_curve(t, "poisson-shift", Kernel::poisson(), LogarithmicLaw{2 / pi, 0}, {16, 32, 64, 128, 256}, opts);
  const double e16 = lg.ladder.front().result.error, e256 = lg.ladder.back().result.error;
  o.require(e256 < e16, "log: error(256) >= error(16)");
  o.require(std::abs(e16 - kLog16Pinned) <= kLadderRel * kLog16Pinned, "log: error(16) " + sci(e16) + " off its pin");
  o.require(std::abs(e256 - kLog256Pinned) <= kLadderRel * kLog256Pinned, "log: error(256) " + sci(e256) + " off its pin");
  o.require(monotone(lg), "log ladder not monotone");

  // Z cap [-N, N] is the first 2N + 1 points of the arithmetic enumeration
  auto z = spanning_curve(t, "poisson-shift", Kernel::poisson(), ArithmeticLaw{1, 0}, {17, 33, 65}, opts);
  for (const auto& e : z.ladder) {
    if (!e.lower_bound) {
      o.require(false, "no floor for N = " + std::to_string(e.result.N));
      continue;
    }
    o.require(e.result.error >= *e.lower_bound - *e.lower_bound_budget,
              "floor violated at N = " + std::to_string(e.result.N));
  }
  const double z8 = z.ladder.front().result.error, z32 = z.ladder.back().result.error;
  o.require(z32 >= kPlateauRatio * z8, "no plateau: error(32)/error(8) = " + std::to_string(z32 / z8));
  o.require(monotone(z), "integer ladder not monotone");
  o.note("log e16 " + sci(e16) + " e256 " + sci(e256) + "; Z e8 " + sci(z8) + " e32 " + sci(z32) + " floor " +
         sci(z.ladder.back().lower_bound.value_or(NAN)));
  return o;
}

Outcome criterion6() {
  Outcome o;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const Kernel ks[] = {Kernel::poisson(), Kernel::psi(), Kernel::phi_pp(), Kernel::exp_kernel()};
  double worst = 0.0;
  for (int i = 0; i < kTransferTrials; ++i) {
    double a = 0.5 + std::abs(U(rng)), b = 0.5 + std::abs(U(rng)), ca = 3 * U(rng), cb = 3 * U(rng), l = 4 * U(rng);
    auto f = SampledFunction::sample_real([&](double x) { return std::exp(-a * (x - ca) * (x - ca)); },
                                          16.0, 1.0 / 8);
    auto h = SampledFunction::sample_real([&](double x) { return (x - cb) * std::exp(-b * (x - cb) * (x - cb)); },
                                          16.0, 1.0 / 8);
    auto r = convolution_transfer_check(f, ks[i % 4], h, l);
    worst = std::max(worst, r.relative_gap);
  }
  o.require(worst <= kTransferRel, "worst relative gap " + sci(worst));
  o.note(std::to_string(kTransferTrials) + " instances, worst relative gap " + sci(worst));
  return o;
}

Outcome criterion7() {
  Outcome o;
  auto k = kernel_from_spec("quasi:sin,a=2,b=1");
  auto r = factorization_check(k);
  o.require(r.norms_finite && std::isfinite(r.h_l2) && std::isfinite(r.xh_l2), "L2 norms of h, x h not finite");
  o.require(r.reconstruction_rel_l1 <= kReconstructionRel, "reconstruction " + sci(r.reconstruction_rel_l1));
  // m(0) = 2 and psi^(0) = 1
  o.require(std::abs(r.hhat0 - 2.0) <= 4 * std::numeric_limits<double>::epsilon(), "h^(0) = " + sci(r.hhat0));
  o.note("||h|| " + sci(r.h_l2) + ", ||x h|| " + sci(r.xh_l2) + ", reconstruction " + sci(r.reconstruction_rel_l1) +
         ", dual " + sci(r.dual_rel_l1));
  return o;
}

Outcome criterion8() {
  Outcome o;
  double worst_mv = 0.0, worst_holder = 0.0, worst_b = 0.0;
  for (const auto& p : probe_family()) {
    auto G = p.sampler(Domain::Plane);
    auto S = p.sampler(Domain::Strip);
    for (double q : {1.0, 2.0}) {
      for (C a : {C(0, 0), C(0.3, 0.1)})
        for (double R : {0.1, 0.5, 1.0}) {
          auto m = mean_value_second_derivative_check(G, a, R, q);
          worst_mv = std::max(worst_mv, m.lhs / (pinned_mean_value_constant(q) * m.rhs));
          worst_holder = std::max(worst_holder, m.lhs / (mean_value_constant_bound(q) * m.rhs));
        }
      auto b = bergman_norms(S, q);
      worst_b = std::max(worst_b, b.strip_weighted_second_deriv / (pinned_bergman_constant(q) * b.strip_plain));
    }
  }
  o.require(worst_mv <= 1.0, "mean-value ratio " + std::to_string(worst_mv));
  o.require(worst_holder <= 1.0, "mean-value vs Hoelder constant " + std::to_string(worst_holder));
  o.require(worst_b <= 1.0, "Bergman ratio " + std::to_string(worst_b));

  // on Im z = 1, |1 - Phi^2| = 2 / cosh(pi s / 2)
  HolomorphicSampler h1([](C w) { return 1.0 - w * w; }, Domain::Disk, true);
  HolomorphicSampler h2([](C w) { return (1.0 - w * w) * (1.0 - w * w); }, Domain::Disk, true);
  const std::pair<const HolomorphicSampler*, std::pair<double, double>> cases[] = {{&h1, {1.0, 4.0}},
                                                                                   {&h2, {2.0, 128.0 / (3 * pi)}}};
  double worst_cov = 0.0;
  for (const auto& [H, qv] : cases) {
    auto s = boundary_change_of_variables_check(*H, qv.first);
    worst_cov = std::max({worst_cov, std::abs(s.line_side - qv.second) / qv.second,
                          std::abs(s.circle_side - qv.second) / qv.second});
  }
  o.require(worst_cov <= kBoundaryRel, "boundary identity " + sci(worst_cov));
  o.note("mean-value worst/pin " + std::to_string(worst_mv) + ", Bergman worst/pin " + std::to_string(worst_b) +
         ", boundary rel " + sci(worst_cov));
  return o;
}

Outcome criterion9() {
  Outcome o;
  for (const char* spec : {"log:c=2/pi", "log:c=0.5", "log:c=0.3,d=2", "log:c=0.6366"}) {
    auto s = DiscreteSet::parse(spec, 64);
    bool refused = false;
    try {
      build_certificate(s, Kernel::phi_pp());
    } catch (const PreconditionError&) {
      refused = true;
    }
    o.require(refused, std::string("certificate built for ") + spec);
  }
  auto dir = std::filesystem::temp_directory_path() / ("plab_acceptance_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  auto r = cli::run({"certificate", "--set", "log:c=2/pi", "--output-dir", dir.string()});
  o.require(r.status == cli::kExitPrecondition, "CLI exit status " + std::to_string(r.status));
  std::filesystem::remove_all(dir);

  // random corpus: Convergent must come with a tail bound that dominates the brute-force tail
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int convergent = 0, checked = 0;
  for (int i = 0; i < 300; ++i) {
    GrowthLaw law;
    switch (i % 4) {
      case 0: law = ArithmeticLaw{0.05 + 3 * U(rng), 4 * U(rng) - 2}; break;
      case 1: law = LogarithmicLaw{0.2 + 1.8 * U(rng), std::floor(5 * U(rng)) - 2}; break;
      case 2: law = PolynomialLaw{0.01 + 2 * U(rng), 0.3 + 2.7 * U(rng)}; break;
      default: law = ListLaw{{10 * U(rng) - 5, 10 * U(rng) - 5, 10 * U(rng) - 5}}; break;
    }
    const std::size_t N = 200;
    auto s = DiscreteSet::from_law(law, N);
    auto c = classify(s);
    ++checked;
    if (c.verdict != Verdict::Convergent) continue;
    ++convergent;
    if (!c.tail_bound || c.certificate.empty()) {
      o.require(false, "Convergent without a tail certificate: " + to_spec(law));
      continue;
    }
    double brute = 0.0;
    const std::size_t cap = std::min<std::size_t>(law_size(law), N + 200000);
    for (std::size_t j = N; j < cap; ++j) brute += std::exp(-pi * std::abs(law_point(law, j)) / 2);
    o.require(brute <= *c.tail_bound * (1 + 1e-12), "tail bound below brute force for " + to_spec(law));
  }
  std::vector<double> tbl{0.0, 1.0, 2.0};
  o.require(classify(DiscreteSet::from_points(tbl)).verdict != Verdict::Convergent, "bare table classified Convergent");
  o.note(std::to_string(checked) + " random laws, " + std::to_string(convergent) + " Convergent, all with tail bounds");
  return o;
}

}  // namespace

int main() {
  const std::function<Outcome()> cs[] = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                         criterion6, criterion7, criterion8, criterion9};
  int failed = 0;
  for (int i = 0; i < 9; ++i) {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    try {
      o = cs[i]();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("threw: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d: %s  [%.1f s] %s\n", i + 1, o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of 9 criteria pass\n", 9 - failed);
  return failed == 0 ? 0 : 1;
}
