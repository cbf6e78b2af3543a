#include "plab/annihilator.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "plab/errors.hpp"
#include "plab/fourier.hpp"

namespace plab {

namespace {

constexpr double pi = std::numbers::pi;

HolomorphicSampler strip_sampler(const HFunction& H) {
  auto h = std::make_shared<const HFunction>(H);
  HolomorphicSampler F([h](cplx z) { return h->eval(phi_map(StripPoint::closed(z))); }, Domain::Strip, true);
  F.with_derivative(1, [h](cplx z) {
    DiskPoint w = phi_map(StripPoint::closed(z));
    return h->d1(w) * (pi / 4.0) * w.one_minus_sq();
  });
  F.with_derivative(2, [h](cplx z) {
    DiskPoint w = phi_map(StripPoint::closed(z));
    cplx d1 = (pi / 4.0) * w.one_minus_sq();
    cplx d2 = -(pi * pi / 8.0) * w.value() * w.one_minus_sq();
    return h->d2(w) * d1 * d1 + h->d1(w) * d2;
  });
  return F;
}

double kernel_window_tail(const Kernel& k, double room) {
  // |k| ~ c/t^2 beyond the window, so int_room^inf |k| ~ |k(room)| room
  if (room <= 1.0) return std::numeric_limits<double>::infinity();
  return std::abs(k.time_eval(room)) * room;
}

double tail_sum_bound(const DiscreteSet& s) {
  if (!s.law()) return 0.0;
  auto b = exp_tail_bound(*s.law(), s.offset() + s.size());
  // 1 - |Phi(lambda)| = 2/(e^{pi|lambda|/2} + 1) <= 2 e^{-pi|lambda|/2}
  return b ? 2.0 * *b : std::numeric_limits<double>::infinity();
}

Witness pick_witness(const HolomorphicSampler& F, const std::vector<double>& pts, double half_width) {
  std::vector<double> cand{0.5, -0.5, 0.25, 1.5, 0.125, 2.5, 0.7};
  for (double mu : cand) {
    if (std::abs(mu) >= half_width) continue;
    bool hit = std::any_of(pts.begin(), pts.end(), [mu](double l) { return std::abs(l - mu) < 1e-6; });
    if (hit) continue;
    double v = std::abs(F(mu));
    if (v > 0.0) return {mu, v};
  }
  throw NumericalBudgetError("no nontriviality witness found: F vanishes at every candidate point");
}

}  // namespace

Recovery recover_g(const HolomorphicSampler& F, const Kernel& k, const CertificateOptions& opts) {
  auto f = SampledFunction::sample_real([&](double t) { return F(t).real(); }, opts.half_width, opts.step);
  const double sup = f.max_abs();
  if (sup == 0.0) throw PreconditionError("F vanishes on the real axis; nothing to recover");

  auto ft = numeric_ft(f, {0.0, opts.fft_size});
  const auto& sp = ft.spectrum;
  const double dxi = sp.step();
  double noise = 0.0;
  for (std::size_t j = 0; j < sp.size(); ++j)
    if (std::abs(sp.point(j)) >= 0.75 * ft.nyquist) noise = std::max(noise, std::abs(sp[j]));
  noise = std::max(noise, 1e-300);

  double band = -1.0;
  for (std::size_t j = 0; j < sp.size(); ++j)
    if (std::abs(sp[j]) >= opts.snr * noise) band = std::max(band, std::abs(sp.point(j)));
  if (band < 0.0) throw NumericalBudgetError("spectrum of F never clears the noise floor");

  double cut = 0.0;
  for (std::size_t j = 0; j < sp.size(); ++j)
    if (std::abs(sp.point(j)) > band) cut += std::abs(sp[j]);
  cut *= dxi;
  if (cut > opts.band_tolerance * sup)
    throw NumericalBudgetError("band truncation budget " + std::to_string(cut) + " exceeds tolerance");

  const auto Kb = static_cast<std::size_t>(std::llround(band / dxi));
  std::vector<cplx> gh(2 * Kb + 1);
  const std::size_t mid = sp.half_count();
  for (std::size_t i = 0; i < gh.size(); ++i) {
    std::size_t j = mid - Kb + i;
    double xi = sp.point(j);
    gh[i] = sp[j] / k.ft_eval(std::abs(xi));
  }
  SampledFunction ghat(dxi, Kb, std::move(gh));
  auto g = inverse_ft(ghat, opts.half_width, opts.step);

  std::vector<cplx> re(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) re[i] = g[i].real();
  SampledFunction gr(g.step(), g.half_count(), std::move(re));
  const double gsup = gr.max_abs();
  return {std::move(gr), band, noise, cut, gsup, g.max_imag()};
}

AnnihilatorCertificate build_certificate(const DiscreteSet& s, const Kernel& k, const CertificateOptions& opts) {
  CriterionReport crit = classify(s);
  if (crit.verdict == Verdict::Divergent)
    throw PreconditionError(
        "set classified Divergent: sum exp(-pi|lambda|/2) = inf, so the translates span and no annihilator exists");
  if (crit.verdict != Verdict::Convergent && !opts.override_verdict)
    throw PreconditionError("set classified " + to_string(crit.verdict) +
                            "; a certificate needs a Convergent set (or an explicit override)");
  if (!k.is_generator())
    throw PreconditionError("kernel " + k.name() + " is not a generator (its transform is not positive)");
  if (opts.n < 0) throw PreconditionError("n must be >= 0");

  const auto pts = s.points();
  auto b = BlaschkeProduct::from_strip_points(pts);
  HFunction H = build_H(b, opts.n);
  HolomorphicSampler F = strip_sampler(H);
  HolomorphicSampler F2 = F.derivative_sampler(2);

  std::vector<std::pair<double, double>> analytic;
  analytic.reserve(pts.size());
  for (double l : pts) analytic.emplace_back(l, std::abs(F(l)));

  Witness wit = pick_witness(F, pts, opts.half_width);
  Recovery rec = recover_g(F, k, opts);

  double sup = 0.0;
  for (std::size_t i = 0; i < rec.g.size(); ++i) sup = std::max(sup, std::abs(F(rec.g.point(i)).real()));

  AnnihilatorCertificate c{s,   k,   opts, crit.verdict, b, tail_sum_bound(s), H, F, F2, sup, rec, analytic, {}, wit,
                           {},  {}};
  for (double l : opts.probes) c.quadrature_residuals.push_back(quadrature_pairing(c, c.recovery.g, l));

  if (opts.compute_norms) {
    c.norm_F = eq_strip_norm(F, opts.q, opts.norm_grid);
    c.norm_F2 = eq_strip_norm(F2, opts.q, opts.norm_grid);
  } else {
    c.norm_F = c.norm_F2 = StripNorm{opts.q, false, std::numeric_limits<double>::quiet_NaN(),
                                     std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0};
  }
  return c;
}

double residual_analytic(const AnnihilatorCertificate& c, double lambda) {
  require_finite(lambda, "lambda");
  return std::abs(c.F(lambda));
}

PairingRow quadrature_pairing(const AnnihilatorCertificate& c, const SampledFunction& g, double lambda) {
  require_finite(lambda, "lambda");
  const double h = g.step();
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double w = (i == 0 || i + 1 == g.size()) ? 0.5 : 1.0;
    s += w * g[i].real() * c.kernel.time_eval(g.point(i) - lambda);
  }
  s *= h;
  const double T = g.half_width();
  PairingRow r{};
  r.lambda = lambda;
  r.pairing = s;
  r.F = c.F(lambda).real();
  r.abs_error = std::abs(s - r.F);
  r.rel_error = r.abs_error / std::max(std::abs(r.F), c.sup_F_real);
  // g beyond the window is taken to be no larger than on its outer quarter
  double outer = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (std::abs(g.point(i)) >= 0.75 * T) outer = std::max(outer, std::abs(g[i]));
  r.budget = c.recovery.truncation_budget +
             outer * (kernel_window_tail(c.kernel, T - lambda) + kernel_window_tail(c.kernel, T + lambda));
  return r;
}

VerificationReport verify_certificate(const AnnihilatorCertificate& c, const std::vector<double>& probes,
                                      const CertificateThresholds& th) {
  return verify_certificate(c, c.recovery.g, probes, th);
}

VerificationReport verify_certificate(const AnnihilatorCertificate& c, const SampledFunction& g,
                                      const std::vector<double>& probes, const CertificateThresholds& th) {
  VerificationReport r;
  auto fail = [&](const std::string& what) {
    r.valid = false;
    r.failures.push_back(what);
  };

  for (const auto& row : c.analytic_residuals)
    r.max_analytic_residual = std::max(r.max_analytic_residual, residual_analytic(c, row.first));
  if (!(r.max_analytic_residual <= th.analytic)) fail("analytic residual");

  for (double l : probes) {
    auto row = quadrature_pairing(c, g, l);
    r.max_pairing_error = std::max(r.max_pairing_error, row.abs_error);
    r.max_pairing_rel_error = std::max(r.max_pairing_rel_error, row.rel_error);
    r.rows.push_back(row);
  }
  if (!(r.max_pairing_rel_error <= th.pairing_rel)) fail("pairing");

  // the functional itself has to be nonzero: pair g at the witness point
  auto w = quadrature_pairing(c, g, c.witness.mu);
  r.witness = {c.witness.mu, std::abs(w.pairing)};
  if (!(r.witness.value > th.nontrivial) || !(c.witness.value > th.nontrivial)) fail("nontriviality");

  const double edge = std::max(std::abs(c.F(-c.options.half_width)), std::abs(c.F(c.options.half_width)));
  if (edge > 1e-10 * c.sup_F_real) fail("window: F has not decayed at the edge");

  r.norm_F = c.norm_F.norm;
  r.norm_F2 = c.norm_F2.norm;
  if (!c.norm_F.finite) fail("E^q norm of F");
  if (!c.norm_F2.finite) fail("E^q norm of F''");
  return r;
}

}  // namespace plab
