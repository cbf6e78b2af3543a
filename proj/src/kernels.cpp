#include "plab/kernels.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace plab {

namespace {

constexpr double pi = std::numbers::pi;
using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

double envelope_weight(double xi, int n) {
  return n == 0 ? 1.0 : 1.0 + std::pow(std::abs(xi), 2.0 * n);
}

}  // namespace

double eval_poisson(double t) {
  require_finite(t, "eval_poisson");
  return 1.0 / (pi * (1.0 + t * t));
}

double eval_poisson_dd(double t) {
  require_finite(t, "eval_poisson_dd");
  double u = 1.0 + t * t;
  return (2.0 / pi) * (3.0 * t * t - 1.0) / (u * u * u);
}

double eval_psi(double t) { return eval_poisson(t) - eval_poisson_dd(t); }

double eval_exp_kernel(double t) {
  require_finite(t, "eval_exp_kernel");
  return std::exp(-2.0 * pi * std::abs(t));
}

double phi_pp_tail_bound() { return std::exp(-2.0 * pi * kPhiPPCutoff) / (pi * pi); }

QuadratureValue eval_phi_pp_checked(double t, double tol) {
  require_finite(t, "eval_phi_pp");
  // fold the even weight onto s >= 0: int_0^S e^{-2 pi s} (P(t-s) + P(t+s)) ds
  const double a = std::abs(t);
  auto f = [a](double s) {
    return std::exp(-2.0 * pi * s) * (1.0 / (1.0 + (a - s) * (a - s)) + 1.0 / (1.0 + (a + s) * (a + s)));
  };
  double err1 = 0.0, err2 = 0.0, v = 0.0;
  const double S = kPhiPPCutoff;
  if (a > 1e-3 && a < S) {
    v += GK::integrate(f, 0.0, a, 15, tol, &err1);
    v += GK::integrate(f, a, S, 15, tol, &err2);
  } else {
    v += GK::integrate(f, 0.0, S, 15, tol, &err1);
  }
  v /= pi;
  double gk = (err1 + err2) / pi;
  double err = gk + phi_pp_tail_bound();
  if (gk > tol * std::abs(v))
    throw NumericalBudgetError("eval_phi_pp: quadrature estimate " + std::to_string(err) +
                               " exceeds tolerance at t = " + std::to_string(t));
  return {v, err};
}

double eval_phi_pp(double t, double tol) { return eval_phi_pp_checked(t, tol).value; }

std::string to_string(KernelKind k) {
  switch (k) {
    case KernelKind::Poisson: return "Poisson";
    case KernelKind::PoissonSecondDiff: return "PoissonSecondDiff";
    case KernelKind::Psi: return "Psi";
    case KernelKind::ExpKernel: return "ExpKernel";
    case KernelKind::PhiPP: return "PhiPP";
    case KernelKind::QuasiPoisson: return "QuasiPoisson";
  }
  return "?";
}

double analytic_ft(const Kernel& k, double xi) {
  require_finite(xi, "analytic_ft");
  const double e = std::exp(-2.0 * pi * std::abs(xi));
  switch (k.kind()) {
    case KernelKind::Poisson: return e;
    case KernelKind::PoissonSecondDiff: return -4.0 * pi * pi * xi * xi * e;
    case KernelKind::Psi: return (1.0 + 4.0 * pi * pi * xi * xi) * e;
    case KernelKind::ExpKernel: return 1.0 / (pi * (1.0 + xi * xi));
    case KernelKind::PhiPP: return e / (pi * (1.0 + xi * xi));
    case KernelKind::QuasiPoisson:
      throw UnsupportedError("analytic_ft: " + k.name() + " has no closed form; use ft_eval");
  }
  throw UnsupportedError("analytic_ft: unknown kind");
}

Kernel Kernel::poisson() {
  Kernel k(KernelKind::Poisson, "poisson", eval_poisson, nullptr);
  k.ft_ = [k](double xi) { return analytic_ft(k, xi); };
  return k;
}
Kernel Kernel::poisson_dd() {
  Kernel k(KernelKind::PoissonSecondDiff, "poisson-dd", eval_poisson_dd, nullptr);
  k.ft_ = [k](double xi) { return analytic_ft(k, xi); };
  return k;
}
Kernel Kernel::psi() {
  Kernel k(KernelKind::Psi, "psi", eval_psi, nullptr);
  k.ft_ = [k](double xi) { return analytic_ft(k, xi); };
  return k;
}
Kernel Kernel::exp_kernel() {
  Kernel k(KernelKind::ExpKernel, "exp", eval_exp_kernel, nullptr);
  k.ft_ = [k](double xi) { return analytic_ft(k, xi); };
  return k;
}
Kernel Kernel::phi_pp() {
  Kernel k(KernelKind::PhiPP, "phipp", [](double t) { return eval_phi_pp(t); }, nullptr);
  k.ft_ = [k](double xi) { return analytic_ft(k, xi); };
  return k;
}

Kernel make_quasi_poisson(MultiplierSpec spec, const QuasiPoissonOptions& opts) {
  if (!spec.m || !spec.m_deriv) throw PreconditionError("multiplier and its derivative required");
  if (spec.n < 0) throw PreconditionError("envelope order n must be >= 0");
  if (opts.samples < 8 || !(opts.xi_max > 0.0)) throw PreconditionError("bad sampling grid");
  const int n = spec.n;
  const std::size_t S = opts.samples;
  const double dx = opts.xi_max / static_cast<double>(S - 1);

  std::vector<double> lower(S), upper(S), deriv(S);
  for (std::size_t i = 0; i < S; ++i) {
    double xi = dx * static_cast<double>(i);
    double m = spec.m(xi), w = envelope_weight(xi, n);
    if (!std::isfinite(m)) throw HypothesisViolation("multiplier not finite", xi);
    if (!(m > 0.0)) throw HypothesisViolation("multiplier touches zero", xi);
    lower[i] = m * w;
    upper[i] = m / w;
    deriv[i] = std::abs(spec.m_deriv(xi) - 2.0 * pi * m) / w;
  }

  // m_deriv against central differences at a handful of points
  for (int j = 1; j <= 16; ++j) {
    double xi = opts.xi_max * j / 17.0, d = 1e-5 * std::max(1.0, xi);
    double fd = (spec.m(xi + d) - spec.m(xi - d)) / (2.0 * d);
    double an = spec.m_deriv(xi);
    if (std::abs(fd - an) > 1e-5 * (1.0 + std::abs(an)))
      throw HypothesisViolation("m_deriv inconsistent with m", xi);
  }

  // boundedness within the envelope: compare the tail half of the grid with the head half
  auto head_tail = [&](const std::vector<double>& v, bool want_max) {
    auto mid = v.begin() + static_cast<long>(S / 2);
    if (want_max)
      return std::pair{*std::max_element(v.begin(), mid), std::max_element(mid, v.end())};
    return std::pair{*std::min_element(v.begin(), mid), std::min_element(mid, v.end())};
  };
  auto xi_at = [&](std::vector<double>::const_iterator it, const std::vector<double>& v) {
    return dx * static_cast<double>(it - v.begin());
  };
  {
    auto [h, t] = head_tail(upper, true);
    if (*t > opts.growth_ratio * h) throw HypothesisViolation("upper envelope unbounded", xi_at(t, upper));
  }
  {
    auto [h, t] = head_tail(lower, false);
    if (*t * opts.growth_ratio < h) throw HypothesisViolation("lower envelope decays", xi_at(t, lower));
  }
  {
    auto [h, t] = head_tail(deriv, true);
    if (*t > opts.growth_ratio * std::max(h, 1e-300))
      throw HypothesisViolation("derivative envelope violated", xi_at(t, deriv));
  }

  EnvelopeCertificate cert{*std::min_element(lower.begin(), lower.end()),
                           *std::max_element(upper.begin(), upper.end()),
                           *std::max_element(deriv.begin(), deriv.end()), opts.xi_max, S};

  auto m = spec.m;
  auto ft = [m](double xi) { return m(std::abs(xi)) * std::exp(-2.0 * pi * std::abs(xi)); };
  // phi(t) = 2 int_0^inf m(xi) e^{-2 pi xi} cos(2 pi xi t) dxi.
  // |t| <= 1: adaptive GK on [0, X], the cut leaves < B w(X) e^{-2 pi X}/pi.
  // 1 < |t| <= 1e4: Ooura's double-exponential Fourier rule.
  // beyond: leading asymptotic term -2 g'(0)/(2 pi t)^2, relative error O(t^-2).
  const double X = 8.0 + n;
  auto ooura = std::make_shared<boost::math::quadrature::ooura_fourier_cos<double>>();
  const double g1 = spec.m_deriv(0.0) - 2.0 * pi * spec.m(0.0);
  auto time = [m, X, ooura, g1](double t) {
    t = std::abs(t);
    auto g = [&](double xi) { return m(xi) * std::exp(-2.0 * pi * xi); };
    if (t <= 1.0) {
      auto f = [&](double xi) { return g(xi) * std::cos(2.0 * pi * xi * t); };
      double err = 0.0;
      return 2.0 * GK::integrate(f, 0.0, X, 20, 1e-13, &err);
    }
    if (t <= 1e4) return 2.0 * ooura->integrate(g, 2.0 * pi * t).first;
    double w = 2.0 * pi * t;
    return -2.0 * g1 / (w * w);
  };
  std::ostringstream name;
  name << "quasi:" << spec.label;
  Kernel k(KernelKind::QuasiPoisson, name.str(), time, ft);
  k.n_ = n;
  k.envelope_ = cert;
  return k;
}

namespace {

std::map<std::string, double> parse_params(const std::string& s, std::size_t offset) {
  std::map<std::string, double> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    std::string item = s.substr(pos, comma - pos);
    std::size_t eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size())
      throw ParseError("kernel parameter must be key=value", offset + pos + 1);
    try {
      std::size_t used = 0;
      double v = std::stod(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument("trailing");
      out[item.substr(0, eq)] = v;
    } catch (const std::exception&) {
      throw ParseError("bad number in kernel parameter", offset + pos + eq + 2);
    }
    pos = comma + 1;
  }
  return out;
}

}  // namespace

Kernel kernel_from_spec(const std::string& spec) {
  if (spec == "poisson") return Kernel::poisson();
  if (spec == "poisson-dd") return Kernel::poisson_dd();
  if (spec == "psi") return Kernel::psi();
  if (spec == "exp") return Kernel::exp_kernel();
  if (spec == "phipp") return Kernel::phi_pp();
  if (spec.rfind("quasi:", 0) == 0) {
    std::string rest = spec.substr(6);
    std::size_t comma = rest.find(',');
    std::string family = rest.substr(0, comma);
    auto params = comma == std::string::npos ? std::map<std::string, double>{}
                                             : parse_params(rest.substr(comma + 1), 6 + comma + 1);
    auto take = [&](const std::string& key, double def) {
      auto it = params.find(key);
      if (it == params.end()) return def;
      double v = it->second;
      params.erase(it);
      return v;
    };
    MultiplierSpec ms;
    if (family == "one") {
      ms = {"one", [](double) { return 1.0; }, [](double) { return 0.0; }, 0};
    } else if (family == "sin") {
      double a = take("a", 2.0), b = take("b", 1.0);
      ms = {"sin,a=" + std::to_string(a) + ",b=" + std::to_string(b),
            [a, b](double x) { return a + b * std::sin(x); },
            [b](double x) { return b * std::cos(x); }, 0};
    } else if (family == "poly") {
      int n = static_cast<int>(take("n", 1.0));
      ms = {"poly,n=" + std::to_string(n),
            [n](double x) { return 1.0 + std::pow(x, 2.0 * n); },
            [n](double x) { return n == 0 ? 0.0 : 2.0 * n * std::pow(x, 2.0 * n - 1); }, n};
    } else {
      throw ParseError("unknown quasi-Poisson family '" + family + "'", 7);
    }
    if (params.count("n")) ms.n = static_cast<int>(take("n", 0.0));
    ms.label = rest;
    if (!params.empty()) throw ParseError("unknown kernel parameter '" + params.begin()->first + "'", 7);
    return make_quasi_poisson(ms);
  }
  throw ParseError("unknown kernel '" + spec + "'", 1);
}

}  // namespace plab
