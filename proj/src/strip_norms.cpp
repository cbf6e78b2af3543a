#include "plab/strip_norms.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include "plab/errors.hpp"

namespace plab {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double inf = std::numeric_limits<double>::infinity();

// twice the worst ratio observed on the five-function probe family (tests/test_strip_disk.cpp)
// (observed maxima: 1.1076, 1.8033, 1.5331, 1.3449)
constexpr double kPinnedMeanValue1 = 2.22;
constexpr double kPinnedMeanValue2 = 3.61;
constexpr double kPinnedBergman1 = 3.07;
constexpr double kPinnedBergman2 = 2.69;

double powq(double v, double q) { return std::pow(std::abs(v), q); }

// Tail of int_X^inf v(x)^q dx from values at X/2 and X assuming power decay v ~ x^-p.
// Returns inf when p q <= 1 (the integral does not converge).
double power_tail(double v_half, double v_end, double X, double q) {
  if (v_end == 0.0) return 0.0;
  if (v_half <= v_end) return inf;
  double p = std::log2(v_half / v_end);
  if (p * q <= 1.05) return inf;
  return X * std::pow(v_end, q) / (p * q - 1.0);
}

void check_q(double q) {
  if (!(q >= 1.0)) throw PreconditionError("exponent q must lie in [1, inf]");
}

}  // namespace

TransformValue cauchy_type_transform(const SampledFunction& f, const StripPoint& p) {
  if (p.on_boundary()) throw PreconditionError("cauchy_type_transform needs |Im z| < 1");
  const cplx z = p.value();
  const double h = f.step();
  const std::size_t N = f.size();
  cplx s = 0.0;
  double fmax = 0.0;
  for (std::size_t j = 0; j < N; ++j) {
    double w = (j == 0 || j + 1 == N) ? 0.5 : 1.0;
    cplx d = f.point(j) - z;
    s += w * f[j] / (d * d + 1.0);
    fmax = std::max(fmax, std::abs(f[j]));
  }
  TransformValue out{};
  out.value = s * h / pi;
  double edge = std::max(std::abs(f[0]), std::abs(f[N - 1]));
  double room = f.half_width() - std::abs(z.real());
  out.tail_budget = edge * (room > 1.0 ? (2.0 / pi) / room : 1.0);
  double d = 1.0 - std::abs(z.imag());
  double e = std::exp(-2.0 * pi * d / h);
  out.discretization_budget = 2.0 * fmax / d * e / (1.0 - e);
  out.degraded = d < 4.0 * h;
  return out;
}

HolomorphicSampler cauchy_transform_sampler(const SampledFunction& f) {
  bool real = f.max_imag() == 0.0;
  return HolomorphicSampler(
      [f](cplx z) { return cauchy_type_transform(f, StripPoint::interior(z)).value; }, Domain::Strip, real);
}

StripNorm eq_strip_norm(const HolomorphicSampler& F, double q, const StripNormGrid& grid) {
  check_q(q);
  if (!F.symmetric()) throw PreconditionError("E^q(B) norms are defined for symmetric F only");
  const std::size_t Kx = grid_half_count(grid.half_width, grid.x_step);
  const int lines = static_cast<int>(std::lround(1.0 / grid.ladder_step));
  if (lines < 1 || std::abs(lines * grid.ladder_step - 1.0) > 1e-12)
    throw PreconditionError("ladder step must divide 1");
  const double X = grid.half_width;

  StripNorm out{q, true, 0.0, 0.0, 0.0, 0.0};
  for (int j = 0; j < lines; ++j) {  // symmetry: lines y < 0 mirror lines y > 0
    const double y = j * grid.ladder_step;
    double acc = 0.0;
    bool bad = false;
    for (std::size_t i = 0; i <= 2 * Kx; ++i) {
      double x = (static_cast<double>(i) - static_cast<double>(Kx)) * grid.x_step;
      double v = F(cplx(x, y)).real();
      if (!std::isfinite(v)) {
        bad = true;
        break;
      }
      if (std::isinf(q)) {
        acc = std::max(acc, std::abs(v));
      } else {
        double w = (i == 0 || i == 2 * Kx) ? 0.5 : 1.0;
        acc += w * powq(v, q) * grid.x_step;
      }
    }
    double tail = 0.0;
    if (!bad && !std::isinf(q)) {
      for (double sgn : {-1.0, 1.0}) {
        double vh = std::abs(F(cplx(sgn * X / 2, y))), ve = std::abs(F(cplx(sgn * X, y)));
        tail += power_tail(vh, ve, X, q);
      }
    }
    if (bad || std::isinf(tail)) {
      out.finite = false;
      out.value = inf;
      out.norm = inf;
      out.worst_line = y;
      out.tail_budget = inf;
      return out;
    }
    if (acc + tail > out.value) {
      out.value = acc + tail;
      out.worst_line = y;
    }
    out.tail_budget = std::max(out.tail_budget, tail);
  }
  out.norm = std::isinf(q) ? out.value : std::pow(out.value, 1.0 / q);
  return out;
}

namespace {

// int_R f(s) ds for f = |g(Phi(s+i))|^q; +inf when f has not decayed by |s| = 60
double boundary_line_integral(const std::function<double(double)>& f) {
  double scale = 0.0;
  for (double s : {-2.0, -0.5, 0.0, 0.5, 2.0}) scale = std::max(scale, f(s));
  const double floor = 1e-30 * std::max(scale, 1e-300);
  if (f(60.0) > floor || f(-60.0) > floor) return inf;
  boost::math::quadrature::sinh_sinh<double> ss;
  return ss.integrate(f, 1e-12);
}

// int_0^{2pi} f(theta) dtheta, split at pi and at any extra breaks; +inf when
// (theta - b) f(theta) does not vanish at a break b
double circle_integral(const std::function<double(double)>& f, std::vector<double> breaks = {}) {
  breaks.insert(breaks.end(), {0.0, pi, 2.0 * pi});
  std::sort(breaks.begin(), breaks.end());
  double scale = 0.0;
  for (double t : {0.5, 1.5, 2.5, 4.0, 5.5}) scale = std::max(scale, f(t));
  for (double t0 : breaks)
    for (double sgn : {-1.0, 1.0}) {
      double t = t0 + sgn * 1e-9;
      if (t < 0.0 || t > 2.0 * pi) continue;
      if (f(t) * 1e-9 > 1e-8 * std::max(scale, 1e-300)) return inf;
    }
  boost::math::quadrature::tanh_sinh<double> ts;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) total += ts.integrate(f, breaks[i], breaks[i + 1], 1e-12);
  return total;
}

}  // namespace

SidePair boundary_change_of_variables_check(const HolomorphicSampler& H, double q) {
  check_q(q);
  auto on_line = [&](double s) {
    DiskPoint w = phi_map(StripPoint::closed(cplx(s, 1.0)));
    return powq(std::abs(H(w.value())), q);
  };
  auto on_circle = [&](double theta) {
    DiskPoint w = DiskPoint::on_circle(theta);
    double d = std::abs(w.one_minus_sq());
    if (d == 0.0) return 0.0;
    return (2.0 / pi) * powq(std::abs(H(w.value())), q) / d;
  };

  SidePair out{};
  out.line_side = boundary_line_integral(on_line);
  out.circle_side = circle_integral(on_circle);
  out.line_finite = std::isfinite(out.line_side);
  out.circle_finite = std::isfinite(out.circle_side);
  double m = std::max(std::abs(out.line_side), std::abs(out.circle_side));
  out.relative_gap = (m == 0.0 || std::isinf(m)) ? (m == 0.0 ? 0.0 : inf) : std::abs(out.line_side - out.circle_side) / m;
  return out;
}

TransportedIntegrals transported_integrals(const HolomorphicSampler& H, double q) {
  check_q(q);
  if (!H.has_analytic(1) || !H.has_analytic(2))
    throw PreconditionError("boundary integrals need closed-form H' and H''");
  const double c2 = pi * pi / 16.0, c1 = pi * pi / 8.0;

  auto circle = [&](auto&& g) {
    return circle_integral([&](double th) {
      DiskPoint w = DiskPoint::on_circle(th);
      double d = std::abs(w.one_minus_sq());
      if (d == 0.0) return 0.0;
      return (2.0 / pi) * powq(std::abs(g(w)), q) / d;
    });
  };
  TransportedIntegrals out{};
  out.value = circle([&](const DiskPoint& w) { return H(w.value()); });
  out.second = circle([&](const DiskPoint& w) {
    cplx u = w.one_minus_sq();
    return H.derivative(w.value(), 2).value * c2 * u * u;
  });
  out.first = circle([&](const DiskPoint& w) {
    return H.derivative(w.value(), 1).value * c1 * w.value() * w.one_minus_sq();
  });

  auto line = [&](auto&& g) {
    return boundary_line_integral([&](double s) {
      DiskPoint w = phi_map(StripPoint::closed(cplx(s, 1.0)));
      return powq(std::abs(g(w)), q);
    });
  };
  // Phi' = (pi/4)(1-w^2), Phi'' = -(pi^2/8) w (1-w^2)
  auto t2 = [&](const DiskPoint& w) {
    cplx d1 = (pi / 4.0) * w.one_minus_sq();
    return H.derivative(w.value(), 2).value * d1 * d1;
  };
  auto t1 = [&](const DiskPoint& w) {
    return H.derivative(w.value(), 1).value * (-(pi * pi / 8.0)) * w.value() * w.one_minus_sq();
  };
  out.line_value = line([&](const DiskPoint& w) { return H(w.value()); });
  out.line_second = line(t2);
  out.line_first = line(t1);
  out.line_F2 = line([&](const DiskPoint& w) { return t2(w) + t1(w); });
  out.finite = std::isfinite(out.value) && std::isfinite(out.second) && std::isfinite(out.first);
  return out;
}

RationalFormIntegrals rational_form_integrals(const HolomorphicSampler& H, double q) {
  check_q(q);
  if (!H.has_analytic(1) || !H.has_analytic(2))
    throw PreconditionError("boundary integrals need closed-form H' and H''");
  const cplx I(0.0, 1.0);
  auto circle = [&](double pre, auto&& g) {
    return circle_integral([&](double th) {
      DiskPoint w = DiskPoint::on_circle(th);
      double d = std::abs(w.one_minus_sq());
      if (d == 0.0) return 0.0;
      return pre * powq(std::abs(g(w.value())), q) / d;
    }, {1.5 * pi});
  };
  RationalFormIntegrals out{};
  out.value = circle(1.0 / pi, [&](cplx z) { return H(z); });
  out.second = circle(1.0, [&](cplx z) {
    cplx den = I * (z + 1.0) + (z - 1.0);
    if (den == 0.0) return cplx(inf);
    return H.derivative(z, 2).value * pi * I * (z + 1.0) * (z - 1.0) / (den * den);
  });
  out.first = circle(1.0, [&](cplx z) {
    cplx den = I * (z + 1.0) + (z + 1.0);
    if (den == 0.0) return cplx(0.0);
    return H.derivative(z, 1).value * (pi * pi / 2.0) * I * (z + 1.0) * (z - 1.0) * ((z - 1.0) - I * (z + 1.0)) /
           (den * den * den);
  });
  out.finite = std::isfinite(out.value) && std::isfinite(out.second) && std::isfinite(out.first);
  return out;
}

BergmanNorms bergman_norms(const HolomorphicSampler& G, double q, const BergmanGrid& grid) {
  check_q(q);
  const std::size_t Kx = grid_half_count(grid.half_width, grid.x_step);
  const double X = grid.half_width;
  if (grid.y_nodes != 32) throw PreconditionError("Bergman grid uses 32 Gauss-Legendre nodes per half strip");
  using GL = boost::math::quadrature::gauss<double, 32>;
  const auto& nodes = GL::abscissa();
  const auto& weights = GL::weights();

  // y in (0,1): y = (1 + s)/2 over the Legendre nodes s, both signs of s stored half-table style
  std::vector<std::pair<double, double>> ys;  // (y, weight) for y in (-1, 1)
  for (std::size_t k = 0; k < nodes.size(); ++k)
    for (double sgn : {-1.0, 1.0}) {
      if (k == 0 && sgn < 0 && nodes[0] == 0.0) continue;
      double s = sgn * nodes[k];
      double y = 0.5 * (1.0 + s);
      ys.emplace_back(y, 0.5 * weights[k]);
      ys.emplace_back(-y, 0.5 * weights[k]);
    }

  auto column = [&](double x, double& weighted, double& plain) {
    weighted = plain = 0.0;
    for (auto [y, w] : ys) {
      cplx z(x, y);
      plain += w * powq(std::abs(G(z)), q);
      weighted += w * std::pow(1.0 - std::abs(y), 2.0 * q) * powq(std::abs(G.derivative(z, 2).value), q);
    }
  };

  BergmanNorms out{};
  out.finite = true;
  for (std::size_t i = 0; i <= 2 * Kx; ++i) {
    double x = (static_cast<double>(i) - static_cast<double>(Kx)) * grid.x_step;
    double wt = ((i == 0 || i == 2 * Kx) ? 0.5 : 1.0) * grid.x_step;
    double a, b;
    column(x, a, b);
    out.strip_weighted_second_deriv += wt * a;
    out.strip_plain += wt * b;
  }
  // power-law tails of the column integrals (exponent 1: the q-th power is already inside)
  double tail = 0.0;
  for (double sgn : {-1.0, 1.0}) {
    double ah, ae, bh, be;
    column(sgn * X / 2, ah, bh);
    column(sgn * X, ae, be);
    tail += power_tail(ah, ae, X, 1.0) + power_tail(bh, be, X, 1.0);
  }
  out.truncation_budget = tail;
  if (!std::isfinite(tail) || !std::isfinite(out.strip_plain) || !std::isfinite(out.strip_weighted_second_deriv))
    out.finite = false;

  // disk integral in polar coordinates, radius by Legendre nodes, angle by the trapezoid rule
  const int nth = 256;
  double disk = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k)
    for (double sgn : {-1.0, 1.0}) {
      if (k == 0 && sgn < 0 && nodes[0] == 0.0) continue;
      double r = 0.5 * (1.0 + sgn * nodes[k]);
      double wr = 0.5 * weights[k];
      double ring = 0.0;
      for (int j = 0; j < nth; ++j) {
        DiskPoint w = DiskPoint::interior(std::polar(r, 2.0 * pi * j / nth));
        cplx z = phi_inverse(w).value();
        ring += powq(std::abs(G(z)), q);
      }
      disk += wr * r * std::pow(1.0 - r, 2.0 * q - 1.0) * ring * (2.0 * pi / nth);
    }
  out.disk_weighted = disk;
  if (!std::isfinite(disk)) out.finite = false;
  return out;
}

MeanValueSides mean_value_second_derivative_check(const HolomorphicSampler& G, cplx a, double R, double q) {
  check_q(q);
  if (!(R > 0.0)) throw PreconditionError("radius must be positive");
  using GL = boost::math::quadrature::gauss<double, 30>;
  const int nth = 128;
  double area = 0.0;
  const auto& nodes = GL::abscissa();
  const auto& weights = GL::weights();
  for (std::size_t k = 0; k < nodes.size(); ++k)
    for (double sgn : {-1.0, 1.0}) {
      if (k == 0 && sgn < 0 && nodes[0] == 0.0) continue;
      double rho = 0.5 * R * (1.0 + sgn * nodes[k]);
      double ring = 0.0;
      for (int j = 0; j < nth; ++j) ring += powq(std::abs(G(a + std::polar(rho, 2.0 * pi * j / nth))), q);
      area += 0.5 * R * weights[k] * rho * ring * (2.0 * pi / nth);
    }
  if (!std::isfinite(area)) throw NumericalBudgetError("mean-value area integral did not converge");
  double lhs = powq(std::abs(G.derivative(a, 2).value), q);
  return {lhs, area / std::pow(R, 2.0 * q + 2.0)};
}

double mean_value_constant_bound(double q) {
  check_q(q);
  if (q == 1.0) return 6.0 / pi;
  double qp = q / (q - 1.0);
  return std::pow(6.0 / pi, q) * std::pow(pi / (qp + 1.0), q / qp);
}

double pinned_mean_value_constant(double q) {
  if (q == 1.0) return kPinnedMeanValue1;
  if (q == 2.0) return kPinnedMeanValue2;
  throw PreconditionError("mean-value constant pinned for q = 1, 2 only");
}

double pinned_bergman_constant(double q) {
  if (q == 1.0) return kPinnedBergman1;
  if (q == 2.0) return kPinnedBergman2;
  throw PreconditionError("embedding constant pinned for q = 1, 2 only");
}

}  // namespace plab
