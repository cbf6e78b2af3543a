#include "plab/holomorphic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "plab/errors.hpp"

namespace plab {

namespace {

constexpr double pi = std::numbers::pi;

std::vector<cplx> probe_points(Domain d) {
  std::vector<cplx> pts;
  for (int i = 0; i < 12; ++i) {
    double a = 0.37 + 0.61 * i, r = 0.15 + 0.065 * i;
    switch (d) {
      case Domain::Strip: pts.emplace_back(3.0 * std::sin(a), 0.9 * std::cos(1.7 * a)); break;
      case Domain::Disk: pts.push_back(std::polar(r, a)); break;
      case Domain::Plane: pts.push_back(std::polar(2.5 * r, a)); break;
    }
  }
  return pts;
}

}  // namespace

HolomorphicSampler::HolomorphicSampler(Fn f, Domain domain, bool symmetric)
    : f_(std::move(f)), domain_(domain), symmetric_(symmetric) {
  if (!f_) throw PreconditionError("sampler needs an evaluation callback");
  if (symmetric_) {
    auto pts = probe_points(domain_);
    if (symmetry_defect(pts) > 1e-9)
      throw PreconditionError("declared symmetry F(conj z) = conj F(z) fails on sample pairs");
  }
}

HolomorphicSampler& HolomorphicSampler::with_derivative(int order, Fn df) {
  if (order == 1)
    d1_ = std::move(df);
  else if (order == 2)
    d2_ = std::move(df);
  else
    throw PreconditionError("closed-form derivatives are registered for orders 1 and 2 only");
  return *this;
}

bool HolomorphicSampler::has_analytic(int order) const {
  return (order == 1 && d1_) || (order == 2 && d2_) || order == 0;
}

double HolomorphicSampler::distance_to_boundary(cplx z) const {
  switch (domain_) {
    case Domain::Strip: return 1.0 - std::abs(z.imag());
    case Domain::Disk: return 1.0 - std::abs(z);
    case Domain::Plane: return std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

DerivativeEstimate HolomorphicSampler::derivative(cplx z, int order) const {
  if (order == 0) return {f_(z), 0.0};
  if (order == 1 && d1_) return {d1_(z), 0.0};
  if (order == 2 && d2_) return {d2_(z), 0.0};
  return cauchy_derivative(z, order);
}

DerivativeEstimate HolomorphicSampler::cauchy_derivative(cplx z, int order, double radius) const {
  if (order < 1 || order > 8) throw PreconditionError("derivative order must be in 1..8");
  double r = radius;
  if (r <= 0.0) r = std::min(0.5 * distance_to_boundary(z), 0.25);
  if (!(r > 0.0)) throw PreconditionError("Cauchy differentiation needs an interior point");
  // f^(n)(z) = n!/r^n * mean_k f(z + r e^{i t_k}) e^{-i n t_k}
  auto rule = [&](int M, double& fmax) {
    cplx s = 0.0;
    for (int k = 0; k < M; ++k) {
      double t = 2.0 * pi * k / M;
      cplx v = f_(z + std::polar(r, t));
      fmax = std::max(fmax, std::abs(v));
      s += v * std::polar(1.0, -order * t);
    }
    return s / static_cast<double>(M);
  };
  double fmax = 0.0;
  cplx coarse = rule(48, fmax), fine = rule(96, fmax);
  double scale = std::tgamma(order + 1.0) / std::pow(r, order);
  double round = 64.0 * std::numeric_limits<double>::epsilon() * fmax * scale;
  return {fine * scale, std::abs(fine - coarse) * scale + round};
}

double HolomorphicSampler::symmetry_defect(std::span<const cplx> points) const {
  double worst = 0.0;
  for (cplx z : points) {
    cplx a = f_(std::conj(z)), b = std::conj(f_(z));
    worst = std::max(worst, std::abs(a - b) / (1.0 + std::abs(b)));
  }
  return worst;
}

HolomorphicSampler HolomorphicSampler::derivative_sampler(int order) const {
  HolomorphicSampler self = *this;
  HolomorphicSampler out([self, order](cplx z) { return self.derivative(z, order).value; }, domain_, false);
  out.symmetric_ = symmetric_;
  if (order == 0) return *this;
  if (order == 1 && d2_) out.d1_ = d2_;
  return out;
}

}  // namespace plab
