#include "plab/blaschke.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "plab/errors.hpp"

namespace plab {

namespace {

constexpr double pi = std::numbers::pi;

struct Factor {
  cplx b, d1, d2;
};

// (w - gamma)/(1 - gamma w) and its derivatives from the complements of w and gamma
Factor factor(const BlaschkeZero& z, const DiskPoint& w) {
  const double d = z.delta;
  const double g = z.value();
  cplx num, den;
  if (z.sign > 0) {
    num = d - w.one_minus();
    den = w.one_minus() + d * w.value();
  } else {
    num = w.one_plus() - d;
    den = w.one_plus() - d * w.value();
  }
  const double s = z.one_minus_sq();
  return {num / den, s / (den * den), 2.0 * g * s / (den * den * den)};
}

std::vector<Factor> factors(const BlaschkeProduct& b, const DiskPoint& w) {
  std::vector<Factor> out;
  out.reserve(b.size());
  for (std::size_t i = 0; i < b.origin_multiplicity(); ++i) out.push_back({w.value(), 1.0, 0.0});
  for (const auto& z : b.zeros()) out.push_back(factor(z, w));
  return out;
}

// prefix[k] = prod_{j<k} b_j, suffix[k] = prod_{j>=k} b_j
void partial_products(const std::vector<Factor>& f, std::vector<cplx>& prefix, std::vector<cplx>& suffix) {
  const std::size_t n = f.size();
  prefix.assign(n + 1, 1.0);
  suffix.assign(n + 1, 1.0);
  for (std::size_t k = 0; k < n; ++k) prefix[k + 1] = prefix[k] * f[k].b;
  for (std::size_t k = n; k-- > 0;) suffix[k] = suffix[k + 1] * f[k].b;
}

DiskPoint closed_point(cplx w) { return DiskPoint::closed(w); }

}  // namespace

void BlaschkeProduct::finish(TruncationPolicy policy) {
  for (const auto& z : zeros_) {
    if (!(z.delta > 0.0) || z.delta > 1.0 || !std::isfinite(z.delta))
      throw PreconditionError("Blaschke zero must lie in (-1, 1)");
  }
  std::erase_if(zeros_, [this](const BlaschkeZero& z) {
    if (z.delta == 1.0) ++origin_;
    return z.delta == 1.0;
  });
  std::stable_sort(zeros_.begin(), zeros_.end(),
                   [](const BlaschkeZero& a, const BlaschkeZero& b) { return a.delta > b.delta; });
  if (policy.max_zeros > 0 && zeros_.size() > policy.max_zeros) {
    for (std::size_t i = policy.max_zeros; i < zeros_.size(); ++i) tail_ += zeros_[i].delta;
    zeros_.resize(policy.max_zeros);
  }
  double s = static_cast<double>(origin_);
  for (const auto& z : zeros_) s += z.delta;
  K_ = 2.0 * s;
}

BlaschkeProduct BlaschkeProduct::from_zeros(std::span<const double> gammas, TruncationPolicy policy) {
  BlaschkeProduct b;
  for (double g : gammas) {
    if (!std::isfinite(g) || !(std::abs(g) < 1.0))
      throw PreconditionError("Blaschke zero must satisfy |gamma| < 1");
    if (g == 0.0)
      ++b.origin_;
    else
      b.zeros_.push_back({g > 0 ? 1 : -1, 1.0 - std::abs(g)});
  }
  b.finish(policy);
  return b;
}

BlaschkeProduct BlaschkeProduct::from_complements(std::vector<BlaschkeZero> zeros, std::size_t origin_multiplicity,
                                                  TruncationPolicy policy) {
  BlaschkeProduct b;
  b.zeros_ = std::move(zeros);
  b.origin_ = origin_multiplicity;
  b.finish(policy);
  return b;
}

BlaschkeProduct BlaschkeProduct::from_strip_points(std::span<const double> lambdas, TruncationPolicy policy) {
  BlaschkeProduct b;
  for (double l : lambdas) {
    require_finite(l, "strip point");
    if (l == 0.0) {
      ++b.origin_;
      continue;
    }
    double d = 2.0 / (std::exp(pi * std::abs(l) / 2.0) + 1.0);
    if (!(d > 0.0)) throw PreconditionError("Phi(lambda) is indistinguishable from +-1 for lambda = " + std::to_string(l));
    b.zeros_.push_back({l > 0 ? 1 : -1, d});
  }
  b.finish(policy);
  return b;
}

double BlaschkeProduct::log_sum() const {
  double s = 0.0;
  for (const auto& z : zeros_) s -= std::log1p(-z.delta);
  return s;
}

std::vector<double> BlaschkeProduct::values() const {
  std::vector<double> out(origin_, 0.0);
  for (const auto& z : zeros_) out.push_back(z.value());
  return out;
}

cplx eval_beta(const BlaschkeProduct& b, const DiskPoint& w) {
  cplx p = 1.0;
  for (const auto& f : factors(b, w)) p *= f.b;
  return p;
}

cplx eval_beta_prime(const BlaschkeProduct& b, const DiskPoint& w) {
  auto f = factors(b, w);
  std::vector<cplx> pre, suf;
  partial_products(f, pre, suf);
  cplx s = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) s += f[k].d1 * pre[k] * suf[k + 1];
  return s;
}

cplx eval_beta_second(const BlaschkeProduct& b, const DiskPoint& w, SecondDerivativeMethod method) {
  auto f = factors(b, w);
  if (method == SecondDerivativeMethod::Auto)
    method = f.size() > kPairSumLimit ? SecondDerivativeMethod::ProductRule : SecondDerivativeMethod::PairSum;

  if (method == SecondDerivativeMethod::ProductRule) {
    cplx p0 = 1.0, p1 = 0.0, p2 = 0.0;
    for (const auto& x : f) {
      p2 = p2 * x.b + 2.0 * p1 * x.d1 + p0 * x.d2;
      p1 = p1 * x.b + p0 * x.d1;
      p0 *= x.b;
    }
    return p2;
  }

  std::vector<cplx> pre, suf;
  partial_products(f, pre, suf);
  cplx pairs = 0.0, singles = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    singles += f[k].d2 * pre[k] * suf[k + 1];
    cplx mid = 1.0;
    for (std::size_t l = k + 1; l < f.size(); ++l) {
      pairs += f[k].d1 * f[l].d1 * pre[k] * mid * suf[l + 1];
      mid *= f[l].b;
    }
  }
  return 2.0 * pairs + singles;
}

cplx eval_beta(const BlaschkeProduct& b, cplx w) { return eval_beta(b, closed_point(w)); }
cplx eval_beta_prime(const BlaschkeProduct& b, cplx w) { return eval_beta_prime(b, closed_point(w)); }
cplx eval_beta_second(const BlaschkeProduct& b, cplx w, SecondDerivativeMethod m) {
  return eval_beta_second(b, closed_point(w), m);
}

BoundReport verify_bounds(const BlaschkeProduct& b, std::size_t samples) {
  if (samples < 1) throw PreconditionError("verify_bounds needs at least one sample");
  constexpr double slack = 1.0 + 1e-12;
  BoundReport r;
  r.samples = samples;
  const double K = b.K();
  double S = static_cast<double>(b.origin_multiplicity());
  for (const auto& z : b.zeros()) {
    S += z.one_minus_sq();
    if (z.one_minus_sq() > 2.0 * z.delta * slack)
      r.ingredient.push_back({"1-gamma^2 <= 2(1-|gamma|)", z.value(), z.one_minus_sq(), 2.0 * z.delta});
  }

  for (std::size_t j = 0; j < samples; ++j) {
    const double theta = 2.0 * pi * (static_cast<double>(j) + 0.5) / static_cast<double>(samples);
    const DiskPoint w = DiskPoint::on_circle(theta);
    if (std::abs(w.one_minus()) < kBoundExclusion || std::abs(w.one_plus()) < kBoundExclusion) {
      ++r.excluded;
      continue;
    }
    const double D = std::abs(w.one_minus_sq());
    for (const auto& z : b.zeros()) {
      double den = std::abs(z.sign > 0 ? w.one_minus() + z.delta * w.value() : w.one_plus() - z.delta * w.value());
      if (den * slack < 0.5 * D) r.ingredient.push_back({"|1-gamma z| >= |1-z^2|/2", theta, den, 0.5 * D});
    }

    const double a1 = std::abs(eval_beta_prime(b, w));
    const double a2 = std::abs(eval_beta_second(b, w));
    const double lit1 = 2.0 * K / (D * D);
    const double lit2 = 12.0 * K * K / (D * D * D * D);
    r.worst_first_ratio = std::max(r.worst_first_ratio, a1 / lit1);
    r.worst_second_ratio = std::max(r.worst_second_ratio, a2 / lit2);
    if (a1 > lit1 * slack) r.literal.push_back({"|beta'| <= 2K/|1-z^2|^2", theta, a1, lit1});
    if (a2 > lit2 * slack) r.literal.push_back({"|beta''| <= 12K^2/|1-z^2|^4", theta, a2, lit2});

    const double ch1 = 4.0 * S / (D * D);
    const double ch2 = 16.0 * S * S / (D * D * D * D) + 16.0 * S / (D * D * D);
    if (a1 > ch1 * slack) r.chain.push_back({"|beta'| <= 4S/|1-z^2|^2", theta, a1, ch1});
    if (a2 > ch2 * slack) r.chain.push_back({"|beta''| <= 16S^2/D^4 + 16S/D^3", theta, a2, ch2});
  }
  return r;
}

HFunction::HFunction(BlaschkeProduct b, int n) : b_(std::move(b)), n_(n) {
  if (n < 0) throw PreconditionError("H needs n >= 0");
}

namespace {
struct Weight {
  cplx s, s1, s2;
};
// (1 - w^2)^p with p = 4n, and its first two derivatives
Weight boundary_weight(const DiskPoint& w, int n) {
  if (n == 0) return {1.0, 0.0, 0.0};
  const int p = 4 * n;
  const cplx q = w.one_minus_sq(), z = w.value();
  const cplx qp2 = std::pow(q, p - 2);
  return {qp2 * q * q, -2.0 * p * z * qp2 * q, -2.0 * p * qp2 * (q - 2.0 * (p - 1) * z * z)};
}
}  // namespace

cplx HFunction::eval(const DiskPoint& w) const { return boundary_weight(w, n_).s * eval_beta(b_, w); }

cplx HFunction::d1(const DiskPoint& w) const {
  auto s = boundary_weight(w, n_);
  return s.s1 * eval_beta(b_, w) + s.s * eval_beta_prime(b_, w);
}

cplx HFunction::d2(const DiskPoint& w) const {
  auto s = boundary_weight(w, n_);
  return s.s2 * eval_beta(b_, w) + 2.0 * s.s1 * eval_beta_prime(b_, w) + s.s * eval_beta_second(b_, w);
}

HolomorphicSampler HFunction::sampler() const {
  auto self = std::make_shared<const HFunction>(*this);
  HolomorphicSampler out([self](cplx w) { return self->eval(closed_point(w)); }, Domain::Disk, true);
  out.with_derivative(1, [self](cplx w) { return self->d1(closed_point(w)); });
  out.with_derivative(2, [self](cplx w) { return self->d2(closed_point(w)); });
  return out;
}

HFunction build_H(const BlaschkeProduct& b, int n) { return HFunction(b, n); }

}  // namespace plab
