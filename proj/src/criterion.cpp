#include "plab/criterion.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "plab/errors.hpp"
#include "plab/format.hpp"

namespace plab {

namespace {

constexpr double alpha = std::numbers::pi / 2.0;
constexpr double kBoundaryTol = 1e-12;

double term(double lambda) { return std::exp(-alpha * std::abs(lambda)); }

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Divergent: return "Divergent";
    case Verdict::Convergent: return "Convergent";
    case Verdict::Boundary: return "Boundary";
    case Verdict::Undetermined: return "Undetermined";
  }
  return "?";
}

double exp_partial_sum(const DiscreteSet& s, std::size_t N) {
  if (N > s.size())
    throw PreconditionError("N = " + std::to_string(N) + " exceeds set size " + std::to_string(s.size()));
  double sum = 0.0;
  const auto& e = s.enumeration();
  for (std::size_t i = 0; i < N; ++i) sum += term(e[i]);
  return sum;
}

double log_inverse_phi_modulus(double lambda) {
  double delta = 2.0 / (std::exp(alpha * std::abs(lambda)) + 1.0);  // 1 - |Phi(lambda)|
  return -std::log1p(-delta);
}

BlaschkeSum blaschke_sum(const DiscreteSet& s) {
  BlaschkeSum out{0.0, false, 0};
  for (double x : s.points()) {
    if (x == 0.0) {
      out.origin_excluded = true;
      continue;
    }
    out.value += log_inverse_phi_modulus(x);
    ++out.terms;
  }
  return out;
}

RatioCheck equivalence_check(const DiscreteSet& s) {
  if (s.size() == 0) throw PreconditionError("equivalence_check needs a nonempty set");
  RatioCheck out{std::nullopt, false, 0};
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double x : s.points()) {
    if (x == 0.0) {
      out.origin_excluded = true;
      continue;
    }
    double r = log_inverse_phi_modulus(x) / term(x);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
    ++out.used;
  }
  if (out.used) out.ratio = Interval{lo, hi};
  return out;
}

std::optional<double> exp_sum_limit(const GrowthLaw& law) {
  if (auto* l = std::get_if<ListLaw>(&law)) {
    double s = 0.0;
    for (double x : l->points) s += term(x);
    return s;
  }
  if (auto* l = std::get_if<ArithmeticLaw>(&law)) {
    // sum over k of e^{-alpha|a k + b|}; only b mod |a| matters
    double A = std::abs(l->a);
    double b = std::fmod(l->b, A);
    if (b < 0) b += A;
    double r = std::exp(-alpha * A);
    return std::exp(-alpha * b) / (1.0 - r) + std::exp(alpha * b) * r / (1.0 - r);
  }
  return std::nullopt;
}

std::optional<double> exp_tail_bound(const GrowthLaw& law, std::size_t from) {
  if (auto* l = std::get_if<ListLaw>(&law)) {
    double s = 0.0;
    for (std::size_t i = from; i < l->points.size(); ++i) s += term(l->points[i]);
    return s;
  }
  if (auto* l = std::get_if<ArithmeticLaw>(&law)) {
    double r = std::exp(-alpha * std::abs(l->a));
    double c = std::exp(alpha * std::abs(l->b));  // e^{-alpha|ak+b|} <= c r^{|k|}
    std::size_t pos_used = from / 2, neg_used = from >= 1 ? (from - 1) / 2 : 0;
    double zero = from == 0 ? c : 0.0;
    return zero + c * (std::pow(r, static_cast<double>(pos_used + 1)) +
                       std::pow(r, static_cast<double>(neg_used + 1))) / (1.0 - r);
  }
  if (auto* l = std::get_if<LogarithmicLaw>(&law)) {
    double p = alpha * l->c;
    if (!(p > 1.0 + kBoundaryTol)) return std::nullopt;
    if (l->d >= 0.0) {
      // terms <= (i+1)^{-p} since d >= 0; integral comparison
      double n1 = static_cast<double>(from) + 1.0;
      return std::pow(n1, -p) + std::pow(n1, 1.0 - p) / (p - 1.0);
    }
    // d < 0: term = x^{-p} (1 + log x)^q with x = i + 1, q = -alpha d.
    // Sum the head exactly until lambda >= 0 and the term is decreasing, then compare with
    // int_x0^inf x^{-p} (1 + log x)^q dx = e^{p-1} (p-1)^{-(q+1)} Gamma(q+1, (p-1)(1 + log x0)).
    const double q = -alpha * l->d;
    const double Lmin = std::max({0.0, q / p - 1.0, -l->d / l->c - 1.0});
    std::size_t i = from;
    double head = 0.0;
    for (;; ++i) {
      const double L = std::log(static_cast<double>(i) + 1.0);
      if (L >= Lmin && law_point(law, i) >= 0.0) break;
      head += term(law_point(law, i));
    }
    const double x0 = static_cast<double>(i) + 1.0, L0 = std::log(x0);
    const double first = std::pow(x0, -p) * std::pow(1.0 + L0, q);
    const double integral = std::exp(p - 1.0) * std::pow(p - 1.0, -(q + 1.0)) *
                            boost::math::tgamma(q + 1.0, (p - 1.0) * (1.0 + L0));
    return head + first + integral;
  }
  auto& l = std::get<PolynomialLaw>(law);
  double a = alpha * std::abs(l.c), k = l.k;
  double inv = 1.0 / k;
  // decreasing terms: sum_{j >= N} <= e^{-a N^k} + int_N^inf e^{-a x^k} dx
  double N = static_cast<double>(from);
  double x = a * std::pow(N, k);
  double integral = inv * std::pow(a, -inv) * boost::math::tgamma(inv, x);
  return std::exp(-x) + integral;
}

CriterionReport classify(const DiscreteSet& s) {
  CriterionReport rep;
  for (std::size_t N = 1; N <= s.size(); N *= 2) rep.partial_sums.emplace_back(N, exp_partial_sum(s, N));
  if (s.size() > 0 && (rep.partial_sums.empty() || rep.partial_sums.back().first != s.size()))
    rep.partial_sums.emplace_back(s.size(), exp_partial_sum(s, s.size()));
  if (s.size() == 0) rep.partial_sums.emplace_back(0, 0.0);

  auto bs = blaschke_sum(s);
  rep.blaschke_sum = bs.value;
  rep.origin_excluded = bs.origin_excluded;
  if (s.size() > 0) rep.comparability_ratio = equivalence_check(s).ratio;

  if (!s.law()) {
    rep.verdict = Verdict::Undetermined;
    rep.certificate = "no growth law: partial sums only";
    return rep;
  }
  const GrowthLaw& law = *s.law();
  const std::size_t past = s.offset() + s.size();

  if (std::holds_alternative<ListLaw>(law)) {
    rep.verdict = Verdict::Convergent;
    rep.certificate = "finite set";
  } else if (auto* a = std::get_if<ArithmeticLaw>(&law)) {
    rep.verdict = Verdict::Convergent;
    rep.certificate = "geometric comparison, ratio exp(-pi|a|/2) = " + fmt_double(std::exp(-alpha * std::abs(a->a)));
  } else if (auto* l = std::get_if<LogarithmicLaw>(&law)) {
    double p = alpha * l->c;
    if (std::abs(p - 1.0) <= kBoundaryTol) {
      if (l->d == 0.0) {
        rep.verdict = Verdict::Divergent;
        rep.certificate = "harmonic comparison: terms equal 1/(k+1)";
      } else {
        rep.verdict = Verdict::Boundary;
        rep.certificate = "c = 2/pi with log-log correction: knife-edge, not resolved";
      }
    } else if (p < 1.0) {
      rep.verdict = Verdict::Divergent;
      rep.certificate = "p-series comparison, terms >= (k+1)^-p (1+log(k+1))^-s with p = " + fmt_double(p) + " < 1";
    } else {
      rep.verdict = Verdict::Convergent;
      rep.certificate = "p-series comparison, p = " + fmt_double(p) + " > 1";
    }
  } else {
    rep.verdict = Verdict::Convergent;
    rep.certificate = "integral comparison with exp(-a x^k), incomplete gamma tail";
  }

  if (rep.verdict == Verdict::Convergent) {
    rep.tail_bound = exp_tail_bound(law, past);
    if (s.offset() == 0) rep.limit = exp_sum_limit(law);
  }
  if (rep.verdict == Verdict::Divergent) rep.blaschke_sum = std::numeric_limits<double>::infinity();
  return rep;
}

}  // namespace plab
