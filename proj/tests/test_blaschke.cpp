#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "plab/blaschke.hpp"
#include "plab/criterion.hpp"
#include "plab/errors.hpp"
#include "plab/strip_norms.hpp"

using namespace plab;
using std::numbers::pi;
using C = std::complex<double>;

namespace {

std::vector<double> integers(int m) {
  std::vector<double> v;
  for (int k = -m; k <= m; ++k) v.push_back(k);
  return v;
}

BlaschkeProduct strip_integers(int m) {
  auto v = integers(m);
  return BlaschkeProduct::from_strip_points(v);
}

// plain product over the gamma values, no complements
C naive_beta(const std::vector<double>& g, C w) {
  C p = 1.0;
  for (double x : g) p *= (w - x) / (1.0 - x * w);
  return p;
}

std::vector<C> interior_points(int n, unsigned seed, double rmax) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> r(0.0, 1.0), a(0.0, 2 * pi);
  std::vector<C> out;
  for (int i = 0; i < n; ++i) out.push_back(std::polar(rmax * std::sqrt(r(rng)), a(rng)));
  return out;
}

}  // namespace

TEST_CASE("construction") {
  std::vector<double> g{0.0};
  auto b0 = BlaschkeProduct::from_zeros(g);
  CHECK(b0.origin_multiplicity() == 1);
  CHECK(b0.zeros().empty());
  CHECK(b0.K() == 2.0);
  CHECK(eval_beta(b0, C(0.3, -0.2)) == C(0.3, -0.2));

  std::vector<double> one{0.4};
  CHECK(eval_beta(BlaschkeProduct::from_zeros(one), 0.0) == C(-0.4));

  auto b = strip_integers(20);
  CHECK(b.size() == 41);
  CHECK(b.origin_multiplicity() == 1);
  for (const auto& z : b.zeros()) {
    double lam = z.sign * std::round(std::abs(std::atanh(z.value())) * 4 / pi);
    CHECK(std::abs(z.value() - std::tanh(pi * lam / 4)) < 1e-15);
  }
  for (std::size_t i = 1; i < b.zeros().size(); ++i) CHECK(b.zeros()[i].delta <= b.zeros()[i - 1].delta);

  std::vector<double> bad{0.5, 1.0};
  CHECK_THROWS_AS(BlaschkeProduct::from_zeros(bad), PreconditionError);
  std::vector<double> far{1000.0};
  CHECK_THROWS_AS(BlaschkeProduct::from_strip_points(far), PreconditionError);
  CHECK_THROWS_AS(eval_beta(b, C(1.01, 0)), PreconditionError);
}

TEST_CASE("K, tail and log sum") {
  auto b = strip_integers(20);
  double s = 1.0;
  for (int k = 1; k <= 20; ++k) s += 2 * 2.0 / (std::exp(pi * k / 2) + 1);
  CHECK(b.K() == doctest::Approx(2 * s).epsilon(1e-14));
  auto pts = integers(20);
  auto crit = blaschke_sum(DiscreteSet::from_points(pts));
  CHECK(b.log_sum() == doctest::Approx(crit.value).epsilon(1e-13));

  auto t = BlaschkeProduct::from_strip_points(pts, {10});
  CHECK(t.zeros().size() == 10);
  double dropped = 0;
  for (int k = 6; k <= 20; ++k) dropped += 2 * 2.0 / (std::exp(pi * k / 2) + 1);
  CHECK(t.tail_sum() == doctest::Approx(dropped).epsilon(1e-13));
  CHECK(t.K() / 2 + t.tail_sum() == doctest::Approx(b.K() / 2).epsilon(1e-14));
}

TEST_CASE("values: zeros, circle modulus, disk bound") {
  auto b = strip_integers(20);
  for (const auto& z : b.zeros()) CHECK(std::abs(eval_beta(b, z.point())) <= 1e-12);
  CHECK(eval_beta(b, 0.0) == C(0.0));

  double worst = 0.0;
  for (int j = 0; j < 4096; ++j) {
    double th = 2 * pi * (j + 0.5) / 4096;
    worst = std::max(worst, std::abs(std::abs(eval_beta(b, DiskPoint::on_circle(th))) - 1.0));
  }
  CHECK(worst <= 1e-12);

  for (C w : interior_points(2000, 7, 1.0)) CHECK(std::abs(eval_beta(b, w)) <= 1.0 + 1e-12);

  std::vector<double> sym{0.3, -0.3, 0.7, -0.7};
  C v = eval_beta(BlaschkeProduct::from_zeros(sym), 0.0);
  CHECK(v.imag() == 0.0);
  CHECK(v.real() == doctest::Approx(0.09 * 0.49).epsilon(1e-15));

  auto g = b.values();
  for (C w : interior_points(200, 3, 0.9)) CHECK(std::abs(eval_beta(b, w) - naive_beta(g, w)) < 1e-13);
}

TEST_CASE("complements keep zeros near the edge exact") {
  std::vector<double> lam{30.0, -30.0};
  auto b = BlaschkeProduct::from_strip_points(lam);
  for (const auto& z : b.zeros()) {
    CHECK(eval_beta(b, z.point()) == C(0.0));
    // the naive product cannot see the zero: 1 - gamma has rounded away
    CHECK_FALSE(std::abs(naive_beta(b.values(), z.value())) < 1e-12);
  }
  DiskPoint w = phi_map(StripPoint::interior(30.0));
  CHECK(std::abs(eval_beta(b, w)) < 1e-12);
}

TEST_CASE("first derivative") {
  std::vector<double> one{0.6};
  auto b1 = BlaschkeProduct::from_zeros(one);
  CHECK(eval_beta_prime(b1, 0.0).real() == doctest::Approx(1 - 0.36).epsilon(1e-15));
  std::vector<double> o{0.0};
  auto b0 = BlaschkeProduct::from_zeros(o);
  CHECK(eval_beta_prime(b0, C(0.2, 0.4)) == C(1.0));

  auto b = strip_integers(20);
  // complex step on the real axis
  for (double x : {-0.95, -0.3, 0.1, 0.55, 0.99}) {
    const double h = 1e-30;
    double cs = eval_beta(b, C(x, h)).imag() / h;
    CHECK(eval_beta_prime(b, x).real() == doctest::Approx(cs).epsilon(1e-10));
  }
  HolomorphicSampler f([&](C w) { return eval_beta(b, w); }, Domain::Disk);
  for (C w : interior_points(100, 11, 0.95)) {
    auto c = f.cauchy_derivative(w, 1);
    C a = eval_beta_prime(b, w);
    CHECK(std::abs(a - c.value) <= 1e-8 * std::abs(a) + c.error);
  }
}

TEST_CASE("second derivative") {
  std::vector<double> o{0.0};
  CHECK(eval_beta_second(BlaschkeProduct::from_zeros(o), C(0.5, 0.1)) == C(0.0));

  // ((w^2 - g^2)/(1 - g^2 w^2))'' at 0 = 2(1 - g^4)
  for (double g : {0.2, 0.5, 0.9}) {
    std::vector<double> pair{g, -g};
    auto b = BlaschkeProduct::from_zeros(pair);
    CHECK(eval_beta_second(b, 0.0).real() == doctest::Approx(2 * (1 - std::pow(g, 4))).epsilon(1e-14));
  }
  // single factor: 2 g (1 - g^2)/(1 - g w)^3
  std::vector<double> one{-0.7};
  C w(0.3, 0.2);
  C direct = 2 * -0.7 * (1 - 0.49) / std::pow(1.0 + 0.7 * w, 3);
  CHECK(std::abs(eval_beta_second(BlaschkeProduct::from_zeros(one), w) - direct) < 1e-14);

  auto b = strip_integers(20);
  HolomorphicSampler f([&](C z) { return eval_beta(b, z); }, Domain::Disk);
  for (C z : interior_points(100, 13, 0.95)) {
    auto c = f.cauchy_derivative(z, 2);
    C a = eval_beta_second(b, z, SecondDerivativeMethod::PairSum);
    CHECK(std::abs(a - c.value) <= 1e-8 * std::abs(a) + c.error);
    C r = eval_beta_second(b, z, SecondDerivativeMethod::ProductRule);
    CHECK(std::abs(a - r) <= 1e-12 * (1 + std::abs(a)));
  }
}

TEST_CASE("large products switch to the recurrence") {
  auto b = strip_integers(150);
  CHECK(b.size() > kPairSumLimit);
  C w(0.2, 0.5);
  C a = eval_beta_second(b, w);
  C p = eval_beta_second(b, w, SecondDerivativeMethod::PairSum);
  CHECK(std::abs(a - p) <= 1e-12 * (1 + std::abs(p)));
}

TEST_CASE("bounds: single zero at the origin") {
  std::vector<double> o{0.0};
  auto r = verify_bounds(BlaschkeProduct::from_zeros(o), 4096);
  CHECK(r.literal_holds());
  CHECK(r.ingredient.empty());
  CHECK(r.chain.empty());
  CHECK(r.excluded > 0);
  CHECK(r.excluded < 10);
}

TEST_CASE("bounds: integer images violate the first literal bound") {
  auto r = verify_bounds(strip_integers(20), 4096);
  CHECK(r.ingredient.empty());
  CHECK(r.chain.empty());
  REQUIRE_FALSE(r.literal_holds());
  // the witness nearest to z = i
  const BoundViolation* best = nullptr;
  for (const auto& v : r.literal)
    if (!best || std::abs(v.theta - pi / 2) < std::abs(best->theta - pi / 2)) best = &v;
  CHECK(best->bound == "|beta'| <= 2K/|1-z^2|^2");
  CHECK(best->lhs / best->rhs == doctest::Approx(2.01497 / 1.89914).epsilon(1e-3));
  CHECK(r.worst_first_ratio > 1.0);
  CHECK(r.worst_first_ratio <= 2.0);  // chain with 4S/D^2, S <= K
}

TEST_CASE("bounds: zero near the boundary violates both literal bounds") {
  std::vector<double> g{0.999};
  auto r = verify_bounds(BlaschkeProduct::from_zeros(g), 4096);
  CHECK(r.ingredient.empty());
  CHECK(r.chain.empty());
  bool first = false, second = false;
  for (const auto& v : r.literal) {
    first |= v.bound == "|beta'| <= 2K/|1-z^2|^2";
    second |= v.bound == "|beta''| <= 12K^2/|1-z^2|^4";
  }
  CHECK(first);
  CHECK(second);
  CHECK(r.worst_second_ratio > 100);
}

TEST_CASE("H = (1 - w^2)^{4n} beta") {
  std::vector<double> o{0.0};
  auto H = build_H(BlaschkeProduct::from_zeros(o), 1);
  CHECK(H.d1(DiskPoint::interior(0.0)) == C(1.0));
  C w(0.3, -0.4);
  CHECK(std::abs(H.eval(DiskPoint::interior(w)) - std::pow(1.0 - w * w, 4) * w) < 1e-15);

  auto b = strip_integers(20);
  for (int n : {0, 1, 2}) {
    auto h = build_H(b, n);
    if (n > 0) {
      CHECK(h.eval(DiskPoint::closed(1.0)) == C(0.0));
      CHECK(h.eval(DiskPoint::closed(-1.0)) == C(0.0));
    }
    for (const auto& z : b.zeros()) CHECK(h.eval(z.point()) == C(0.0));
    CHECK(h.eval(DiskPoint::interior(0.42)).imag() == 0.0);
    auto s = h.sampler();
    CHECK(s.symmetric());
    HolomorphicSampler bare([&](C z) { return s(z); }, Domain::Disk);
    for (C z : interior_points(40, 17 + n, 0.9)) {
      for (int k : {1, 2}) {
        auto c = bare.cauchy_derivative(z, k);
        C a = s.derivative(z, k).value;
        CHECK(std::abs(a - c.value) <= 1e-8 * std::abs(a) + c.error);
      }
    }
  }
  CHECK_THROWS_AS(build_H(b, -1), PreconditionError);
}

TEST_CASE("transported boundary integrals of H are finite") {
  auto H = build_H(strip_integers(20), 1).sampler();
  for (double q : {1.0, 2.0}) {
    auto t = transported_integrals(H, q);
    CHECK(t.finite);
    CHECK(t.value == doctest::Approx(t.line_value).epsilon(1e-7));
    CHECK(t.second == doctest::Approx(t.line_second).epsilon(1e-7));
    CHECK(t.first == doctest::Approx(t.line_first).epsilon(1e-7));
  }
  // n = 0: |beta| = 1 on the circle, so F itself is not q-integrable on the line
  auto t0 = transported_integrals(build_H(strip_integers(20), 0).sampler(), 2.0);
  CHECK_FALSE(t0.finite);
}

TEST_CASE("rational-form boundary integrals") {
  auto H = build_H(strip_integers(20), 1).sampler();
  auto t = transported_integrals(H, 1.0);
  auto r = rational_form_integrals(H, 1.0);
  CHECK(r.value == doctest::Approx(t.value / 2).epsilon(1e-10));
  CHECK(std::isfinite(r.first));
  // the second prefactor has a double pole at z = -i; H''(-i) != 0 here
  CHECK(std::abs(H.derivative(C(0, -1), 2).value) > 1e-3);
  CHECK_FALSE(std::isfinite(r.second));
  CHECK_FALSE(r.finite);
}
