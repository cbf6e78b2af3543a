#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "plab/conformal.hpp"
#include "plab/holomorphic.hpp"

namespace plab {

// gamma = sign * (1 - delta); delta kept so zeros near +-1 stay exact
struct BlaschkeZero {
  int sign;
  double delta;
  double value() const { return sign * (1.0 - delta); }
  double one_minus_sq() const { return delta * (2.0 - delta); }  // 1 - gamma^2
  DiskPoint point() const { return DiskPoint::real_near_edge(sign, delta); }
};

struct TruncationPolicy {
  std::size_t max_zeros = 0;  // 0 keeps everything; otherwise the zeros closest to the boundary go to the tail
};

class BlaschkeProduct {
 public:
  static BlaschkeProduct from_zeros(std::span<const double> gammas, TruncationPolicy policy = {});
  static BlaschkeProduct from_complements(std::vector<BlaschkeZero> zeros, std::size_t origin_multiplicity,
                                          TruncationPolicy policy = {});
  // zeros Phi(lambda), with delta = 2/(e^{pi|lambda|/2} + 1) formed directly
  static BlaschkeProduct from_strip_points(std::span<const double> lambdas, TruncationPolicy policy = {});

  // sorted by increasing |gamma|
  const std::vector<BlaschkeZero>& zeros() const { return zeros_; }
  std::size_t origin_multiplicity() const { return origin_; }
  std::size_t size() const { return zeros_.size() + origin_; }
  // 2 * sum (1 - |gamma|), origin zeros included
  double K() const { return K_; }
  // sum of (1 - |gamma|) over zeros dropped by the truncation policy
  double tail_sum() const { return tail_; }
  // sum log(1/|gamma|) over the nonzero zeros
  double log_sum() const;
  std::vector<double> values() const;

 private:
  BlaschkeProduct() = default;
  void finish(TruncationPolicy policy);
  std::vector<BlaschkeZero> zeros_;
  std::size_t origin_ = 0;
  double K_ = 0.0;
  double tail_ = 0.0;
};

enum class SecondDerivativeMethod { PairSum, ProductRule, Auto };
inline constexpr std::size_t kPairSumLimit = 200;

cplx eval_beta(const BlaschkeProduct& b, const DiskPoint& w);
cplx eval_beta_prime(const BlaschkeProduct& b, const DiskPoint& w);
cplx eval_beta_second(const BlaschkeProduct& b, const DiskPoint& w,
                      SecondDerivativeMethod method = SecondDerivativeMethod::Auto);
cplx eval_beta(const BlaschkeProduct& b, cplx w);
cplx eval_beta_prime(const BlaschkeProduct& b, cplx w);
cplx eval_beta_second(const BlaschkeProduct& b, cplx w,
                      SecondDerivativeMethod method = SecondDerivativeMethod::Auto);

struct BoundViolation {
  std::string bound;
  double theta;  // witness z = e^{i theta}, or the zero itself for per-zero checks
  double lhs;
  double rhs;
};

struct BoundReport {
  std::size_t samples = 0;
  std::size_t excluded = 0;  // samples within 1e-3 of +-1
  // |beta'| <= 2K/|1-z^2|^2 and |beta''| <= 12K^2/|1-z^2|^4
  std::vector<BoundViolation> literal;
  // |1 - gamma z| >= |1 - z^2|/2 and 1 - gamma^2 <= 2(1 - |gamma|)
  std::vector<BoundViolation> ingredient;
  // |beta'| <= 4S/D^2 and |beta''| <= 16S^2/D^4 + 16S/D^3, S = sum(1 - gamma^2), D = |1 - z^2|
  std::vector<BoundViolation> chain;
  double worst_first_ratio = 0.0;   // max |beta'| / (2K/D^2)
  double worst_second_ratio = 0.0;  // max |beta''| / (12K^2/D^4)
  bool literal_holds() const { return literal.empty(); }
};

inline constexpr double kBoundExclusion = 1e-3;

BoundReport verify_bounds(const BlaschkeProduct& b, std::size_t samples);

// H(w) = (1 - w^2)^{4n} beta(w); n = 0 gives beta itself
class HFunction {
 public:
  HFunction(BlaschkeProduct b, int n);
  cplx eval(const DiskPoint& w) const;
  cplx d1(const DiskPoint& w) const;
  cplx d2(const DiskPoint& w) const;
  int n() const { return n_; }
  const BlaschkeProduct& product() const { return b_; }
  // disk sampler with both closed-form derivatives attached
  HolomorphicSampler sampler() const;

 private:
  BlaschkeProduct b_;
  int n_;
};

HFunction build_H(const BlaschkeProduct& b, int n);

}  // namespace plab
