#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "plab/discrete_set.hpp"

namespace plab {

enum class Verdict { Divergent, Convergent, Boundary, Undetermined };
std::string to_string(Verdict v);

struct Interval {
  double lo;
  double hi;
};

struct CriterionReport {
  std::vector<std::pair<std::size_t, double>> partial_sums;  // (N, S_N), N doubling
  Verdict verdict = Verdict::Undetermined;
  double blaschke_sum = 0.0;            // +inf when Divergent, else the stored-points sum
  bool origin_excluded = false;
  std::optional<Interval> comparability_ratio;
  std::string certificate;              // comparison series behind the verdict
  std::optional<double> tail_bound;     // bound on the exp-sum over law indices past the stored points
  std::optional<double> limit;          // closed form of the full exp-sum, when known
};

// sum of exp(-pi |lambda| / 2) over the first N points in enumeration order
double exp_partial_sum(const DiscreteSet& s, std::size_t N);

CriterionReport classify(const DiscreteSet& s);

struct BlaschkeSum {
  double value;
  bool origin_excluded;
  std::size_t terms;
};
// sum of log(1/|Phi(lambda)|) over the nonzero points
BlaschkeSum blaschke_sum(const DiscreteSet& s);

// log(1/|Phi(lambda)|) computed without forming Phi: -log1p(-2/(e^{pi|lambda|/2}+1))
double log_inverse_phi_modulus(double lambda);

struct RatioCheck {
  std::optional<Interval> ratio;  // min/max of log(1/|Phi|) / exp(-pi|lambda|/2)
  bool origin_excluded;
  std::size_t used;
};
RatioCheck equivalence_check(const DiscreteSet& s);

// Upper bound for sum_{i >= from} exp(-pi |lambda_i| / 2) when the law certifies convergence.
std::optional<double> exp_tail_bound(const GrowthLaw& law, std::size_t from);
// exact value of the full sum when a closed form is known
std::optional<double> exp_sum_limit(const GrowthLaw& law);

}  // namespace plab
