#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "plab/discrete_set.hpp"
#include "plab/kernels.hpp"
#include "plab/sampled.hpp"

namespace plab {

struct ApproxOptions {
  double p = 2.0;              // 1 or 2
  double ridge = 1e-10;        // epsilon I on the normal equations (p = 2)
  std::size_t max_points = 512;
  double lp_tolerance = 1e-9;  // relative duality gap and residuals (p = 1)
  int lp_max_iterations = 200;
};

struct SolverInfo {
  std::string method;
  int iterations = 0;
  double duality_gap = 0.0;      // primal - dual objective, p = 1
  double relative_gap = 0.0;
  double primal_residual = 0.0;  // p = 1: max |t - Ac - u + v|
  double dual_residual = 0.0;    // p = 1: max_j |(A^T y)_j| / (h ||A_j||_1)
  double orthogonality = 0.0;    // p = 2: max |<r, k_lambda>| / (||r|| ||k_lambda||)
  double ridge = 0.0;            // p = 2: epsilon; p = 1: singular value cut
  bool rank_flag = false;        // pivots below ridge: the Gram matrix is numerically singular
};

struct ApproxResult {
  std::size_t N;
  double error;             // ||target - sum c k(. - lambda)||_p on the grid
  double coefficient_norm;  // ||c||_1
  std::vector<double> coefficients;
  SolverInfo solver;
};

// columns k(t - lambda) on the target's grid
ApproxResult best_approx(const SampledFunction& target, const Kernel& k, const std::vector<double>& points,
                         const ApproxOptions& opts = {});

struct LadderEntry {
  ApproxResult result;
  std::optional<double> lower_bound;         // |<g, target>| / ||g||_q
  std::optional<double> lower_bound_budget;  // sum |c| |<g, k_lambda>| / ||g||_q
};

struct ApproxReport {
  double p;
  std::string target;
  std::string set_spec;
  std::string kernel;
  double half_width, step;
  std::vector<LadderEntry> ladder;  // ordered by N
};

struct CurveOptions {
  ApproxOptions approx;
  bool duality_floor = true;  // build a certificate per N when the set is Convergent
  unsigned workers = 1;
};

// best_approx on the first N points of the law, for each N in the ladder
ApproxReport spanning_curve(const SampledFunction& target, const std::string& target_name, const Kernel& k,
                            const GrowthLaw& law, const std::vector<std::size_t>& ladder,
                            const CurveOptions& opts = {});

// Target presets: "poisson-shift" P(t - 0.3), "indicator" (erf-mollified 1_[-1,1], sigma 0.25), "gaussian" exp(-t^2)
SampledFunction target_preset(const std::string& name, double half_width, double step);
std::vector<std::string> target_presets();

struct TransferCheck {
  double lhs;  // int f(t) (k*h)(t - lambda) dt, direct double sum
  double rhs;  // int (h~ * f)(x) k(x - lambda) dx, FFT convolution
  double magnitude;     // int int |f(t) k(t - s - lambda) h(s)|, the scale when f or h changes sign
  double relative_gap;  // |lhs - rhs| / magnitude
  double budget;  // dropped convolution mass plus window tails
};

TransferCheck convolution_transfer_check(const SampledFunction& f, const Kernel& k, const SampledFunction& h,
                                         double lambda);

struct FactorizationOptions {
  double half_width = 200.0;
  double step = 1.0 / 32;
  double taper_start = 0.75;  // fraction of Nyquist where the raised-cosine edge begins
};

struct FactorizationReport {
  std::string kernel;
  double hhat0;                 // k^(0) / psi^(0)
  double hhat0_expected;        // k^(0)
  bool degenerate;              // k^/psi^ == 1 on the band: h is a delta
  double h_l2, xh_l2, xh_l2_half;
  bool norms_finite;            // x h stops accumulating L2 mass between T/2 and T
  double reconstruction_rel_l1; // ||k - h * psi||_1 / ||k||_1
  double dual_rel_l1;           // ||pi phi_pp - h2 * k||_1 / ||pi phi_pp||_1
  double band;
};

FactorizationReport factorization_check(const Kernel& k, const FactorizationOptions& opts = {});

}  // namespace plab
