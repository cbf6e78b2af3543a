#pragma once

#include <complex>

#include "plab/conformal.hpp"
#include "plab/holomorphic.hpp"
#include "plab/sampled.hpp"

namespace plab {

struct TransformValue {
  cplx value;
  double tail_budget;            // |f| at the window edge times the kernel mass outside it
  double discretization_budget;  // trapezoid error for poles at distance 1 - |Im z| from R
  bool degraded;                 // 1 - |Im z| < 4h
};

// F(z) = (1/pi) int f(t) / ((t - z)^2 + 1) dt by the trapezoid rule on f's grid
TransformValue cauchy_type_transform(const SampledFunction& f, const StripPoint& z);
HolomorphicSampler cauchy_transform_sampler(const SampledFunction& f);

struct StripNormGrid {
  double ladder_step = 1.0 / 64;  // lines y = 0, D, 2D, ..., 1 - D (sup is under-approximated)
  double half_width = 64.0;
  double x_step = 1.0 / 32;
};

struct StripNorm {
  double q;
  bool finite;
  double value;     // sup over lines of int |Re F|^q (q finite) or sup |Re F| (q = inf)
  double norm;      // value^(1/q), or value when q = inf
  double worst_line;
  double tail_budget;
};

StripNorm eq_strip_norm(const HolomorphicSampler& F, double q, const StripNormGrid& grid = {});

struct SidePair {
  double line_side;
  double circle_side;
  bool line_finite;
  bool circle_finite;
  double relative_gap;
};

// int_R |H(Phi(s+i))|^q ds  vs  (2/pi) int_{|z|=1} |H(z)|^q |dz| / |1 - z^2|   (H symmetric)
SidePair boundary_change_of_variables_check(const HolomorphicSampler& H, double q);

// The three boundary integrals that make F = H o Phi and F'' lie in E^q, in disk form:
//   value:  (2/pi) int |H|^q / |1-z^2|
//   second: (2/pi) int |H''(z) (pi^2/16) (1-z^2)^2|^q / |1-z^2|
//   first:  (2/pi) int |H'(z) (pi^2/8) z (1-z^2)|^q / |1-z^2|
// plus the same quantities computed on the line Im z = 1 for cross-checking.
struct TransportedIntegrals {
  double value, second, first;
  double line_value, line_second, line_first;
  double line_F2;  // int |F''(s+i)|^q ds itself
  bool finite;
};
TransportedIntegrals transported_integrals(const HolomorphicSampler& H, double q);

// The same three integrals with the prefactors written as rational functions of z:
//   (1/pi) int |H|^q / |1-z^2|
//   int |H''(z) pi i (z+1)(z-1) / (i(z+1) + (z-1))^2|^q / |1-z^2|
//   int |H'(z) (pi^2/2) i(z+1)(z-1)((z-1) - i(z+1)) / (i(z+1) + (z+1))^3|^q / |1-z^2|
// The second denominator vanishes at z = -i, so that integral diverges unless H'' does too.
struct RationalFormIntegrals {
  double value, second, first;
  bool finite;
};
RationalFormIntegrals rational_form_integrals(const HolomorphicSampler& H, double q);

struct BergmanGrid {
  double half_width = 40.0;
  double x_step = 1.0 / 16;
  int y_nodes = 32;  // Gauss-Legendre nodes per half strip
};

struct BergmanNorms {
  double strip_weighted_second_deriv;  // int_B (1-|y|)^{2q} |G''|^q
  double strip_plain;                  // int_B |G|^q
  double disk_weighted;                // int_D |G(Phi^{-1} w)|^q (1-|w|)^{2q-1}
  double truncation_budget;
  bool finite;
};
BergmanNorms bergman_norms(const HolomorphicSampler& G, double q, const BergmanGrid& grid = {});

struct MeanValueSides {
  double lhs;  // |G''(a)|^q
  double rhs;  // R^{-(2q+2)} int_{D(a,R)} |G|^q dA
};
MeanValueSides mean_value_second_derivative_check(const HolomorphicSampler& G, cplx a, double R, double q);

// Hoelder bound: (6/pi)^q (pi/(q'+1))^{q/q'}; 6/pi at q = 1, 12/pi at q = 2 (sharp for z^2)
double mean_value_constant_bound(double q);
// regression constants: twice the largest ratio seen on the probe family, q in {1, 2}
double pinned_mean_value_constant(double q);
double pinned_bergman_constant(double q);

}  // namespace plab
