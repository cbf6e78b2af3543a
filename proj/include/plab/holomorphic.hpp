#pragma once

#include <functional>
#include <span>

#include "plab/sampled.hpp"

namespace plab {

enum class Domain { Strip, Disk, Plane };

struct DerivativeEstimate {
  cplx value;
  double error;
};

class HolomorphicSampler {
 public:
  using Fn = std::function<cplx(cplx)>;

  // symmetric: F(conj z) = conj F(z); checked on sample pairs, PreconditionError otherwise
  HolomorphicSampler(Fn f, Domain domain, bool symmetric = false);

  // closed-form derivative of order 1 or 2
  HolomorphicSampler& with_derivative(int order, Fn df);

  cplx operator()(cplx z) const { return f_(z); }
  Domain domain() const { return domain_; }
  bool symmetric() const { return symmetric_; }
  bool has_analytic(int order) const;

  // closed form when registered, Cauchy integral otherwise
  DerivativeEstimate derivative(cplx z, int order) const;
  // trapezoid rule on a circle; radius 0 picks half the distance to the boundary (capped)
  DerivativeEstimate cauchy_derivative(cplx z, int order, double radius = 0.0) const;

  double distance_to_boundary(cplx z) const;
  double symmetry_defect(std::span<const cplx> points) const;

  // the order-th derivative as a sampler of its own (symmetry is inherited)
  HolomorphicSampler derivative_sampler(int order) const;

 private:
  Fn f_;
  Fn d1_, d2_;
  Domain domain_;
  bool symmetric_;
};

}  // namespace plab
