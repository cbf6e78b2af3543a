#pragma once

#include <complex>

#include "plab/sampled.hpp"

namespace plab {

class StripPoint {
 public:
  // |Im z| < 1
  static StripPoint interior(cplx z);
  // |Im z| <= 1; tagged as boundary when |Im z| = 1
  static StripPoint closed(cplx z);

  cplx value() const { return z_; }
  bool on_boundary() const { return boundary_; }

 private:
  StripPoint(cplx z, bool b) : z_(z), boundary_(b) {}
  cplx z_;
  bool boundary_;
};

// A disk point carries 1 - w and 1 + w next to w, so that points very close to +-1
// keep their distance to the boundary (tanh rounds to 1 long before 1 - w underflows).
class DiskPoint {
 public:
  static DiskPoint interior(cplx w);   // |w| < 1
  static DiskPoint closed(cplx w);     // |w| <= 1
  static DiskPoint on_circle(double theta);
  // the real point sign*(1 - delta), 0 < delta <= 1, with exact complements
  static DiskPoint real_near_edge(int sign, double delta);

  cplx value() const { return w_; }
  cplx one_minus() const { return om_; }
  cplx one_plus() const { return op_; }
  cplx one_minus_sq() const { return om_ * op_; }  // 1 - w^2
  bool on_boundary() const { return boundary_; }

 private:
  friend DiskPoint phi_map(const StripPoint&);
  DiskPoint(cplx w, cplx om, cplx op, bool b) : w_(w), om_(om), op_(op), boundary_(b) {}
  cplx w_, om_, op_;
  bool boundary_;
};

// Phi(z) = (e^{pi z/2} - 1)/(e^{pi z/2} + 1) = tanh(pi z / 4)
DiskPoint phi_map(const StripPoint& z);
// (2/pi) log((1+w)/(1-w)), principal branch
StripPoint phi_inverse(const DiskPoint& w);

cplx phi(cplx z);
cplx phi_prime(cplx z);   // (pi/4)(1 - Phi^2)
cplx phi_second(cplx z);  // -(pi^2/8) Phi (1 - Phi^2)

}  // namespace plab
