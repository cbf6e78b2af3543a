#include "plab/conformal.hpp"

#include <cmath>
#include <numbers>

#include "plab/errors.hpp"

namespace plab {

namespace {
constexpr double pi = std::numbers::pi;
constexpr double kEdge = 1e-14;

void require_finite(cplx z, const char* what) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw PreconditionError(std::string(what) + ": non-finite point");
}
}  // namespace

StripPoint StripPoint::interior(cplx z) {
  require_finite(z, "strip point");
  if (!(std::abs(z.imag()) < 1.0)) throw PreconditionError("strip point needs |Im z| < 1");
  return {z, false};
}

StripPoint StripPoint::closed(cplx z) {
  require_finite(z, "strip point");
  double y = std::abs(z.imag());
  if (y > 1.0 + kEdge)
    throw PreconditionError("point outside the closed strip |Im z| <= 1 (Phi has poles at +-2i)");
  return {z, y >= 1.0 - kEdge};
}

DiskPoint DiskPoint::interior(cplx w) {
  require_finite(w, "disk point");
  if (!(std::abs(w) < 1.0)) throw PreconditionError("disk point needs |w| < 1");
  return {w, 1.0 - w, 1.0 + w, false};
}

DiskPoint DiskPoint::closed(cplx w) {
  require_finite(w, "disk point");
  double r = std::abs(w);
  if (r > 1.0 + kEdge) throw PreconditionError("point outside the closed disk");
  return {w, 1.0 - w, 1.0 + w, r >= 1.0 - kEdge};
}

DiskPoint DiskPoint::on_circle(double theta) {
  double s = std::sin(theta), h = std::sin(theta / 2), c = std::cos(theta / 2);
  return {std::polar(1.0, theta), cplx(2 * h * h, -s), cplx(2 * c * c, s), true};
}

DiskPoint DiskPoint::real_near_edge(int sign, double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw PreconditionError("real_near_edge needs 0 < delta <= 1");
  double w = sign > 0 ? 1.0 - delta : delta - 1.0;
  return sign > 0 ? DiskPoint{w, delta, 2.0 - delta, false} : DiskPoint{w, 2.0 - delta, delta, false};
}

DiskPoint phi_map(const StripPoint& p) {
  const cplx z = p.value();
  const cplx u = pi * z / 4.0;
  cplx om, op;
  if (z.real() >= 0.0) {
    cplx e = std::exp(-2.0 * u);
    om = 2.0 * e / (1.0 + e);
    op = 2.0 / (1.0 + e);
  } else {
    cplx e = std::exp(2.0 * u);
    om = 2.0 / (e + 1.0);
    op = 2.0 * e / (e + 1.0);
  }
  return {std::tanh(u), om, op, p.on_boundary()};
}

StripPoint phi_inverse(const DiskPoint& w) {
  if (w.on_boundary() || std::abs(w.one_minus()) == 0.0 || std::abs(w.one_plus()) == 0.0)
    throw PreconditionError("phi_inverse needs |w| < 1");
  cplx z;
  if (std::abs(w.value()) < 0.5)
    z = (4.0 / pi) * std::atanh(w.value());
  else
    z = (2.0 / pi) * std::log(w.one_plus() / w.one_minus());
  return StripPoint::interior(z);
}

cplx phi(cplx z) { return std::tanh(pi * z / 4.0); }

cplx phi_prime(cplx z) {
  auto w = phi_map(StripPoint::closed(z));
  return (pi / 4.0) * w.one_minus_sq();
}

cplx phi_second(cplx z) {
  auto w = phi_map(StripPoint::closed(z));
  return -(pi * pi / 8.0) * w.value() * w.one_minus_sq();
}

}  // namespace plab
