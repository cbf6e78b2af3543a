#include "plab/sampled.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "plab/errors.hpp"

namespace plab {

SampledFunction::SampledFunction(double step, std::size_t half_count, std::vector<cplx> values)
    : step_(step), half_count_(half_count), values_(std::move(values)) {
  if (!(step > 0.0) || !std::isfinite(step)) throw PreconditionError("grid step must be positive");
  if (half_count == 0) throw PreconditionError("grid window must be nonempty");
  if (values_.size() != 2 * half_count + 1)
    throw PreconditionError("sample count " + std::to_string(values_.size()) +
                            " does not match 2K+1 with K=" + std::to_string(half_count));
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (!std::isfinite(values_[i].real()) || !std::isfinite(values_[i].imag()))
      throw PreconditionError("non-finite sample at index " + std::to_string(i));
}

std::size_t grid_half_count(double half_width, double step) {
  if (!(step > 0.0) || !(half_width > 0.0) || !std::isfinite(half_width))
    throw PreconditionError("grid needs T > 0 and h > 0");
  double k = half_width / step;
  double r = std::round(k);
  if (std::abs(k - r) > 1e-9 * std::max(1.0, k))
    throw PreconditionError("window half-width T must be an integer multiple of step h");
  return static_cast<std::size_t>(r);
}

SampledFunction SampledFunction::sample(const std::function<cplx(double)>& fn, double half_width,
                                        double step) {
  std::size_t K = grid_half_count(half_width, step);
  std::vector<cplx> v(2 * K + 1);
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = fn((static_cast<double>(i) - static_cast<double>(K)) * step);
  return SampledFunction(step, K, std::move(v));
}

SampledFunction SampledFunction::sample_real(const std::function<double(double)>& fn,
                                             double half_width, double step) {
  return sample([&](double t) { return cplx(fn(t), 0.0); }, half_width, step);
}

bool SampledFunction::same_grid(const SampledFunction& o) const {
  return half_count_ == o.half_count_ && std::abs(step_ - o.step_) <= 1e-15 * step_;
}

SampledFunction SampledFunction::scaled(cplx c) const {
  std::vector<cplx> v(values_);
  for (auto& x : v) x *= c;
  return SampledFunction(step_, half_count_, std::move(v));
}

std::vector<double> SampledFunction::real_part() const {
  std::vector<double> r(values_.size());
  std::transform(values_.begin(), values_.end(), r.begin(), [](cplx x) { return x.real(); });
  return r;
}

double SampledFunction::max_abs() const {
  double m = 0.0;
  for (auto x : values_) m = std::max(m, std::abs(x));
  return m;
}

double SampledFunction::max_imag() const {
  double m = 0.0;
  for (auto x : values_) m = std::max(m, std::abs(x.imag()));
  return m;
}

cplx grid_pairing(const SampledFunction& f, const SampledFunction& g) {
  if (!f.same_grid(g)) throw PreconditionError("pairing needs identical grids");
  cplx s = 0.0;
  auto a = f.values(), b = g.values();
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s * f.step();
}

double grid_norm(const SampledFunction& f, double p) {
  if (std::isinf(p)) return f.max_abs();
  if (!(p >= 1.0)) throw PreconditionError("grid norm needs p >= 1");
  double s = 0.0;
  for (auto x : f.values()) s += std::pow(std::abs(x), p);
  return std::pow(s * f.step(), 1.0 / p);
}

}  // namespace plab
