#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace plab {

using cplx = std::complex<double>;

// Values on the grid -T, -T+h, ..., T with T = K*h. The half count K is stored
// instead of T so that grid arithmetic stays in integers.
class SampledFunction {
 public:
  SampledFunction(double step, std::size_t half_count, std::vector<cplx> values);

  static SampledFunction sample(const std::function<cplx(double)>& fn, double half_width,
                                double step);
  static SampledFunction sample_real(const std::function<double(double)>& fn,
                                     double half_width, double step);

  double step() const { return step_; }
  std::size_t half_count() const { return half_count_; }
  double half_width() const { return step_ * static_cast<double>(half_count_); }
  std::size_t size() const { return values_.size(); }
  double point(std::size_t i) const {
    return (static_cast<double>(i) - static_cast<double>(half_count_)) * step_;
  }
  std::span<const cplx> values() const { return values_; }
  cplx operator[](std::size_t i) const { return values_[i]; }

  bool same_grid(const SampledFunction& other) const;
  SampledFunction scaled(cplx c) const;
  std::vector<double> real_part() const;
  double max_abs() const;
  double max_imag() const;

 private:
  double step_;
  std::size_t half_count_;
  std::vector<cplx> values_;
};

// throws PreconditionError unless half_width is an integer multiple of step
std::size_t grid_half_count(double half_width, double step);

// h * sum f g (bilinear, no conjugation)
cplx grid_pairing(const SampledFunction& f, const SampledFunction& g);

// (h sum |f|^p)^(1/p); p = inf gives the max modulus
double grid_norm(const SampledFunction& f, double p);

}  // namespace plab
