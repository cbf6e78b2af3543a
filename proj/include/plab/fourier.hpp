#pragma once

#include <cstddef>

#include "plab/sampled.hpp"

// Convention everywhere: fhat(xi) = int f(t) exp(-2 pi i xi t) dt.

namespace plab {

struct SpectrumOptions {
  double max_frequency = 0.0;    // 0: everything below Nyquist
  std::size_t min_fft_size = 0;  // padding; sets the frequency step 1/(M h)
};

struct FourierTransform {
  SampledFunction spectrum;
  double tail_budget;      // window truncation, assuming |f| ~ 1/t^2 beyond T
  double aliasing_budget;  // largest |fhat| in the top eighth of the band
  std::size_t fft_size;
  double nyquist;
};

FourierTransform numeric_ft(const SampledFunction& f, const SpectrumOptions& opts = {});

// Inverse transform of a sampled spectrum onto the time grid [-T, T] step h.
SampledFunction inverse_ft(const SampledFunction& spectrum, double half_width, double step);

struct Convolution {
  SampledFunction value;  // same window as the inputs
  double dropped_mass;    // L1 mass of the linear convolution outside the window
};

// zero-padded linear convolution, cropped back to the common window
Convolution convolve(const SampledFunction& f, const SampledFunction& g);

std::size_t next_pow2(std::size_t n);

}  // namespace plab
