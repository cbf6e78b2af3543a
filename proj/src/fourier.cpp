#include "plab/fourier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <numbers>
#include <vector>

#include "plab/errors.hpp"

namespace plab {

namespace {

std::mutex planner_mutex;  // FFTW planner is not reentrant

void fft_inplace(std::vector<cplx>& a, int sign) {
  auto* p = reinterpret_cast<fftw_complex*>(a.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex);
    plan = fftw_plan_dft_1d(static_cast<int>(a.size()), p, p, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(planner_mutex);
  fftw_destroy_plan(plan);
}

cplx unit_phase(std::int64_t num, std::int64_t M, int sign) {
  std::int64_t r = ((num % M) + M) % M;
  double a = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(M);
  return {std::cos(a), sign * std::sin(a)};
}

// out_k = dx * sum_j w_j v_j exp(sign 2 pi i x_j y_k),
// x_j = (j - Kx) dx, y_k = (k - Ky) / (M dx), trapezoid weights w.
// Every phase is an exact rational multiple of 2 pi with denominator M.
std::vector<cplx> grid_transform(std::span<const cplx> v, std::int64_t Kx, double dx, int sign,
                                 std::int64_t M, std::int64_t Ky) {
  const std::int64_t N = static_cast<std::int64_t>(v.size());
  std::vector<cplx> a(static_cast<std::size_t>(M), cplx(0.0));
  for (std::int64_t j = 0; j < N; ++j) {
    double w = (j == 0 || j == N - 1) ? 0.5 : 1.0;
    a[j] = w * v[j] * unit_phase(-j * Ky, M, sign);
  }
  fft_inplace(a, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD);
  std::vector<cplx> out(static_cast<std::size_t>(2 * Ky + 1));
  for (std::int64_t k = 0; k <= 2 * Ky; ++k)
    out[k] = dx * a[k % M] * unit_phase(-Kx * k + Kx * Ky, M, sign);
  return out;
}

}  // namespace

std::size_t next_pow2(std::size_t n) {
  std::size_t m = 1;
  while (m < n) m <<= 1;
  return m;
}

FourierTransform numeric_ft(const SampledFunction& f, const SpectrumOptions& opts) {
  const double h = f.step();
  const std::size_t M = next_pow2(std::max(f.size(), opts.min_fft_size));
  const double dxi = 1.0 / (static_cast<double>(M) * h);
  const double nyquist = 0.5 / h;
  const std::int64_t Kfull = static_cast<std::int64_t>(M / 2) - 1;
  if (opts.max_frequency > nyquist * (1.0 + 1e-12))
    throw PreconditionError("grid too coarse for requested band: need h <= " +
                            std::to_string(0.5 / opts.max_frequency));

  auto full = grid_transform(f.values(), static_cast<std::int64_t>(f.half_count()), h, -1,
                             static_cast<std::int64_t>(M), Kfull);
  double alias = 0.0;
  for (std::int64_t k = 0; k <= 2 * Kfull; ++k)
    if (std::abs(static_cast<double>(k - Kfull)) * dxi >= 0.875 * nyquist)
      alias = std::max(alias, std::abs(full[k]));

  std::int64_t K = Kfull;
  if (opts.max_frequency > 0.0)
    K = std::min<std::int64_t>(Kfull, static_cast<std::int64_t>(opts.max_frequency / dxi));
  if (K < 1) throw PreconditionError("requested band narrower than one frequency step");
  std::vector<cplx> spec(full.begin() + (Kfull - K), full.begin() + (Kfull + K + 1));

  double tail = f.half_width() * (std::abs(f[0]) + std::abs(f[f.size() - 1]));
  return {SampledFunction(dxi, static_cast<std::size_t>(K), std::move(spec)), tail, alias, M,
          nyquist};
}

SampledFunction inverse_ft(const SampledFunction& spectrum, double half_width, double step) {
  const std::size_t Kt = grid_half_count(half_width, step);
  const double m = 1.0 / (spectrum.step() * step);
  const double mr = std::round(m);
  const std::size_t need = std::max(spectrum.size(), 2 * Kt + 1);
  if (std::abs(m - mr) <= 1e-9 * m && mr >= static_cast<double>(need)) {
    auto v = grid_transform(spectrum.values(), static_cast<std::int64_t>(spectrum.half_count()),
                            spectrum.step(), +1, static_cast<std::int64_t>(mr),
                            static_cast<std::int64_t>(Kt));
    return SampledFunction(step, Kt, std::move(v));
  }
  // incommensurate grids: direct trapezoid sum
  const double work = static_cast<double>(spectrum.size()) * static_cast<double>(2 * Kt + 1);
  if (work > 5e8) throw PreconditionError("inverse_ft: grids incommensurate and too large");
  std::vector<cplx> v(2 * Kt + 1);
  const std::size_t N = spectrum.size();
  for (std::size_t i = 0; i < v.size(); ++i) {
    double t = (static_cast<double>(i) - static_cast<double>(Kt)) * step;
    cplx s = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      double w = (j == 0 || j == N - 1) ? 0.5 : 1.0;
      s += w * spectrum[j] * std::polar(1.0, 2.0 * std::numbers::pi * spectrum.point(j) * t);
    }
    v[i] = s * spectrum.step();
  }
  return SampledFunction(step, Kt, std::move(v));
}

Convolution convolve(const SampledFunction& f, const SampledFunction& g) {
  if (!f.same_grid(g)) throw PreconditionError("convolve: grids differ");
  const std::size_t N = f.size(), K = f.half_count();
  const std::size_t M = next_pow2(2 * N - 1);
  std::vector<cplx> a(M, 0.0), b(M, 0.0);
  std::copy(f.values().begin(), f.values().end(), a.begin());
  std::copy(g.values().begin(), g.values().end(), b.begin());
  fft_inplace(a, FFTW_FORWARD);
  fft_inplace(b, FFTW_FORWARD);
  for (std::size_t i = 0; i < M; ++i) a[i] *= b[i];
  fft_inplace(a, FFTW_BACKWARD);
  const double scale = f.step() / static_cast<double>(M);
  // full[m] sits at t = (m - 2K) h; the window keeps m = K .. 3K
  std::vector<cplx> out(N);
  double dropped = 0.0;
  for (std::size_t m = 0; m < 2 * N - 1; ++m) {
    cplx v = a[m] * scale;
    if (m >= K && m <= 3 * K)
      out[m - K] = v;
    else
      dropped += std::abs(v) * f.step();
  }
  return {SampledFunction(f.step(), K, std::move(out)), dropped};
}

}  // namespace plab
