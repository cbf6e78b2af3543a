#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "plab/blaschke.hpp"
#include "plab/criterion.hpp"
#include "plab/discrete_set.hpp"
#include "plab/kernels.hpp"
#include "plab/sampled.hpp"
#include "plab/strip_norms.hpp"

namespace plab {

struct CertificateOptions {
  double q = std::numeric_limits<double>::infinity();
  int n = 1;
  double half_width = 32.0;  // real-axis window for F and g
  double step = 1.0 / 64;
  std::size_t fft_size = std::size_t{1} << 16;
  double snr = 1e3;              // band edge: |F^| >= snr * noise floor
  double band_tolerance = 1e-3;  // relative to sup|F|; larger truncation budgets are fatal
  // admits Boundary and Undetermined sets; Divergent sets are always refused
  bool override_verdict = false;
  std::vector<double> probes{0.0, 1.0, -1.0, 0.5, -0.5, 3.0, -3.0};
  StripNormGrid norm_grid{};
  bool compute_norms = true;
};

struct Recovery {
  SampledFunction g;
  double band = 0.0;                // Xi
  double noise_floor = 0.0;         // max |F^| in the top quarter of the band
  double truncation_budget = 0.0;   // int_{|xi| > Xi} |F^|, bounds the pairing error from the cut
  double sup = 0.0;
  double max_imag = 0.0;
};

struct PairingRow {
  double lambda;
  double pairing;   // <g, k(. - lambda)>
  double F;         // F(lambda)
  double abs_error;
  double rel_error; // abs_error / max(|F(lambda)|, sup|F| on R)
  double budget;    // band cut plus window tails
};

struct Witness {
  double mu;
  double value;  // |F(mu)|
};

struct AnnihilatorCertificate {
  DiscreteSet set;
  Kernel kernel;
  CertificateOptions options;
  Verdict verdict;
  BlaschkeProduct blaschke;
  double blaschke_tail;  // sum (1 - |gamma|) over dropped zeros
  HFunction H;
  HolomorphicSampler F;
  HolomorphicSampler F2;  // F''
  double sup_F_real;
  Recovery recovery;
  std::vector<std::pair<double, double>> analytic_residuals;  // (lambda, |F(lambda)|)
  std::vector<PairingRow> quadrature_residuals;
  Witness witness;
  StripNorm norm_F;
  StripNorm norm_F2;
};

// F = H o Phi with H = (1 - w^2)^{4n} beta, beta vanishing on Phi(s)
AnnihilatorCertificate build_certificate(const DiscreteSet& s, const Kernel& k, const CertificateOptions& opts = {});

// |F(lambda)|
double residual_analytic(const AnnihilatorCertificate& c, double lambda);

// g with g * k = F on the real axis: g^ = F^ / k^ on the certified band
Recovery recover_g(const HolomorphicSampler& F, const Kernel& k, const CertificateOptions& opts);

// h sum g(t) k(t - lambda) over the window, with its error budget
PairingRow quadrature_pairing(const AnnihilatorCertificate& c, const SampledFunction& g, double lambda);

struct CertificateThresholds {
  double analytic = 1e-10;
  double pairing_rel = 1e-3;
  double nontrivial = 0.0;  // witness must exceed this
};

struct VerificationReport {
  bool valid = true;
  std::vector<std::string> failures;  // failing components
  double max_analytic_residual = 0.0;
  double max_pairing_error = 0.0;
  double max_pairing_rel_error = 0.0;
  std::vector<PairingRow> rows;
  Witness witness{};
  double norm_F = 0.0;
  double norm_F2 = 0.0;
};

VerificationReport verify_certificate(const AnnihilatorCertificate& c, const std::vector<double>& probes,
                                      const CertificateThresholds& th = {});
// same, with g replaced (tampering experiments)
VerificationReport verify_certificate(const AnnihilatorCertificate& c, const SampledFunction& g,
                                      const std::vector<double>& probes, const CertificateThresholds& th = {});

}  // namespace plab
