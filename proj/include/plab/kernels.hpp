#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "plab/errors.hpp"

namespace plab {

double eval_poisson(double t);
double eval_poisson_dd(double t);
double eval_psi(double t);
double eval_exp_kernel(double t);

struct QuadratureValue {
  double value;
  double error;  // quadrature estimate plus the analytic tail bound
};

// (P * exp(-2 pi |.|))(t). Throws NumericalBudgetError if the estimate exceeds tol * value.
QuadratureValue eval_phi_pp_checked(double t, double tol = 1e-12);
double eval_phi_pp(double t, double tol = 1e-12);

// integration range for eval_phi_pp and its tail constant exp(-2 pi S) / pi^2
inline constexpr double kPhiPPCutoff = 8.0;
double phi_pp_tail_bound();

enum class KernelKind { Poisson, PoissonSecondDiff, Psi, ExpKernel, PhiPP, QuasiPoisson };

std::string to_string(KernelKind k);

// ft = m(|xi|) exp(-2 pi |xi|); checked against
//   A exp(-2 pi|xi|) / w(xi) <= ft <= B exp(-2 pi|xi|) w(xi),  w = 1 (n = 0), 1 + xi^(2n) (n >= 1)
struct MultiplierSpec {
  std::string label;
  std::function<double(double)> m;
  std::function<double(double)> m_deriv;
  int n = 0;
};

struct EnvelopeCertificate {
  double A;  // inf m * w
  double B;  // sup m / w
  double C;  // sup |m' - 2 pi m| / w  (derivative envelope)
  double xi_max;
  std::size_t samples;
};

class HypothesisViolation : public PreconditionError {
 public:
  HypothesisViolation(const std::string& clause, double xi)
      : PreconditionError("quasi-Poisson hypothesis violated (" + clause +
                          ") at xi = " + std::to_string(xi)),
        clause_(clause),
        xi_(xi) {}
  const std::string& clause() const { return clause_; }
  double xi() const { return xi_; }

 private:
  std::string clause_;
  double xi_;
};

struct QuasiPoissonOptions {
  double xi_max = 16.0;
  std::size_t samples = 4097;
  double growth_ratio = 2.0;  // tail-half / head-half ratio that counts as unbounded
};

class Kernel {
 public:
  static Kernel poisson();
  static Kernel poisson_dd();
  static Kernel psi();
  static Kernel exp_kernel();
  static Kernel phi_pp();

  KernelKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  double time_eval(double t) const { return time_(t); }
  double ft_eval(double xi) const { return ft_(xi); }
  int order() const { return n_; }
  const std::optional<EnvelopeCertificate>& envelope() const { return envelope_; }
  // generators in the quasi-Poisson class (positive transform with exp envelope)
  bool is_generator() const { return kind_ != KernelKind::PoissonSecondDiff; }

 private:
  friend Kernel make_quasi_poisson(MultiplierSpec, const QuasiPoissonOptions&);
  Kernel(KernelKind k, std::string name, std::function<double(double)> time,
         std::function<double(double)> ft)
      : kind_(k), name_(std::move(name)), time_(std::move(time)), ft_(std::move(ft)) {}

  KernelKind kind_;
  std::string name_;
  std::function<double(double)> time_;
  std::function<double(double)> ft_;
  int n_ = 0;
  std::optional<EnvelopeCertificate> envelope_;
};

double analytic_ft(const Kernel& k, double xi);

Kernel make_quasi_poisson(MultiplierSpec spec, const QuasiPoissonOptions& opts = {});

// poisson | poisson-dd | psi | exp | phipp | quasi:one | quasi:sin,a=2,b=1 | quasi:poly,n=1
Kernel kernel_from_spec(const std::string& spec);

}  // namespace plab
