#include "plab/spanning.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>
#include <tuple>

#include "plab/annihilator.hpp"
#include "plab/criterion.hpp"
#include "plab/errors.hpp"
#include "plab/fourier.hpp"

namespace plab {

namespace {

constexpr double pi = std::numbers::pi;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// singular values below this fraction of the largest are dropped before the L1 solve
constexpr double kSvdCut = 1e-14;

VectorXd real_vector(const SampledFunction& f) {
  VectorXd v(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) v[i] = f[i].real();
  return v;
}

MatrixXd translate_matrix(const SampledFunction& grid, const Kernel& k, const std::vector<double>& pts) {
  MatrixXd A(grid.size(), pts.size());
  for (std::size_t j = 0; j < pts.size(); ++j)
    for (std::size_t i = 0; i < grid.size(); ++i) A(i, j) = k.time_eval(grid.point(i) - pts[j]);
  return A;
}

double lp_norm(const VectorXd& r, double h, double p) {
  if (p == 1.0) return h * r.cwiseAbs().sum();
  return std::sqrt(h * r.squaredNorm());
}

ApproxResult solve_l2(const VectorXd& t, const MatrixXd& A, double h, const ApproxOptions& o) {
  const auto n = A.cols();
  MatrixXd G = h * (A.transpose() * A);
  G.diagonal().array() += o.ridge;
  VectorXd b = h * (A.transpose() * t);
  Eigen::LDLT<MatrixXd> ldlt(G);
  if (ldlt.info() != Eigen::Success) throw NumericalBudgetError("LDLT factorization of the Gram matrix failed");
  VectorXd c = ldlt.solve(b);
  VectorXd r = t - A * c;

  ApproxResult out{};
  out.N = static_cast<std::size_t>(n);
  out.error = lp_norm(r, h, 2.0);
  out.coefficients.assign(c.data(), c.data() + n);
  out.coefficient_norm = c.cwiseAbs().sum();
  out.solver.method = "normal equations + ridge, LDLT";
  out.solver.ridge = o.ridge;
  out.solver.rank_flag = ldlt.vectorD().minCoeff() < 10.0 * o.ridge;
  const double rn = std::sqrt(h) * r.norm();
  for (Eigen::Index j = 0; j < n; ++j) {
    double kn = std::sqrt(h) * A.col(j).norm();
    if (rn > 0.0 && kn > 0.0)
      out.solver.orthogonality = std::max(out.solver.orthogonality, std::abs(h * A.col(j).dot(r)) / (rn * kn));
  }
  return out;
}

// min h sum(u + v)  s.t.  A c + u - v = t,  u, v >= 0
// dual: max t.y  s.t.  A^T y = 0,  |y_i| <= h
// Mehrotra predictor-corrector; each Newton step reduces to (A^T D^-1 A) dc = ...
struct LpSolution {
  VectorXd c;
  int iterations;
  double dual_objective, primal_residual, dual_residual;
};

LpSolution lp_core(const VectorXd& t, const MatrixXd& A, double h, const ApproxOptions& o) {
  const Eigen::Index m = A.rows(), n = A.cols();
  const double tscale = std::max(1.0, t.cwiseAbs().maxCoeff());
  // centered start: u v = kappa^2 and u (h - y) = v (h + y) in every row
  const double kappa = std::max(t.cwiseAbs().maxCoeff(), 1e-12);
  VectorXd c = VectorXd::Zero(n);
  VectorXd root = (t.array().square() + 4.0 * kappa * kappa).sqrt();
  VectorXd u = 0.5 * (root + t), v = 0.5 * (root - t);
  VectorXd y = h * t.cwiseQuotient(root);

  auto max_step = [](const VectorXd& x, const VectorXd& dx) {
    double a = 1.0;
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if (dx[i] < 0.0) a = std::min(a, -x[i] / dx[i]);
    return a;
  };

  // |(A^T y)_j| is compared with its largest possible size h ||A_j||_1
  VectorXd colscale = h * A.cwiseAbs().colwise().sum().transpose();
  colscale = colscale.cwiseMax(1e-300);

  int it = 0;
  double P = 0, Dv = 0, rp_norm = 0, rd_norm = 0;
  for (;; ++it) {
    VectorXd su = h - y.array(), sv = h + y.array();
    VectorXd rp = t - A * c - u + v;
    VectorXd rd = -(A.transpose() * y);
    const double mu = (u.dot(su) + v.dot(sv)) / (2.0 * static_cast<double>(m));
    P = h * (u.sum() + v.sum());
    Dv = t.dot(y);
    rp_norm = rp.cwiseAbs().maxCoeff();
    rd_norm = n > 0 ? rd.cwiseAbs().cwiseQuotient(colscale).maxCoeff() : 0.0;
    const double gap = std::abs(P - Dv) / std::max(1.0, std::abs(P));
    if (gap <= o.lp_tolerance && rp_norm <= o.lp_tolerance * tscale && rd_norm <= o.lp_tolerance * tscale) break;
    if (it >= o.lp_max_iterations || !(mu > 0.0) || !std::isfinite(P)) {
      std::ostringstream msg;
      msg << "L1 interior point did not converge after " << it << " iterations: primal " << P << ", dual " << Dv
          << ", |r_p| " << rp_norm << ", |A^T y| (relative) " << rd_norm << ", mu " << mu;
      throw NumericalBudgetError(msg.str());
    }

    VectorXd D = u.cwiseQuotient(su) + v.cwiseQuotient(sv);
    VectorXd Dinv = D.cwiseInverse();
    MatrixXd M = A.transpose() * Dinv.asDiagonal() * A;
    M.diagonal().array() += 1e-14 * std::max(1.0, M.diagonal().maxCoeff());
    Eigen::LDLT<MatrixXd> ldlt(M);

    struct Step {
      VectorXd dc, dy, du, dv;
    };
    auto solve = [&](const VectorXd& ru, const VectorXd& rv) {
      VectorXd rho = rp - ru.cwiseQuotient(su) + rv.cwiseQuotient(sv);
      Step s;
      s.dc = n > 0 ? VectorXd(ldlt.solve(A.transpose() * rho.cwiseProduct(Dinv) - rd)) : VectorXd();
      s.dy = (rho - (n > 0 ? VectorXd(A * s.dc) : VectorXd::Zero(m))).cwiseProduct(Dinv);
      s.du = (ru + u.cwiseProduct(s.dy)).cwiseQuotient(su);
      s.dv = (rv - v.cwiseProduct(s.dy)).cwiseQuotient(sv);
      return s;
    };
    auto steps = [&](const Step& s) {
      double ap = std::min(max_step(u, s.du), max_step(v, s.dv));
      double ad = std::min(max_step(su, -s.dy), max_step(sv, s.dy));
      return std::pair{ap, ad};
    };

    Step aff = solve(-u.cwiseProduct(su), -v.cwiseProduct(sv));
    auto [ap, ad] = steps(aff);
    double mu_aff = ((u + ap * aff.du).dot(su - ad * aff.dy) + (v + ap * aff.dv).dot(sv + ad * aff.dy)) /
                    (2.0 * static_cast<double>(m));
    double sigma = std::pow(mu_aff / mu, 3);
    VectorXd ru = (sigma * mu - u.cwiseProduct(su).array()).matrix() + aff.du.cwiseProduct(aff.dy);
    VectorXd rv = (sigma * mu - v.cwiseProduct(sv).array()).matrix() - aff.dv.cwiseProduct(aff.dy);
    Step st = solve(ru, rv);
    std::tie(ap, ad) = steps(st);
    ap = std::min(1.0, 0.99 * ap);
    ad = std::min(1.0, 0.99 * ad);
    if (n > 0) c += ap * st.dc;
    u += ap * st.du;
    v += ap * st.dv;
    y += ad * st.dy;
  }

  return {c, it, Dv, rp_norm, rd_norm};
}

// the LP runs on an orthonormal basis of the numerical column space of A;
// near-collinear translates (dense log sets) otherwise make the Newton matrix singular
ApproxResult solve_l1(const VectorXd& t, const MatrixXd& A, double h, const ApproxOptions& o) {
  const auto n = A.cols();
  Eigen::BDCSVD<MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd& sv = svd.singularValues();
  const double cut = kSvdCut * sv[0];
  Eigen::Index r = 0;
  while (r < sv.size() && sv[r] > cut) ++r;
  LpSolution lp = lp_core(t, svd.matrixU().leftCols(r), h, o);
  VectorXd c = svd.matrixV().leftCols(r) * lp.c.cwiseQuotient(sv.head(r));

  ApproxResult out{};
  out.N = static_cast<std::size_t>(n);
  out.solver.method = "primal-dual interior point (Mehrotra) on the SVD column basis, rank " + std::to_string(r) +
                      " of " + std::to_string(n);
  out.solver.rank_flag = r < n;
  out.solver.ridge = cut;
  VectorXd res = t - A * c;
  out.error = lp_norm(res, h, 1.0);
  out.coefficients.assign(c.data(), c.data() + n);
  out.coefficient_norm = c.cwiseAbs().sum();
  out.solver.iterations = lp.iterations;
  out.solver.duality_gap = out.error - lp.dual_objective;
  out.solver.relative_gap = std::abs(out.solver.duality_gap) / std::max(1.0, out.error);
  out.solver.primal_residual = lp.primal_residual;
  out.solver.dual_residual = lp.dual_residual;
  return out;
}

}  // namespace

ApproxResult best_approx(const SampledFunction& target, const Kernel& k, const std::vector<double>& points,
                         const ApproxOptions& opts) {
  if (opts.p != 1.0 && opts.p != 2.0) throw PreconditionError("best_approx supports p = 1 and p = 2");
  if (points.size() > opts.max_points)
    throw PreconditionError("too many translates (" + std::to_string(points.size()) + " > " +
                            std::to_string(opts.max_points) + ")");
  for (double l : points) require_finite(l, "translate");
  const double h = target.step();
  VectorXd t = real_vector(target);
  if (points.empty()) {
    ApproxResult out{};
    out.error = lp_norm(t, h, opts.p);
    out.solver.method = "empty set";
    return out;
  }
  MatrixXd A = translate_matrix(target, k, points);
  return opts.p == 2.0 ? solve_l2(t, A, h, opts) : solve_l1(t, A, h, opts);
}

namespace {

struct Floor {
  double bound, budget;
};

std::optional<Floor> duality_floor(const SampledFunction& target, const Kernel& k, const DiscreteSet& s,
                                   const ApproxResult& r, double p) {
  if (!k.is_generator() || s.size() == 0 || classify(s).verdict != Verdict::Convergent) return std::nullopt;
  CertificateOptions co;
  co.step = target.step();
  // window: at least 32, and 16 past the outermost point, inside the target grid
  const double reach = std::max(std::abs(s.points().front()), std::abs(s.points().back()));
  co.half_width = std::min(std::max(32.0, std::ceil(reach) + 16.0), std::floor(target.half_width()));
  co.fft_size = next_pow2(std::max<std::size_t>(std::size_t{1} << 16, 8 * static_cast<std::size_t>(co.half_width / co.step)));
  co.compute_norms = false;
  co.probes.clear();
  AnnihilatorCertificate c = build_certificate(s, k, co);
  const auto& g = c.recovery.g;
  // g is zero outside its window; both grids share the step and the origin
  const std::ptrdiff_t off =
      static_cast<std::ptrdiff_t>(target.half_count()) - static_cast<std::ptrdiff_t>(g.half_count());
  if (off < 0) return std::nullopt;
  const double h = target.step();
  double pair = 0.0, gn = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double gi = g[i].real();
    pair += gi * target[static_cast<std::size_t>(off) + i].real();
    gn = p == 1.0 ? std::max(gn, std::abs(gi)) : gn + gi * gi;
  }
  pair *= h;
  gn = p == 1.0 ? gn : std::sqrt(h * gn);
  const auto& pts = s.points();
  double budget = 0.0;
  for (std::size_t j = 0; j < pts.size(); ++j) {
    double gk = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) gk += g[i].real() * k.time_eval(g.point(i) - pts[j]);
    budget += std::abs(r.coefficients[j]) * std::abs(gk * h);
  }
  return Floor{std::abs(pair) / gn, budget / gn};
}

void for_each_rung(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(err_mutex);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace

ApproxReport spanning_curve(const SampledFunction& target, const std::string& target_name, const Kernel& k,
                            const GrowthLaw& law, const std::vector<std::size_t>& ladder, const CurveOptions& opts) {
  std::vector<std::size_t> Ns = ladder;
  std::sort(Ns.begin(), Ns.end());
  Ns.erase(std::unique(Ns.begin(), Ns.end()), Ns.end());

  ApproxReport rep;
  rep.p = opts.approx.p;
  rep.target = target_name;
  rep.set_spec = to_spec(law);
  rep.kernel = k.name();
  rep.half_width = target.half_width();
  rep.step = target.step();
  rep.ladder.resize(Ns.size());

  std::vector<std::vector<double>> pts(Ns.size());
  std::vector<std::optional<DiscreteSet>> sets(Ns.size());
  for (std::size_t i = 0; i < Ns.size(); ++i)
    if (Ns[i] > 0) {
      sets[i] = DiscreteSet::from_law(law, Ns[i]);
      pts[i] = sets[i]->points();
    }

  for_each_rung(Ns.size(), opts.workers, [&](std::size_t i) {
    rep.ladder[i] = LadderEntry{best_approx(target, k, pts[i], opts.approx), std::nullopt, std::nullopt};
    rep.ladder[i].result.N = Ns[i];
  });

  // nested sets: the previous rung's coefficients (zero on the new points) stay admissible
  for (std::size_t i = 1; i < Ns.size(); ++i) {
    auto& cur = rep.ladder[i].result;
    const auto& prev = rep.ladder[i - 1].result;
    if (cur.error <= prev.error || pts[i - 1].empty()) continue;
    std::vector<double> c(pts[i].size(), 0.0);
    bool nested = true;
    for (std::size_t a = 0; a < pts[i - 1].size(); ++a) {
      auto it = std::find(pts[i].begin(), pts[i].end(), pts[i - 1][a]);
      if (it == pts[i].end()) {
        nested = false;
        break;
      }
      c[static_cast<std::size_t>(it - pts[i].begin())] = prev.coefficients[a];
    }
    if (!nested) continue;
    cur.coefficients = std::move(c);
    cur.error = prev.error;
    cur.coefficient_norm = prev.coefficient_norm;
    cur.solver.method += "; solver result worse than the previous rung, kept its coefficients";
  }

  if (opts.duality_floor)
    for_each_rung(Ns.size(), opts.workers, [&](std::size_t i) {
      if (!sets[i]) return;
      // coefficients follow the sorted point order used by best_approx
      if (auto f = duality_floor(target, k, *sets[i], rep.ladder[i].result, opts.approx.p)) {
        rep.ladder[i].lower_bound = f->bound;
        rep.ladder[i].lower_bound_budget = f->budget;
      }
    });
  return rep;
}

SampledFunction target_preset(const std::string& name, double half_width, double step) {
  if (name == "poisson-shift") return SampledFunction::sample_real([](double t) { return eval_poisson(t - 0.3); }, half_width, step);
  if (name == "indicator") {
    const double s = 0.25 * std::sqrt(2.0);
    return SampledFunction::sample_real(
        [s](double t) { return 0.5 * (std::erf((t + 1.0) / s) - std::erf((t - 1.0) / s)); }, half_width, step);
  }
  if (name == "gaussian") return SampledFunction::sample_real([](double t) { return std::exp(-t * t); }, half_width, step);
  throw PreconditionError("unknown target preset '" + name + "'");
}

std::vector<std::string> target_presets() { return {"poisson-shift", "indicator", "gaussian"}; }

TransferCheck convolution_transfer_check(const SampledFunction& f, const Kernel& k, const SampledFunction& h,
                                         double lambda) {
  if (!f.same_grid(h)) throw PreconditionError("f and h must share a grid");
  require_finite(lambda, "lambda");
  const std::size_t K = f.half_count(), N = f.size();
  const double s = f.step();
  // every kernel argument is (m s - lambda) for |m| <= 2K
  std::vector<double> kv(4 * K + 1);
  for (std::size_t i = 0; i < kv.size(); ++i)
    kv[i] = k.time_eval((static_cast<double>(i) - 2.0 * static_cast<double>(K)) * s - lambda);
  auto kat = [&](std::ptrdiff_t m) { return kv[static_cast<std::size_t>(m + 2 * static_cast<std::ptrdiff_t>(K))]; };

  double lhs = 0.0, mag = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    double inner = 0.0, inner_abs = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      const double v = kat(static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(j)) * h[j].real();
      inner += v;
      inner_abs += std::abs(v);
    }
    lhs += f[i].real() * inner * s;
    mag += std::abs(f[i].real()) * inner_abs * s;
  }
  lhs *= s;
  mag *= s;

  std::vector<cplx> rev(N);
  for (std::size_t j = 0; j < N; ++j) rev[j] = h[N - 1 - j];
  SampledFunction hr(s, K, std::move(rev));
  Convolution conv = convolve(hr, f);
  double rhs = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    rhs += conv.value[i].real() * kat(static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(K));
  rhs *= s;

  TransferCheck out{lhs, rhs, mag, 0.0, 0.0};
  out.relative_gap = std::abs(lhs - rhs) / std::max(mag, 1e-300);
  double kmax = 0.0;
  for (double x : kv) kmax = std::max(kmax, std::abs(x));
  out.budget = conv.dropped_mass * kmax;
  return out;
}

namespace {

double psi_ft(double xi) { return (1.0 + 4.0 * pi * pi * xi * xi) * std::exp(-2.0 * pi * std::abs(xi)); }

// inverse transform of a band-limited, edge-tapered spectrum onto [-T, T]
SampledFunction tapered_inverse(const std::function<double(double)>& spec, double T, double step, double taper,
                                double* band) {
  const std::size_t K = grid_half_count(T, step);
  const std::size_t M = next_pow2(2 * (2 * K + 1));
  const double dxi = 1.0 / (static_cast<double>(M) * step);
  const double nyq = 0.5 / step;
  const auto Kx = static_cast<std::size_t>(std::floor(nyq / dxi)) - 1;
  std::vector<cplx> v(2 * Kx + 1);
  for (std::size_t i = 0; i < v.size(); ++i) {
    double xi = (static_cast<double>(i) - static_cast<double>(Kx)) * dxi;
    double a = std::abs(xi) / nyq, w = 1.0;
    if (a > taper) w = 0.5 * (1.0 + std::cos(pi * (a - taper) / (1.0 - taper)));
    v[i] = spec(xi) * w;
  }
  *band = static_cast<double>(Kx) * dxi;
  auto out = inverse_ft(SampledFunction(dxi, Kx, std::move(v)), T, step);
  std::vector<cplx> re(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) re[i] = out[i].real();
  return SampledFunction(step, out.half_count(), std::move(re));
}

// ||a - b||_1 / ||a||_1 over |t| <= T, where b lives on the wider grid
double relative_l1_inner(const SampledFunction& a, const SampledFunction& b) {
  const std::size_t off = b.half_count() - a.half_count();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::abs(a[i].real() - b[off + i].real());
    den += std::abs(a[i].real());
  }
  return num / den;
}

}  // namespace

FactorizationReport factorization_check(const Kernel& k, const FactorizationOptions& o) {
  if (!k.is_generator()) throw PreconditionError("factorization needs a generator kernel");
  FactorizationReport r{};
  r.kernel = k.name();
  r.hhat0 = k.ft_eval(0.0) / psi_ft(0.0);
  r.hhat0_expected = k.ft_eval(0.0);

  const double T = o.half_width, T2 = 2.0 * o.half_width, s = o.step;
  const double nyq = 0.5 / s;
  double worst = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    double xi = nyq * i / 1000.0;
    worst = std::max(worst, std::abs(k.ft_eval(xi) / psi_ft(xi) - 1.0));
  }
  r.degenerate = worst <= 1e-12;

  auto psi = SampledFunction::sample_real(eval_psi, T2, s);
  auto kern_wide = SampledFunction::sample_real([&](double t) { return k.time_eval(t); }, T2, s);
  auto kern = SampledFunction::sample_real([&](double t) { return k.time_eval(t); }, T, s);

  if (r.degenerate) {
    // h is a delta; at band level h * psi = psi = k
    r.h_l2 = r.xh_l2 = r.xh_l2_half = std::numeric_limits<double>::infinity();
    r.norms_finite = false;
    r.reconstruction_rel_l1 = relative_l1_inner(kern, psi);
  } else {
    auto h = tapered_inverse([&](double xi) { return k.ft_eval(std::abs(xi)) / psi_ft(xi); }, T2, s, o.taper_start,
                             &r.band);
    double a = 0.0, b = 0.0, bh = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
      double x = h.point(i), v = h[i].real();
      a += v * v;
      b += x * x * v * v;
      if (std::abs(x) <= T) bh += x * x * v * v;
    }
    r.h_l2 = std::sqrt(s * a);
    r.xh_l2 = std::sqrt(s * b);
    r.xh_l2_half = std::sqrt(s * bh);
    r.norms_finite = std::isfinite(r.xh_l2) && (b - bh) <= 0.05 * b;
    auto hp = convolve(h, psi);
    r.reconstruction_rel_l1 = relative_l1_inner(kern, hp.value);
  }

  double band2 = 0.0;
  auto h2 = tapered_inverse(
      [&](double xi) { return std::exp(-2.0 * pi * std::abs(xi)) / (k.ft_eval(std::abs(xi)) * (1.0 + xi * xi)); },
      T2, s, o.taper_start, &band2);
  auto h2k = convolve(h2, kern_wide);
  auto ppp = SampledFunction::sample_real([](double t) { return pi * eval_phi_pp(t); }, T, s);
  r.dual_rel_l1 = relative_l1_inner(ppp, h2k.value);
  if (r.degenerate) r.band = band2;
  return r;
}

}  // namespace plab
