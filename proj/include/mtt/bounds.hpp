#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "mtt/errors.hpp"
#include "mtt/linalg.hpp"
#include "mtt/rng.hpp"

namespace mtt {

// Regularity constants of the task family over the working domain:
// risk cap, Lipschitz and smoothness constants, Hessian Lipschitz constant,
// and the oracle/task gradient variance caps.
struct SmoothnessConstants {
  double delta = 0.0;          // max risk on the domain
  double lipschitz_l = 1.0;    // L
  double smooth_mu = 1.0;      // mu
  double hessian_lip = 0.0;    // mu_H
  double grad_var_data = 0.0;  // V_d, per-call gradient-oracle variance trace
  double grad_var_task = 0.0;  // V_t, between-task gradient variance trace
  double hess_var = 0.0;       // V_h, Hessian-oracle variance

  void validate() const {
    if (smooth_mu <= 0.0) throw AssumptionError("SmoothnessConstants: smooth_mu must be > 0");
    if (delta < 0 || lipschitz_l < 0 || hessian_lip < 0 || grad_var_data < 0 ||
        grad_var_task < 0 || hess_var < 0)
      throw AssumptionError("SmoothnessConstants: negative constant");
  }
};

struct SgdSchedule {
  long long t_train = 0;
  long long t_test = 0;
  int m = 1;          // tasks sampled per meta-training step
  int n = 1;          // oracle calls per half-batch / per test step
  int d_hessian = 0;  // Hessian-oracle calls per task per step
  double lr_train = 0.0;
  double lr_test = 0.0;
  double alpha = 0.0;

  void validate() const {
    if (t_train < 0 || t_test < 0) throw AssumptionError("SgdSchedule: negative step count");
    if (m < 1 || n < 1) throw AssumptionError("SgdSchedule: m and n must be >= 1");
    if (d_hessian < 0) throw AssumptionError("SgdSchedule: negative d_hessian");
    if (alpha < 0.0) throw AssumptionError("SgdSchedule: negative alpha");
  }
};

// Inputs of the closed-form statistical-error bounds for the linear-regression
// estimators. Population functionals of the task distribution plus the
// sub-Gaussian feature constants.
struct LinRegBoundInputs {
  double q_norm_bound = 0.0;        // beta, ||Q|| <= beta over tasks
  double tau = 0.0;                 // bound on ||theta_g - theta*_pre||
  double tau_prime = 0.0;           // bound on ||theta_g - theta*(alpha)||
  double eta = 0.0;                 // bound on ||theta_g||
  double xi = 0.0;                  // bound on ||x||
  double phi = 0.0;                 // bound on |eps|
  double subgauss_k = 1.0;          // K
  double univ_c = 1.0;              // universal constant of the covariance bound
  int p = 1;
  double omega = 1.0;               // log factor (see omega_default_*)
  double var_q_norm = 0.0;          // ||Var[Q]||
  double var_qtheta_trace = 0.0;    // tr Var[Q theta_g]
  double var_s_norm = 0.0;          // ||Var[S(alpha)]||
  double var_stheta_trace = 0.0;    // tr Var[S(alpha) theta_g]
  double noise_weighted_trace = 0.0;  // tr E[sigma^2 Q]
  double lambda_min_eq = 0.0;       // lambda_min(E[Q])
  double lambda_min_es = 0.0;       // lambda_min(E[S(alpha)])
  double theta_star_drs_norm = 0.0;
  double theta_star_maml_norm = 0.0;
};

// ---- SGD sample-complexity bounds ----------------------------------------

inline std::pair<double, double> drs_complexity_constants(const SmoothnessConstants& c,
                                                          long long m, long long n) {
  c.validate();
  if (m < 1 || n < 1) throw AssumptionError("drs_complexity_constants: m, n must be >= 1");
  const double md = static_cast<double>(m), nd = static_cast<double>(n);
  const double l2 = c.lipschitz_l * c.lipschitz_l;
  const double c_tr =
      c.smooth_mu * (l2 + c.grad_var_task / md + c.grad_var_data / (2.0 * nd * md));
  const double c_te = c.smooth_mu * (l2 + c.grad_var_data / nd);
  return {c_tr, c_te};
}

inline std::pair<double, double> maml_complexity_constants(const SmoothnessConstants& c,
                                                           long long m, long long n,
                                                           double alpha) {
  c.validate();
  if (m < 1 || n < 1) throw AssumptionError("maml_complexity_constants: m, n must be >= 1");
  const double md = static_cast<double>(m), nd = static_cast<double>(n);
  const double l2 = c.lipschitz_l * c.lipschitz_l;
  const double rho = 1.0 + alpha * c.smooth_mu;
  const double mu_prime = 4.0 * c.smooth_mu + 2.0 * c.hessian_lip * alpha * c.lipschitz_l;
  const double c_tr =
      mu_prime * ((2.0 + 40.0 / md) * rho * rho * l2 + 14.0 * c.grad_var_task / md +
                  3.0 * c.grad_var_data *
                      (1.0 + alpha * alpha * c.smooth_mu * c.smooth_mu * md) / (md * nd));
  const double c_te = c.smooth_mu * (l2 + c.grad_var_data / nd);
  return {c_tr, c_te};
}

// Optimized-equal-rate form: sqrt(0.5 (Delta + Lambda) (C_tr T_tr + C_te T_te)).
inline double drs_complexity_bound(const SmoothnessConstants& c, double lambda_drs,
                                   const SgdSchedule& sched) {
  sched.validate();
  const auto [c_tr, c_te] = drs_complexity_constants(c, sched.m, sched.n);
  const double load = c_tr * static_cast<double>(sched.t_train) +
                      c_te * static_cast<double>(sched.t_test);
  return std::sqrt(0.5 * (c.delta + lambda_drs) * load);
}

// Full form including the warm-start bias term:
// T_tr alpha mu (1 + alpha mu)^2 L sqrt(V_d / n) + sqrt(0.5 (Delta + Lambda +
// alpha L^2)(C_tr T_tr + C_te T_te)). Requires alpha <= 1/(6 mu) and
// d_hessian >= 2 alpha^2 V_h.
inline double maml_complexity_bound(const SmoothnessConstants& c, double lambda_maml,
                                    const SgdSchedule& sched) {
  sched.validate();
  c.validate();
  if (sched.alpha > 1.0 / (6.0 * c.smooth_mu) + 1e-12)
    throw AssumptionError("maml_complexity_bound: alpha exceeds 1/(6 mu)");
  if (static_cast<double>(sched.d_hessian) <
      2.0 * sched.alpha * sched.alpha * c.hess_var - 1e-12)
    throw AssumptionError("maml_complexity_bound: d_hessian below 2 alpha^2 V_h");
  const auto [c_tr, c_te] = maml_complexity_constants(c, sched.m, sched.n, sched.alpha);
  const double rho = 1.0 + sched.alpha * c.smooth_mu;
  const double bias = static_cast<double>(sched.t_train) * sched.alpha * c.smooth_mu *
                      rho * rho * c.lipschitz_l *
                      std::sqrt(c.grad_var_data / static_cast<double>(sched.n));
  const double load = c_tr * static_cast<double>(sched.t_train) +
                      c_te * static_cast<double>(sched.t_test);
  const double slack = c.delta + lambda_maml +
                       sched.alpha * c.lipschitz_l * c.lipschitz_l;
  return bias + std::sqrt(0.5 * slack * load);
}

namespace detail {

inline double two_rate_core(double k1, double c_tr, double c_te,
                            const SgdSchedule& sched, double bias) {
  sched.validate();
  double min_rate = std::numeric_limits<double>::infinity();
  if (sched.t_train > 0) {
    if (sched.lr_train <= 0.0)
      throw AssumptionError("two-rate bound: lr_train must be > 0 when t_train > 0");
    min_rate = std::min(min_rate, sched.lr_train);
  }
  if (sched.t_test > 0) {
    if (sched.lr_test <= 0.0)
      throw AssumptionError("two-rate bound: lr_test must be > 0 when t_test > 0");
    min_rate = std::min(min_rate, sched.lr_test);
  }
  if (!std::isfinite(min_rate)) return 0.0;
  return k1 / min_rate + bias +
         0.5 * (sched.lr_train * c_tr * static_cast<double>(sched.t_train) +
                sched.lr_test * c_te * static_cast<double>(sched.t_test));
}

}  // namespace detail

// Pre-optimization two-rate inequalities (explicit lr_train / lr_test), the
// form actually established before the learning rate is tuned away.
inline double drs_two_rate_bound(const SmoothnessConstants& c, double lambda_drs,
                                 const SgdSchedule& sched) {
  const auto [c_tr, c_te] = drs_complexity_constants(c, sched.m, sched.n);
  return detail::two_rate_core(c.delta + lambda_drs, c_tr, c_te, sched, 0.0);
}

inline double maml_two_rate_bound(const SmoothnessConstants& c, double lambda_maml,
                                  const SgdSchedule& sched) {
  if (sched.alpha > 1.0 / (6.0 * c.smooth_mu) + 1e-12)
    throw AssumptionError("maml_two_rate_bound: alpha exceeds 1/(6 mu)");
  if (static_cast<double>(sched.d_hessian) <
      2.0 * sched.alpha * sched.alpha * c.hess_var - 1e-12)
    throw AssumptionError("maml_two_rate_bound: d_hessian below 2 alpha^2 V_h");
  const auto [c_tr, c_te] = maml_complexity_constants(c, sched.m, sched.n, sched.alpha);
  const double rho = 1.0 + sched.alpha * c.smooth_mu;
  const double bias = static_cast<double>(sched.t_train) * sched.alpha * c.smooth_mu *
                      rho * rho * c.lipschitz_l *
                      std::sqrt(c.grad_var_data / static_cast<double>(sched.n));
  const double k1 = c.delta + lambda_maml +
                    sched.alpha * c.lipschitz_l * c.lipschitz_l;
  return detail::two_rate_core(k1, c_tr, c_te, sched, bias);
}

// ---- Statistical-error bounds (leading order) -----------------------------

// Default log factors: ln(p M + 2M + 2p + 1) - ln(delta/2) for the joint
// estimator and ln(2p M + 4M + 2p + 1) - ln(delta/2) for the meta estimator.
inline double omega_default_drs(int p, long long m, double delta = 0.05) {
  if (delta <= 0.0 || delta >= 1.0) throw AssumptionError("omega_default_drs: delta in (0,1)");
  const double pd = p, md = static_cast<double>(m);
  return std::log(pd * md + 2.0 * md + 2.0 * pd + 1.0) - std::log(delta / 2.0);
}

inline double omega_default_maml(int p, long long m, double delta = 0.05) {
  if (delta <= 0.0 || delta >= 1.0) throw AssumptionError("omega_default_maml: delta in (0,1)");
  const double pd = p, md = static_cast<double>(m);
  return std::log(2.0 * pd * md + 4.0 * md + 2.0 * pd + 1.0) - std::log(delta / 2.0);
}

// c1(w, r, s, t) = t sqrt(2 r w) + sqrt(2 s w): task-sampling term.
inline double c1_term(double omega, double var_norm, double var_trace,
                      double theta_star_norm) {
  return theta_star_norm * std::sqrt(2.0 * var_norm * omega) +
         std::sqrt(2.0 * var_trace * omega);
}

// c2(w) = beta C K^2 sqrt(p + w): per-task covariance-estimation term.
inline double c2_term(double omega, const LinRegBoundInputs& in) {
  return in.q_norm_bound * in.univ_c * in.subgauss_k * in.subgauss_k *
         std::sqrt(static_cast<double>(in.p) + omega);
}

// c3(w) = sqrt(tr E[sigma^2 Q] w): noise term.
inline double c3_term(double omega, const LinRegBoundInputs& in) {
  return std::sqrt(in.noise_weighted_trace * omega);
}

// Leading-order high-probability bound on ||theta_hat_drs - theta*_drs||;
// the vanishing higher-order remainder term is dropped by design.
inline double drs_statistical_bound(const LinRegBoundInputs& in, long long m,
                                    long long n) {
  if (in.lambda_min_eq <= 0.0)
    throw AssumptionError("drs_statistical_bound: lambda_min(E[Q]) must be > 0");
  if (m < 1 || n < 1) throw AssumptionError("drs_statistical_bound: m, n must be >= 1");
  const double task_term =
      c1_term(in.omega, in.var_q_norm, in.var_qtheta_trace, in.theta_star_drs_norm) /
      std::sqrt(static_cast<double>(m));
  const double data_term =
      (in.tau * c2_term(in.omega, in) / std::sqrt(2.0) + c3_term(in.omega, in)) /
      std::sqrt(static_cast<double>(n));
  return (task_term + data_term) / in.lambda_min_eq;
}

// Same for ||theta_hat_maml(alpha) - theta*_maml(alpha)||.
inline double maml_statistical_bound(const LinRegBoundInputs& in, long long m,
                                     long long n, double alpha) {
  if (in.lambda_min_es <= 0.0)
    throw AssumptionError("maml_statistical_bound: lambda_min(E[S]) must be > 0");
  if (m < 1 || n < 1) throw AssumptionError("maml_statistical_bound: m, n must be >= 1");
  const double ab = alpha * in.q_norm_bound;
  const double task_term =
      c1_term(in.omega, in.var_s_norm, in.var_stheta_trace, in.theta_star_maml_norm) /
      std::sqrt(static_cast<double>(m));
  const double data_term = ((1.0 + 3.0 * ab) * (1.0 + 3.0 * ab) * in.tau_prime *
                                c2_term(in.omega, in) +
                            std::sqrt(2.0) * (1.0 + ab) * (1.0 + ab) *
                                c3_term(in.omega, in)) /
                           std::sqrt(static_cast<double>(n));
  return (task_term + data_term) / in.lambda_min_es;
}

// ---- Concentration right-hand sides ---------------------------------------

// Matrix-Bernstein tail for || sum_j (Q_j - E[Q]) || over m i.i.d. draws:
// (2 beta / 3) log(2p/rho) + sqrt(2 m ||Var[Q]|| log(2p/rho)).
inline double bernstein_rhs_symmetric(double beta, double var_norm, long long m, int p,
                                      double rho) {
  if (rho <= 0.0 || rho >= 1.0) throw AssumptionError("bernstein_rhs_symmetric: rho in (0,1)");
  if (m < 1 || p < 1) throw AssumptionError("bernstein_rhs_symmetric: m, p must be >= 1");
  const double lg = std::log(2.0 * p / rho);
  return (2.0 * beta / 3.0) * lg + std::sqrt(2.0 * static_cast<double>(m) * var_norm * lg);
}

// Sub-Gaussian sample-covariance deviation ||X X'/n - Q||:
// beta C K^2 (sqrt((p + log(2/rho))/n) + (p + log(2/rho))/n).
inline double covariance_rhs(double beta, double subgauss_k, double univ_c, long long n,
                             int p, double rho) {
  if (rho <= 0.0 || rho >= 1.0) throw AssumptionError("covariance_rhs: rho in (0,1)");
  if (n < 1 || p < 1) throw AssumptionError("covariance_rhs: n, p must be >= 1");
  const double t = (static_cast<double>(p) + std::log(2.0 / rho)) / static_cast<double>(n);
  return beta * univ_c * subgauss_k * subgauss_k * (std::sqrt(t) + t);
}

// Smallest universal constant C whose bound is violated on Gaussian data with
// empirical frequency <= rho: the (1-rho) quantile of the observed deviations
// over the C=1 bound value.
inline double calibrate_covariance_constant(const Matrix& q, long long n,
                                            double subgauss_k, double rho,
                                            int trials, std::uint64_t rng_seed) {
  if (trials < 1) throw AssumptionError("calibrate_covariance_constant: trials >= 1");
  if (rho <= 0.0 || rho >= 1.0)
    throw AssumptionError("calibrate_covariance_constant: rho in (0,1)");
  const int p = static_cast<int>(q.rows());
  const Matrix root = psd_sqrt(q);
  const double base = covariance_rhs(spectral_norm_sym(q), subgauss_k, 1.0, n, p, rho);
  std::vector<double> errs(trials);
  Vector g(p);
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(rng_seed, {static_cast<std::uint64_t>(t)}));
    Matrix acc = Matrix::Zero(p, p);
    for (long long i = 0; i < n; ++i) {
      for (int r = 0; r < p; ++r) g(r) = rng.normal();
      const Vector x = root * g;
      acc += x * x.transpose();
    }
    errs[t] = spectral_norm_sym(acc / static_cast<double>(n) - q);
  }
  std::sort(errs.begin(), errs.end());
  const int idx = std::min<int>(trials - 1,
                                static_cast<int>(std::ceil((1.0 - rho) * trials)) - 1);
  return errs[std::max(idx, 0)] / base;
}

}  // namespace mtt
