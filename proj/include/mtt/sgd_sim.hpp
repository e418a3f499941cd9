#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "mtt/bounds.hpp"
#include "mtt/estimators.hpp"
#include "mtt/risk.hpp"

namespace mtt {

// One task exposed through noisy first/second-order oracles on a compact
// domain (ball of radius domain_radius). The gradient oracle adds isotropic
// Gaussian noise with covariance trace grad_noise_cov_trace; the Hessian
// oracle adds a symmetric Gaussian perturbation scaled by hess_noise_scale.
struct OracleTask {
  TaskParams task;
  double grad_noise_cov_trace = 0.0;
  double hess_noise_scale = 0.0;
  double domain_radius = 1.0;

  void validate() const {
    task.validate();
    if (grad_noise_cov_trace < 0.0 || hess_noise_scale < 0.0)
      throw AssumptionError("OracleTask: negative noise scale");
    if (domain_radius <= 0.0) throw AssumptionError("OracleTask: domain_radius must be > 0");
  }
};

// Task distribution plus shared oracle settings for meta-training runs.
struct OracleDistribution {
  FiniteDistribution tasks;
  double grad_noise_cov_trace = 0.0;
  double hess_noise_scale = 0.0;
  double domain_radius = 1.0;
  bool project = true;  // project iterates back onto the domain after each step

  OracleTask make(int idx) const {
    return {tasks.tasks[idx].params, grad_noise_cov_trace, hess_noise_scale,
            domain_radius};
  }

  void validate() const {
    tasks.validate();
    if (grad_noise_cov_trace < 0.0 || hess_noise_scale < 0.0)
      throw AssumptionError("OracleDistribution: negative noise scale");
    if (domain_radius <= 0.0)
      throw AssumptionError("OracleDistribution: domain_radius must be > 0");
  }
};

inline Vector grad_oracle(const OracleTask& t, const Vector& theta, Rng& rng) {
  Vector g = task_risk_grad(theta, t.task);
  if (t.grad_noise_cov_trace > 0.0) {
    const double sd = std::sqrt(t.grad_noise_cov_trace / static_cast<double>(g.size()));
    for (Eigen::Index i = 0; i < g.size(); ++i) g(i) += sd * rng.normal();
  }
  return g;
}

// theta is unused for quadratic risks (constant Hessian) but kept so the
// oracle has the generic signature.
inline Matrix hess_oracle(const OracleTask& t, const Vector& theta, Rng& rng) {
  if (theta.size() != t.task.dim()) throw DimensionError("hess_oracle: dimension mismatch");
  Matrix h = t.task.q;
  if (t.hess_noise_scale > 0.0) {
    const int p = t.task.dim();
    Matrix g(p, p);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) g(i, j) = rng.normal();
    h += t.hess_noise_scale * 0.5 * (g + g.transpose());
  }
  return h;
}

inline Vector grad_oracle(const OracleTask& t, const Vector& theta, std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  return grad_oracle(t, theta, rng);
}

inline Matrix hess_oracle(const OracleTask& t, const Vector& theta, std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  return hess_oracle(t, theta, rng);
}

// E||noise||^2 cap for the Hessian oracle (Frobenius bound on the symmetrized
// Gaussian: scale^2 * p(p+1)/2).
inline double hess_var_cap(double hess_noise_scale, int p) {
  return hess_noise_scale * hess_noise_scale * p * (p + 1) / 2.0;
}

struct SgdTrace {
  std::vector<Vector> theta_path;          // theta^0 .. theta^T
  std::vector<double> grad_norm_sq_train;  // exact population gradients, one per step
  std::vector<double> grad_norm_sq_test;
  double lhs_sum = 0.0;
  bool diverged = false;

  const Vector& final_theta() const { return theta_path.back(); }
};

inline SgdTrace merge_traces(SgdTrace train, const SgdTrace& test) {
  train.grad_norm_sq_test = test.grad_norm_sq_test;
  train.lhs_sum += test.lhs_sum;
  train.diverged = train.diverged || test.diverged;
  for (const auto& th : test.theta_path) train.theta_path.push_back(th);
  return train;
}

namespace detail {

// Stream ids for the counter-derived RNG: task draws, inner-step gradients,
// outer gradients, Hessian draws, test-phase gradients. Inner/outer/Hessian
// streams are separate so the alpha = 0 MAML run consumes exactly the draws a
// DRS run with halved per-task batch does.
inline constexpr std::uint64_t kTaskStream = 0;
inline constexpr std::uint64_t kInnerStream = 1;
inline constexpr std::uint64_t kOuterStream = 2;
inline constexpr std::uint64_t kHessStream = 3;
inline constexpr std::uint64_t kTestStream = 4;

inline bool step_and_check(Vector& theta, const Vector& step, const double radius,
                           bool project) {
  theta -= step;
  const double norm = theta.norm();
  if (project && norm > radius) theta *= radius / norm;
  return norm > 10.0 * radius;  // diverged (only reachable without projection)
}

}  // namespace detail

// Meta-training on the joint objective: each step averages the gradient oracle
// over m freshly drawn tasks x 2n calls, g = (1/2nm) sum_j sum_i g(theta, ...).
// Records the exact population gradient norm at each pre-step iterate. A run
// whose iterate leaves 10x the domain radius is flagged diverged and stopped.
inline SgdTrace drs_meta_sgd(const OracleDistribution& dist, const SgdSchedule& sched,
                             std::uint64_t rng_seed, Vector theta0 = Vector()) {
  dist.validate();
  sched.validate();
  if (sched.t_train > 0 && sched.lr_train <= 0.0)
    throw AssumptionError("drs_meta_sgd: lr_train must be > 0");
  const int p = dist.tasks.dim();
  if (theta0.size() == 0) theta0 = Vector::Zero(p);
  if (theta0.size() != p) throw DimensionError("drs_meta_sgd: theta0 dimension mismatch");
  const QuadraticLoss obj = pre_adaptation_quadratic(dist.tasks);
  SgdTrace trace;
  trace.theta_path.push_back(theta0);
  Vector theta = std::move(theta0);
  const double calls = 2.0 * sched.n;
  for (long long t = 0; t < sched.t_train; ++t) {
    trace.grad_norm_sq_train.push_back(obj.grad(theta).squaredNorm());
    Rng task_rng(derive_seed(rng_seed, {detail::kTaskStream, static_cast<std::uint64_t>(t)}));
    Vector g = Vector::Zero(p);
    for (int slot = 0; slot < sched.m; ++slot) {
      const OracleTask ot = dist.make(dist.tasks.draw_index(task_rng));
      Rng orng(derive_seed(rng_seed, {detail::kOuterStream, static_cast<std::uint64_t>(t),
                                      static_cast<std::uint64_t>(slot)}));
      Vector gs = Vector::Zero(p);
      for (int i = 0; i < 2 * sched.n; ++i) gs += grad_oracle(ot, theta, orng);
      gs /= calls;
      g += gs;
    }
    g /= static_cast<double>(sched.m);
    trace.diverged = detail::step_and_check(theta, sched.lr_train * g,
                                            dist.domain_radius, dist.project);
    trace.theta_path.push_back(theta);
    if (trace.diverged) break;
  }
  for (double v : trace.grad_norm_sq_train) trace.lhs_sum += v;
  return trace;
}

// Meta-training on the one-step-adaptation objective. Per task j:
//   theta_tilde = theta - (alpha/n) sum_i g(theta, .)          (inner half)
//   g_j = (I - (alpha/d) sum_d h(theta, .)) (1/n) sum_i g(theta_tilde, .)
// and the meta gradient is the average of g_j over the m drawn tasks.
// Requires alpha <= 1/(6 mu) and d_hessian >= max(1, 2 alpha^2 V_h) when
// alpha > 0. At alpha = 0 the update law equals drs_meta_sgd with per-task
// batch n (no Hessian draws).
inline SgdTrace maml_meta_sgd(const OracleDistribution& dist, const SgdSchedule& sched,
                              std::uint64_t rng_seed, Vector theta0 = Vector()) {
  dist.validate();
  sched.validate();
  if (sched.t_train > 0 && sched.lr_train <= 0.0)
    throw AssumptionError("maml_meta_sgd: lr_train must be > 0");
  const double mu = max_curvature(dist.tasks);
  if (sched.alpha > 1.0 / (6.0 * mu) + 1e-12)
    throw AssumptionError("maml_meta_sgd: alpha exceeds 1/(6 mu)");
  const int p = dist.tasks.dim();
  const double vh = hess_var_cap(dist.hess_noise_scale, p);
  if (sched.alpha > 0.0) {
    if (sched.d_hessian < 1)
      throw AssumptionError("maml_meta_sgd: d_hessian must be >= 1 when alpha > 0");
    if (static_cast<double>(sched.d_hessian) < 2.0 * sched.alpha * sched.alpha * vh - 1e-12)
      throw AssumptionError("maml_meta_sgd: d_hessian below 2 alpha^2 V_h");
  }
  if (theta0.size() == 0) theta0 = Vector::Zero(p);
  if (theta0.size() != p) throw DimensionError("maml_meta_sgd: theta0 dimension mismatch");
  const QuadraticLoss obj = adapted_risk_quadratic(dist.tasks, sched.alpha);
  const Matrix id = Matrix::Identity(p, p);
  SgdTrace trace;
  trace.theta_path.push_back(theta0);
  Vector theta = std::move(theta0);
  for (long long t = 0; t < sched.t_train; ++t) {
    trace.grad_norm_sq_train.push_back(obj.grad(theta).squaredNorm());
    Rng task_rng(derive_seed(rng_seed, {detail::kTaskStream, static_cast<std::uint64_t>(t)}));
    Vector g = Vector::Zero(p);
    for (int slot = 0; slot < sched.m; ++slot) {
      const OracleTask ot = dist.make(dist.tasks.draw_index(task_rng));
      const std::uint64_t ts = static_cast<std::uint64_t>(t);
      const std::uint64_t ss = static_cast<std::uint64_t>(slot);
      Vector theta_tilde = theta;
      if (sched.alpha != 0.0) {
        Rng irng(derive_seed(rng_seed, {detail::kInnerStream, ts, ss}));
        Vector gin = Vector::Zero(p);
        for (int i = 0; i < sched.n; ++i) gin += grad_oracle(ot, theta, irng);
        theta_tilde -= (sched.alpha / sched.n) * gin;
      }
      Rng orng(derive_seed(rng_seed, {detail::kOuterStream, ts, ss}));
      Vector gout = Vector::Zero(p);
      for (int i = 0; i < sched.n; ++i) gout += grad_oracle(ot, theta_tilde, orng);
      gout /= static_cast<double>(sched.n);
      if (sched.alpha != 0.0 && sched.d_hessian > 0) {
        Rng hrng(derive_seed(rng_seed, {detail::kHessStream, ts, ss}));
        Matrix h = Matrix::Zero(p, p);
        for (int d = 0; d < sched.d_hessian; ++d) h += hess_oracle(ot, theta, hrng);
        g += (id - (sched.alpha / sched.d_hessian) * h) * gout;
      } else {
        g += gout;
      }
    }
    g /= static_cast<double>(sched.m);
    trace.diverged = detail::step_and_check(theta, sched.lr_train * g,
                                            dist.domain_radius, dist.project);
    trace.theta_path.push_back(theta);
    if (trace.diverged) break;
  }
  for (double v : trace.grad_norm_sq_train) trace.lhs_sum += v;
  return trace;
}

// Plain SGD on one task from a warm start: g = (1/n) sum_i g(theta, .) per
// step, exact task gradient norms recorded.
inline SgdTrace meta_test_sgd(const OracleTask& task, const Vector& theta_init,
                              const SgdSchedule& sched, std::uint64_t rng_seed,
                              bool project = true) {
  task.validate();
  sched.validate();
  if (sched.t_test > 0 && sched.lr_test <= 0.0)
    throw AssumptionError("meta_test_sgd: lr_test must be > 0");
  if (theta_init.size() != task.task.dim())
    throw DimensionError("meta_test_sgd: theta_init dimension mismatch");
  SgdTrace trace;
  trace.theta_path.push_back(theta_init);
  Vector theta = theta_init;
  for (long long t = 0; t < sched.t_test; ++t) {
    trace.grad_norm_sq_test.push_back(task_risk_grad(theta, task.task).squaredNorm());
    Rng rng(derive_seed(rng_seed, {detail::kTestStream, static_cast<std::uint64_t>(t)}));
    Vector g = Vector::Zero(theta.size());
    for (int i = 0; i < sched.n; ++i) g += grad_oracle(task, theta, rng);
    g /= static_cast<double>(sched.n);
    trace.diverged = detail::step_and_check(theta, sched.lr_test * g,
                                            task.domain_radius, project);
    trace.theta_path.push_back(theta);
    if (trace.diverged) break;
  }
  for (double v : trace.grad_norm_sq_test) trace.lhs_sum += v;
  return trace;
}

// Closed-form constants that provably cap the assumption quantities on the
// domain ball: worst-case risk and gradient norm from ||Q||(R + ||theta_g||),
// the between-task gradient variance from its exact quadratic form maximized
// over the ball, and the oracle noise caps by construction.
inline SmoothnessConstants certified_constants(const OracleDistribution& od) {
  od.validate();
  const int p = od.tasks.dim();
  const double r = od.domain_radius;
  SmoothnessConstants c;
  c.smooth_mu = 0.0;
  c.lipschitz_l = 0.0;
  c.delta = 0.0;
  c.hessian_lip = 0.0;  // quadratic risks: constant Hessian
  c.grad_var_data = od.grad_noise_cov_trace;
  c.hess_var = hess_var_cap(od.hess_noise_scale, p);
  Matrix eq = Matrix::Zero(p, p), eq2 = Matrix::Zero(p, p);
  Vector eqt = Vector::Zero(p), eq2t = Vector::Zero(p);
  double eqt_sq = 0.0;
  for (const auto& wt : od.tasks.tasks) {
    const TaskParams& t = wt.params;
    const double qn = spectral_norm_sym(t.q);
    const double reach = r + t.theta.norm();
    c.smooth_mu = std::max(c.smooth_mu, qn);
    c.lipschitz_l = std::max(c.lipschitz_l, qn * reach);
    c.delta = std::max(c.delta, 0.5 * qn * reach * reach + 0.5 * t.noise_var);
    const Vector qt = t.q * t.theta;
    eq += wt.weight * t.q;
    eq2 += wt.weight * t.q * t.q;
    eqt += wt.weight * qt;
    eq2t += wt.weight * t.q * qt;
    eqt_sq += wt.weight * qt.squaredNorm();
  }
  const Matrix gmat = eq2 - eq * eq;
  const Vector h = eq2t - eq * eqt;
  const double c0 = eqt_sq - eqt.squaredNorm();
  c.grad_var_task =
      std::max(0.0, lambda_max_sym(gmat)) * r * r + 2.0 * h.norm() * r + std::max(0.0, c0);
  return c;
}

struct VerifyConfig {
  std::string method = "drs";  // "drs" or "maml"
  OracleDistribution oracle;
  SgdSchedule sched;  // nonpositive learning rates are replaced by the
                      // bound-optimizing equal rate sqrt(2(Delta+Lambda)/K2)
  int seeds = 50;
  Vector theta0;      // empty -> origin
  std::uint64_t seed = 0;
};

struct VerifyReport {
  SmoothnessConstants constants;
  double lambda = 0.0;
  double lr_train = 0.0;
  double lr_test = 0.0;
  double lhs_mean = 0.0;
  double lhs_stderr = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // rhs - lhs_mean
  bool satisfied = false;
  int diverged = 0;
  bool projected = true;  // iterates confined to the domain ball (assumption B1)
};

// Runs `seeds` independent meta-training + meta-test episodes, averages the
// summed squared population-gradient norms, and compares against the
// complexity bound computed from certified constants.
inline VerifyReport verify_complexity_bound(const VerifyConfig& cfg) {
  if (cfg.seeds < 1) throw AssumptionError("verify_complexity_bound: seeds >= 1");
  if (cfg.method != "drs" && cfg.method != "maml")
    throw ConfigError("verify_complexity_bound: method must be drs or maml");
  const bool maml = cfg.method == "maml";
  VerifyReport rep;
  rep.constants = certified_constants(cfg.oracle);
  rep.projected = cfg.oracle.project;
  const double alpha = maml ? cfg.sched.alpha : 0.0;
  if (maml) {
    const Vector opt = population_maml_optimum(cfg.oracle.tasks, alpha);
    rep.lambda = maml_population_risk(opt, alpha, cfg.oracle.tasks);
  } else {
    const Vector opt = population_drs_optimum(cfg.oracle.tasks);
    rep.lambda = drs_population_risk(opt, cfg.oracle.tasks);
  }
  SgdSchedule sched = cfg.sched;
  const auto [c_tr, c_te] =
      maml ? maml_complexity_constants(rep.constants, sched.m, sched.n, alpha)
           : drs_complexity_constants(rep.constants, sched.m, sched.n);
  const double k1 = rep.constants.delta + rep.lambda +
                    (maml ? alpha * rep.constants.lipschitz_l * rep.constants.lipschitz_l
                          : 0.0);
  const double k2 = c_tr * static_cast<double>(sched.t_train) +
                    c_te * static_cast<double>(sched.t_test);
  const double default_rate = k2 > 0.0 ? std::sqrt(2.0 * k1 / k2) : 1.0 / rep.constants.smooth_mu;
  if (sched.lr_train <= 0.0) sched.lr_train = default_rate;
  if (sched.lr_test <= 0.0) sched.lr_test = default_rate;
  rep.lr_train = sched.lr_train;
  rep.lr_test = sched.lr_test;
  rep.rhs = maml ? maml_complexity_bound(rep.constants, rep.lambda, sched)
                 : drs_complexity_bound(rep.constants, rep.lambda, sched);

  double sum = 0.0, sum_sq = 0.0;
  for (int s = 0; s < cfg.seeds; ++s) {
    const std::uint64_t su = static_cast<std::uint64_t>(s);
    const SgdTrace train =
        maml ? maml_meta_sgd(cfg.oracle, sched, derive_seed(cfg.seed, {su, 0}), cfg.theta0)
             : drs_meta_sgd(cfg.oracle, sched, derive_seed(cfg.seed, {su, 0}), cfg.theta0);
    Rng task_rng(derive_seed(cfg.seed, {su, 1}));
    const OracleTask test_task = cfg.oracle.make(cfg.oracle.tasks.draw_index(task_rng));
    const SgdTrace test = meta_test_sgd(test_task, train.final_theta(), sched,
                                        derive_seed(cfg.seed, {su, 2}), cfg.oracle.project);
    if (train.diverged || test.diverged) ++rep.diverged;
    const double lhs = train.lhs_sum + test.lhs_sum;
    sum += lhs;
    sum_sq += lhs * lhs;
  }
  rep.lhs_mean = sum / cfg.seeds;
  const double var = std::max(0.0, sum_sq / cfg.seeds - rep.lhs_mean * rep.lhs_mean);
  rep.lhs_stderr = cfg.seeds > 1 ? std::sqrt(var / (cfg.seeds - 1)) : 0.0;
  rep.margin = rep.rhs - rep.lhs_mean;
  rep.satisfied = rep.lhs_mean <= rep.rhs;
  return rep;
}

}  // namespace mtt
