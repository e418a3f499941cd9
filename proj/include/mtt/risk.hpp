#pragma once

#include <cmath>
#include <utility>

#include "mtt/task_model.hpp"

namespace mtt {

// One-step adaptation settings: inner learning rate and the number of data
// points consumed by the adaptation step.
struct AdaptationConfig {
  double alpha = 0.0;
  long long n_adapt = 1;

  void validate() const {
    if (alpha < 0.0) throw AssumptionError("AdaptationConfig: alpha must be >= 0");
    if (n_adapt < 1) throw DimensionError("AdaptationConfig: n_adapt must be >= 1");
  }
};

// Quadratic functional q(theta) = 0.5 theta'a theta - b'theta + c. All
// population objectives over finite distributions reduce to this form, which
// keeps repeated evaluation (the experiment hot path) at O(p^2).
struct QuadraticLoss {
  Matrix a;
  Vector b;
  double c = 0.0;

  double value(const Vector& theta) const {
    if (theta.size() != b.size()) throw DimensionError("QuadraticLoss: dimension mismatch");
    return 0.5 * theta.dot(a * theta) - b.dot(theta) + c;
  }

  Vector grad(const Vector& theta) const {
    if (theta.size() != b.size()) throw DimensionError("QuadraticLoss: dimension mismatch");
    return a * theta - b;
  }
};

inline double task_risk(const Vector& theta, const TaskParams& t) {
  if (theta.size() != t.theta.size()) throw DimensionError("task_risk: dimension mismatch");
  const Vector d = theta - t.theta;
  return 0.5 * d.dot(t.q * d) + 0.5 * t.noise_var;
}

inline Vector task_risk_grad(const Vector& theta, const TaskParams& t) {
  if (theta.size() != t.theta.size())
    throw DimensionError("task_risk_grad: dimension mismatch");
  return t.q * (theta - t.theta);
}

// S(alpha) = (I - alpha Q) Q (I - alpha Q): curvature of the task risk seen
// through one exact adaptation step.
inline Matrix adapted_curvature(const TaskParams& t, double alpha) {
  const Matrix ia = Matrix::Identity(t.dim(), t.dim()) - alpha * t.q;
  return ia * t.q * ia;
}

// E[x x' Q x x'] = 2 Q^3 + Q tr(Q^2) for x ~ N(0, Q) (Isserlis).
inline Matrix gaussian_fourth_moment(const Matrix& q) {
  const Matrix q2 = q * q;
  return 2.0 * q2 * q + q * q2.trace();
}

// A(alpha) = S(alpha) + alpha^2 (E[x x' Q x x'] - Q^3) / n: finite-sample
// curvature after one stochastic adaptation step on n points.
inline Matrix post_adapt_matrix(const TaskParams& t, double alpha, long long n) {
  if (n < 1) throw DimensionError("post_adapt_matrix: n must be >= 1");
  const Matrix q2 = t.q * t.q;
  const Matrix correction = q2 * t.q + t.q * q2.trace();  // E4 - Q^3
  return adapted_curvature(t, alpha) +
         (alpha * alpha / static_cast<double>(n)) * correction;
}

inline Matrix post_adapt_matrix(const TaskParams& t, const AdaptationConfig& cfg) {
  cfg.validate();
  return post_adapt_matrix(t, cfg.alpha, cfg.n_adapt);
}

namespace detail {

// Weighted moments (E[K], E[K theta], E[theta'K theta]) for a per-task matrix K.
template <class MatrixOf>
QuadraticLoss expected_quadratic(const FiniteDistribution& d, MatrixOf&& k_of) {
  d.validate();
  const int p = d.dim();
  QuadraticLoss q{Matrix::Zero(p, p), Vector::Zero(p), 0.0};
  double noise = 0.0;
  for (const auto& wt : d.tasks) {
    const Matrix k = k_of(wt.params);
    const Vector kt = k * wt.params.theta;
    q.a += wt.weight * k;
    q.b += wt.weight * kt;
    q.c += 0.5 * wt.weight * wt.params.theta.dot(kt);
    noise += wt.weight * wt.params.noise_var;
  }
  q.c += 0.5 * noise;
  return q;
}

}  // namespace detail

// Pre-adaptation population objective: 0.5 theta'E[Q]theta - E[Q theta_g]'theta
// + 0.5 E[theta_g'Q theta_g] + 0.5 E[sigma^2].
inline QuadraticLoss pre_adaptation_quadratic(const FiniteDistribution& d) {
  return detail::expected_quadratic(d, [](const TaskParams& t) { return t.q; });
}

// Population objective after one exact adaptation step (the n -> infinity
// post-adaptation loss): same form with Q replaced by S(alpha).
inline QuadraticLoss adapted_risk_quadratic(const FiniteDistribution& d, double alpha) {
  return detail::expected_quadratic(
      d, [alpha](const TaskParams& t) { return adapted_curvature(t, alpha); });
}

// Full finite-n post-adaptation expected loss: Q replaced by A(alpha, n) plus
// the noise-amplification constant (alpha^2 / 2n) E[sigma^2 tr(Q^2)].
inline QuadraticLoss post_adapt_quadratic(const FiniteDistribution& d, double alpha,
                                          long long n) {
  if (n < 1) throw DimensionError("post_adapt_quadratic: n must be >= 1");
  QuadraticLoss q = detail::expected_quadratic(
      d, [&](const TaskParams& t) { return post_adapt_matrix(t, alpha, n); });
  double amp = 0.0;
  for (const auto& wt : d.tasks)
    amp += wt.weight * wt.params.noise_var * (wt.params.q * wt.params.q).trace();
  q.c += 0.5 * alpha * alpha / static_cast<double>(n) * amp;
  return q;
}

inline double drs_population_risk(const Vector& theta, const FiniteDistribution& d) {
  return pre_adaptation_quadratic(d).value(theta);
}
inline Vector drs_population_risk_grad(const Vector& theta, const FiniteDistribution& d) {
  return pre_adaptation_quadratic(d).grad(theta);
}

inline double maml_population_risk(const Vector& theta, double alpha,
                                   const FiniteDistribution& d) {
  return adapted_risk_quadratic(d, alpha).value(theta);
}
inline Vector maml_population_risk_grad(const Vector& theta, double alpha,
                                        const FiniteDistribution& d) {
  return adapted_risk_quadratic(d, alpha).grad(theta);
}

inline double post_adapt_expected_loss(const Vector& theta, double alpha, long long n,
                                       const FiniteDistribution& d) {
  return post_adapt_quadratic(d, alpha, n).value(theta);
}
inline Vector post_adapt_expected_loss_grad(const Vector& theta, double alpha,
                                            long long n, const FiniteDistribution& d) {
  return post_adapt_quadratic(d, alpha, n).grad(theta);
}

// Post-adaptation loss (n -> infinity) at the optimum of the adapted
// objective: 0.5 E[theta'S theta] - 0.5 E[S theta]'E[S]^{-1}E[S theta]
// + 0.5 E[sigma^2].
inline double maml_optimum_post_loss(double alpha, const FiniteDistribution& d) {
  const QuadraticLoss q = adapted_risk_quadratic(d, alpha);
  const SymSolveResult sol = sym_solve(q.a, q.b);
  if (sol.pseudo_inverse)
    throw SingularMatrixError(
        "maml_optimum_post_loss: E[S(alpha)] is singular (min eigenvalue " +
        std::to_string(sol.min_eigenvalue) + ")");
  return q.c - 0.5 * q.b.dot(sol.x);
}

// Max over tasks of the spectral norm of Q: the curvature bound that defines
// the admissible adaptation-rate range [0, 1/beta].
inline double max_curvature(const FiniteDistribution& d) {
  d.validate();
  double beta = 0.0;
  for (const auto& wt : d.tasks) beta = std::max(beta, spectral_norm_sym(wt.params.q));
  return beta;
}

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
};

// Weighted mean and standard error of a per-task statistic; the standard error
// uses the effective sample size 1/sum(w^2) (equal-weight Monte Carlo samples
// recover the usual sqrt(var/k)).
template <class F>
MeanStderr weighted_stat(const FiniteDistribution& d, F&& f) {
  d.validate();
  double mean = 0.0, wsq = 0.0;
  std::vector<double> vals;
  vals.reserve(d.tasks.size());
  for (const auto& wt : d.tasks) {
    vals.push_back(f(wt.params));
    mean += wt.weight * vals.back();
    wsq += wt.weight * wt.weight;
  }
  double var = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i)
    var += d.tasks[i].weight * (vals[i] - mean) * (vals[i] - mean);
  MeanStderr out;
  out.mean = mean;
  out.stderr_ = wsq > 0.0 ? std::sqrt(var * wsq) : 0.0;
  return out;
}

// TaskDistribution entry points: exact for finite support, error otherwise
// (simulation distributions must be approximated with monte_carlo_finite).
inline double drs_population_risk(const Vector& theta, const TaskDistribution& d) {
  return drs_population_risk(theta, d.finite());
}
inline Vector drs_population_risk_grad(const Vector& theta, const TaskDistribution& d) {
  return drs_population_risk_grad(theta, d.finite());
}
inline double maml_population_risk(const Vector& theta, double alpha,
                                   const TaskDistribution& d) {
  return maml_population_risk(theta, alpha, d.finite());
}
inline Vector maml_population_risk_grad(const Vector& theta, double alpha,
                                        const TaskDistribution& d) {
  return maml_population_risk_grad(theta, alpha, d.finite());
}
inline double post_adapt_expected_loss(const Vector& theta, double alpha, long long n,
                                       const TaskDistribution& d) {
  return post_adapt_expected_loss(theta, alpha, n, d.finite());
}
inline double maml_optimum_post_loss(double alpha, const TaskDistribution& d) {
  return maml_optimum_post_loss(alpha, d.finite());
}
inline double max_curvature(const TaskDistribution& d) { return max_curvature(d.finite()); }

}  // namespace mtt
