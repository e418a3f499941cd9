#pragma once

#include <algorithm>
#include <cmath>

#include "mtt/bounds.hpp"
#include "mtt/estimators.hpp"
#include "mtt/risk.hpp"

namespace mtt {

// Fills every statistical-bound input that is a population functional of a
// finite task distribution: curvature bound, distances of task parameters from
// the two population optima, variance functionals of Q and S(alpha), the
// noise-weighted trace, and the minimum eigenvalues. Sub-Gaussian constants
// (K, C) keep their defaults; omega is set to the joint-estimator default for
// the given m and delta (use omega_default_maml before evaluating the
// meta-estimator bound).
inline LinRegBoundInputs bound_inputs_from_distribution(const FiniteDistribution& d,
                                                        double alpha, long long m,
                                                        double delta = 0.05) {
  d.validate();
  const int p = d.dim();
  LinRegBoundInputs in;
  in.p = p;
  const Vector th_drs = population_drs_optimum(d);
  const Vector th_maml = population_maml_optimum(d, alpha);
  in.theta_star_drs_norm = th_drs.norm();
  in.theta_star_maml_norm = th_maml.norm();
  Matrix eq = Matrix::Zero(p, p), eq2 = Matrix::Zero(p, p);
  Matrix es = Matrix::Zero(p, p), es2 = Matrix::Zero(p, p);
  Vector eqt = Vector::Zero(p), est = Vector::Zero(p);
  double eqt_sq = 0.0, est_sq = 0.0;
  for (const auto& wt : d.tasks) {
    const TaskParams& t = wt.params;
    const Matrix s = adapted_curvature(t, alpha);
    in.q_norm_bound = std::max(in.q_norm_bound, spectral_norm_sym(t.q));
    in.tau = std::max(in.tau, (t.theta - th_drs).norm());
    in.tau_prime = std::max(in.tau_prime, (t.theta - th_maml).norm());
    in.eta = std::max(in.eta, t.theta.norm());
    const Vector qt = t.q * t.theta;
    const Vector st = s * t.theta;
    eq += wt.weight * t.q;
    eq2 += wt.weight * t.q * t.q;
    es += wt.weight * s;
    es2 += wt.weight * s * s;
    eqt += wt.weight * qt;
    est += wt.weight * st;
    eqt_sq += wt.weight * qt.squaredNorm();
    est_sq += wt.weight * st.squaredNorm();
    in.noise_weighted_trace += wt.weight * t.noise_var * t.q.trace();
  }
  in.var_q_norm = std::max(0.0, spectral_norm_sym(eq2 - eq * eq));
  in.var_s_norm = std::max(0.0, spectral_norm_sym(es2 - es * es));
  in.var_qtheta_trace = std::max(0.0, eqt_sq - eqt.squaredNorm());
  in.var_stheta_trace = std::max(0.0, est_sq - est.squaredNorm());
  in.lambda_min_eq = lambda_min_sym(eq);
  in.lambda_min_es = lambda_min_sym(es);
  in.omega = omega_default_drs(p, m, delta);
  return in;
}

}  // namespace mtt
