#pragma once

#include <utility>

#include "mtt/risk.hpp"

namespace mtt {

struct EstimateResult {
  Vector theta_hat;
  bool rank_deficient = false;
  double min_singular_value = 0.0;
};

// Joint least squares over all 2nm observations (support and query halves
// stacked task by task): theta_hat = (X')^+ Y, minimum-norm when degenerate.
inline EstimateResult solve_drs(const MetaDataset& data) {
  data.validate();
  const int rows = 2 * data.m * data.n;
  Matrix a(rows, data.p);
  Vector y(rows);
  int r = 0;
  for (const TaskData& t : data.tasks) {
    a.middleRows(r, data.n) = t.x_support.transpose();
    y.segment(r, data.n) = t.y_support;
    r += data.n;
    a.middleRows(r, data.n) = t.x_query.transpose();
    y.segment(r, data.n) = t.y_query;
    r += data.n;
  }
  const LstsqResult ls = svd_least_squares(a, y);
  return {ls.x, ls.rank_deficient, ls.min_singular_value};
}

// One-step adaptation on n points: theta - (alpha/n)(X X' theta - X y).
inline Vector adapt(const Vector& theta, const Matrix& x, const Vector& y,
                    double alpha) {
  if (x.rows() != theta.size() || x.cols() != y.size())
    throw DimensionError("adapt: incompatible shapes");
  const double scale = alpha / static_cast<double>(x.cols());
  return theta - scale * (x * (x.transpose() * theta - y));
}

// Linear system whose least-squares solution is the one-step meta estimator:
// per task, W_j = (I - (alpha/n) X_s X_s') X_q and
// Z_j = Y_q - (alpha/n) X_q' X_s Y_s, concatenated over tasks.
inline std::pair<Matrix, Vector> build_maml_system(const MetaDataset& data,
                                                   double alpha) {
  data.validate();
  const int p = data.p, n = data.n;
  const double scale = alpha / static_cast<double>(n);
  Matrix w(p, data.m * n);
  Vector z(data.m * n);
  const Matrix id = Matrix::Identity(p, p);
  for (int j = 0; j < data.m; ++j) {
    const TaskData& t = data.tasks[j];
    const Matrix pre = id - scale * (t.x_support * t.x_support.transpose());
    w.middleCols(j * n, n) = pre * t.x_query;
    z.segment(j * n, n) =
        t.y_query - scale * (t.x_query.transpose() * (t.x_support * t.y_support));
  }
  return {std::move(w), std::move(z)};
}

// Meta estimator: minimizes the query-half squared error after one adaptation
// step on the support half; theta_hat = (W(alpha)')^+ Z(alpha).
inline EstimateResult solve_maml(const MetaDataset& data, double alpha) {
  auto [w, z] = build_maml_system(data, alpha);
  const LstsqResult ls = svd_least_squares(w.transpose(), z);
  return {ls.x, ls.rank_deficient, ls.min_singular_value};
}

// theta* = E[Q]^{-1} E[Q theta_g].
inline Vector population_drs_optimum(const FiniteDistribution& d) {
  const QuadraticLoss q = pre_adaptation_quadratic(d);
  const SymSolveResult sol = sym_solve(q.a, q.b);
  if (sol.pseudo_inverse)
    throw SingularMatrixError("population_drs_optimum: E[Q] is singular (min eigenvalue " +
                              std::to_string(sol.min_eigenvalue) + ")");
  return sol.x;
}

// theta*(alpha) = E[S(alpha)]^{-1} E[S(alpha) theta_g].
inline Vector population_maml_optimum(const FiniteDistribution& d, double alpha) {
  const QuadraticLoss q = adapted_risk_quadratic(d, alpha);
  const SymSolveResult sol = sym_solve(q.a, q.b);
  if (sol.pseudo_inverse)
    throw SingularMatrixError(
        "population_maml_optimum: E[S(alpha)] is singular (min eigenvalue " +
        std::to_string(sol.min_eigenvalue) + ")");
  return sol.x;
}

inline Vector population_drs_optimum(const TaskDistribution& d) {
  return population_drs_optimum(d.finite());
}
inline Vector population_maml_optimum(const TaskDistribution& d, double alpha) {
  return population_maml_optimum(d.finite(), alpha);
}

}  // namespace mtt
