#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "mtt/errors.hpp"

namespace mtt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct LstsqResult {
  Vector x;
  double min_singular_value = 0.0;  // x-dimension-th singular value of A; 0 when rank < cols
  double max_singular_value = 0.0;
  bool rank_deficient = false;
};

// Minimum-norm least-squares solution of A x ~= b via SVD. Singular values
// below rel_cutoff * s_max are treated as zero; the result is flagged
// rank-deficient when any of the cols(A) singular values falls below that
// cutoff (including the structural zeros of a wide A).
inline LstsqResult svd_least_squares(const Matrix& a, const Vector& b,
                                     double rel_cutoff = 1e-10) {
  if (a.rows() != b.size())
    throw DimensionError("svd_least_squares: A has " + std::to_string(a.rows()) +
                         " rows but b has length " + std::to_string(b.size()));
  LstsqResult res;
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  res.max_singular_value = s.size() > 0 ? s(0) : 0.0;
  res.min_singular_value =
      s.size() >= a.cols() ? s(a.cols() - 1) : 0.0;  // wide A: missing values are 0
  const double cutoff = rel_cutoff * res.max_singular_value;
  res.rank_deficient =
      res.max_singular_value == 0.0 || res.min_singular_value < cutoff;
  Vector coef = Vector::Zero(s.size());
  if (res.max_singular_value > 0.0) {
    Vector utb = svd.matrixU().transpose() * b;
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) > cutoff) coef(i) = utb(i) / s(i);
  }
  res.x = svd.matrixV() * coef;
  return res;
}

struct SymSolveResult {
  Vector x;
  double min_eigenvalue = 0.0;
  bool pseudo_inverse = false;  // eigenvalues below the cutoff were dropped
};

// Solves S x = b for symmetric S by eigendecomposition. Eigenvalues below
// `cutoff` are treated as zero (pseudo-inverse on the remaining spectrum) and
// the result is flagged instead of failing.
inline SymSolveResult sym_solve(const Matrix& s, const Vector& b,
                                double cutoff = 1e-12) {
  if (s.rows() != s.cols() || s.rows() != b.size())
    throw DimensionError("sym_solve: incompatible shapes");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
  const Vector& vals = eig.eigenvalues();
  SymSolveResult res;
  res.min_eigenvalue = vals(0);
  res.pseudo_inverse = vals(0) < cutoff;
  Vector proj = eig.eigenvectors().transpose() * b;
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    proj(i) = vals(i) > cutoff ? proj(i) / vals(i) : 0.0;
  res.x = eig.eigenvectors() * proj;
  return res;
}

inline double lambda_min_sym(const Matrix& s) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(s, Eigen::EigenvaluesOnly)
      .eigenvalues()(0);
}

inline double lambda_max_sym(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(s, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(s.rows() - 1);
}

// Spectral norm of a symmetric matrix (max |eigenvalue|).
inline double spectral_norm_sym(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(s, Eigen::EigenvaluesOnly);
  return std::max(std::abs(eig.eigenvalues()(0)),
                  std::abs(eig.eigenvalues()(s.rows() - 1)));
}

inline bool is_symmetric(const Matrix& m, double tol) {
  return m.rows() == m.cols() && (m - m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

// Symmetric square root of a PSD matrix. Eigenvalues in [-neg_tol, 0) are
// clamped to zero (degenerate Q is allowed); anything lower is an error.
inline Matrix psd_sqrt(const Matrix& q, double neg_tol = 1e-10) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(q);
  Vector vals = eig.eigenvalues();
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    if (vals(i) < -neg_tol)
      throw AssumptionError("psd_sqrt: matrix has eigenvalue " +
                            std::to_string(vals(i)) + " below -" +
                            std::to_string(neg_tol));
    vals(i) = std::sqrt(std::max(vals(i), 0.0));
  }
  return eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace mtt
