#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <utility>

#include "tframe/errors.hpp"
#include "tframe/rng.hpp"

namespace tframe {

// Orthonormal basis Q for the column space of M, with the detected rank.
// Columns of M whose singular values fall below rank_tol * sigma_max are
// treated as dependent.
inline std::pair<Matrix, Index> orthonormal_column_basis(const Matrix& m, double rank_tol = 1e-10) {
  if (!(rank_tol > 0.0)) throw invalid_input("orthonormal_column_basis: rank_tol must be positive");
  if (!m.allFinite()) throw invalid_input("orthonormal_column_basis: matrix has non-finite entries");
  if (m.rows() == 0 || m.cols() == 0) return {Matrix(m.rows(), 0), 0};
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
  const Vector& sigma = svd.singularValues();
  const double smax = sigma.size() > 0 ? sigma(0) : 0.0;
  Index rank = 0;
  if (smax > 0.0) {
    for (Index i = 0; i < sigma.size(); ++i)
      if (sigma(i) > rank_tol * smax) ++rank;
  }
  return {svd.matrixU().leftCols(rank), rank};
}

// Smallest and largest eigenvalue of a symmetric matrix.
inline std::pair<double, double> symmetric_eig_extremes(const Matrix& s) {
  if (s.rows() != s.cols() || s.rows() == 0)
    throw invalid_input("symmetric_eig_extremes: matrix must be square and non-empty");
  if (!s.allFinite()) throw invalid_input("symmetric_eig_extremes: matrix has non-finite entries");
  const double scale = s.cwiseAbs().maxCoeff();
  const double asym = (s - s.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale)
    throw invalid_input("symmetric_eig_extremes: matrix is not symmetric");
  const Matrix sym = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw invalid_input("symmetric_eig_extremes: eigendecomposition failed");
  const Vector& ev = es.eigenvalues();
  return {ev(0), ev(ev.size() - 1)};
}

// Power iteration estimate of ||A||^2 for an operator given by apply/adjoint
// callables on R^dim. The estimate never exceeds the true value and is
// nondecreasing in iters for a fixed starting vector.
template <class Apply, class Adjoint>
double operator_norm_sq(Apply&& apply, Adjoint&& adjoint, Index dim, int iters, SeededRng& rng) {
  if (iters < 1) throw invalid_input("operator_norm_sq: iters must be at least 1");
  if (dim < 0) throw invalid_input("operator_norm_sq: negative dimension");
  if (dim == 0) return 0.0;
  Vector v = rng.normal_vector(dim);
  const double nv = v.norm();
  if (nv == 0.0) return 0.0;
  v /= nv;
  double est = 0.0;
  for (int t = 0; t < iters; ++t) {
    Vector av = apply(v);
    est = av.squaredNorm();
    if (est == 0.0) return 0.0;  // v is in the kernel of A^T A
    Vector bv = adjoint(av);
    const double nb = bv.norm();
    if (nb == 0.0) return est;
    v = bv / nb;
  }
  return est;
}

inline double operator_norm_sq(const Matrix& a, int iters, SeededRng& rng) {
  return operator_norm_sq([&](const Vector& x) { return Vector(a * x); },
                          [&](const Vector& u) { return Vector(a.transpose() * u); }, a.cols(),
                          iters, rng);
}

}  // namespace tframe
