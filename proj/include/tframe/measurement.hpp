#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <utility>

#include "tframe/errors.hpp"
#include "tframe/frame.hpp"
#include "tframe/rng.hpp"

namespace tframe {

// n x p sensing matrix.
struct MeasurementMatrix {
  Matrix phi;
  std::string ensemble;

  int n() const { return static_cast<int>(phi.rows()); }
  int p() const { return static_cast<int>(phi.cols()); }
};

// Entries i.i.d. N(0, 1/n), the normalization that keeps E||Phi x||^2 = ||x||^2.
inline MeasurementMatrix gaussian_measurement(int n, int p, SeededRng& rng) {
  if (n < 1 || p < 1) throw invalid_input("gaussian_measurement: need n >= 1 and p >= 1");
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  return {scale * rng.normal_matrix(n, p), "gaussian"};
}

// Orthonormal columns (Phi^T Phi = I), the nearest such matrix to a Gaussian draw.
inline MeasurementMatrix orthonormal_measurement(int n, int p, SeededRng& rng) {
  if (p < 1 || n < p) throw invalid_input("orthonormal_measurement: need n >= p >= 1");
  for (int attempt = 0; attempt < 8; ++attempt) {
    const Matrix g = rng.normal_matrix(n, p);
    Eigen::JacobiSVD<Matrix> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sigma = svd.singularValues();
    if (sigma(sigma.size() - 1) <= 1e-10 * sigma(0)) continue;
    return {svd.matrixU() * svd.matrixV().transpose(), "orthonormal"};
  }
  throw std::runtime_error("orthonormal_measurement: 8 degenerate draws in a row");
}

// One recovery problem: the ground truth, its noisy measurements, and the
// noise that was actually added.
struct SignalInstance {
  Vector beta;
  Vector y;
  Vector z;
  double eps = 0.0;
};

// y = Phi beta + z with z drawn on the sphere of radius noise_fraction * eps,
// so ||z|| <= eps always holds and the instance is feasible for the recovery
// program by construction.
inline SignalInstance measure(const MeasurementMatrix& phi, const Vector& beta, double eps,
                              double noise_fraction, SeededRng& rng) {
  if (beta.size() != phi.p())
    throw invalid_input("measure: beta has size " + std::to_string(beta.size()) +
                        ", Phi has p=" + std::to_string(phi.p()));
  if (!(eps >= 0.0)) throw invalid_input("measure: eps must be nonnegative");
  if (!(noise_fraction >= 0.0 && noise_fraction <= 1.0))
    throw invalid_input("measure: noise_fraction must lie in [0, 1]");
  const double radius = noise_fraction * eps;
  Vector z = Vector::Zero(phi.n());
  if (radius > 0.0) {
    Vector g = rng.normal_vector(phi.n());
    while (g.norm() <= 1e-12) g = rng.normal_vector(phi.n());
    z = (radius / g.norm()) * g;
    const double nz = z.norm();
    if (nz > eps) z *= eps / nz;  // guard the one-ulp overshoot at noise_fraction = 1
  }
  SignalInstance inst;
  inst.beta = beta;
  inst.y = phi.phi * beta + z;
  inst.z = std::move(z);
  inst.eps = eps;
  return inst;
}

}  // namespace tframe
