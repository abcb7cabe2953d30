#pragma once

#include <cmath>
#include <string>

#include "tframe/drip.hpp"
#include "tframe/errors.hpp"
#include "tframe/frame.hpp"
#include "tframe/measurement.hpp"
#include "tframe/solver.hpp"

namespace tframe {

// Constants of the reconstruction-error bound
//   ||beta - beta_hat||_2 <= C0 * eps + C1 * tail_k(D^T beta) / sqrt(k),
// valid whenever delta_{2k} < 2/3. All four diverge as delta approaches 2/3.
struct BoundConstants {
  double delta = 0.0;
  double c0_prime = 0.0;
  double c1_prime = 0.0;
  double c0 = 0.0;
  double c1 = 0.0;
};

inline BoundConstants constants(double delta) {
  if (!(delta >= 0.0)) throw invalid_input("constants: delta must be nonnegative");
  if (!(delta < 2.0 / 3.0))
    throw out_of_domain("constants: delta = " + std::to_string(delta) +
                        " is outside [0, 2/3); the bound is vacuous there");
  const double gap = 2.0 - 3.0 * delta;  // 3 * (2/3 - delta)
  BoundConstants b;
  b.delta = delta;
  b.c0_prime = 4.0 * std::sqrt(1.0 + delta) / gap;
  b.c1_prime = (4.0 * delta + std::sqrt(2.0 * delta * gap)) / gap;
  b.c0 = 2.0 * b.c0_prime;
  b.c1 = 2.0 * (b.c1_prime + 1.0);
  return b;
}

// l1 mass of D^T beta outside its k largest-magnitude entries; zero exactly
// when the analysis coefficients are k-sparse.
inline double tail_l1(const Frame& frame, const Vector& beta, int k) {
  const Vector coeffs = analysis(frame, beta);
  const SupportSet top = top_k_support(coeffs, k);
  double kept = 0.0;
  for (int i : top.indices()) kept += std::abs(coeffs(i));
  return coeffs.lpNorm<1>() - kept;
}

struct TheoremCheck {
  int k = 0;
  double delta = 0.0;
  double c0 = 0.0;
  double c1 = 0.0;
  double eps = 0.0;
  double tail = 0.0;
  double lhs = 0.0;     // measured ||beta - gamma_hat||_2
  double rhs = 0.0;     // C0 * eps + C1 * tail / sqrt(k)
  double margin = 0.0;  // rhs - lhs
  bool holds = false;
};

// Evaluate the error bound on one solved instance. Demands the evidence the
// bound actually needs: an exact certificate at sparsity 2k with delta < 2/3
// and a converged solve.
inline TheoremCheck theorem_check(const SignalInstance& inst, const RecoveryResult& result,
                                  const DripCertificate& cert, const Frame& frame, int k,
                                  double check_tol = 1e-7) {
  if (k < 1) throw invalid_input("theorem_check: k must be at least 1");
  if (!(check_tol >= 0.0)) throw invalid_input("theorem_check: check_tol must be nonnegative");
  if (cert.method != DripMethod::exact)
    throw invalid_input("theorem_check: requires an exact certificate, got " +
                        drip_method_name(cert.method));
  if (cert.k != 2 * k)
    throw invalid_input("theorem_check: certificate is for sparsity " + std::to_string(cert.k) +
                        ", need 2k = " + std::to_string(2 * k));
  if (!(cert.delta < 2.0 / 3.0))
    throw invalid_input("theorem_check: certificate delta = " + std::to_string(cert.delta) +
                        " is not below 2/3");
  if (!result.converged)
    throw invalid_input("theorem_check: solver did not converge; the check needs a solution");
  if (inst.beta.size() != frame.p() || result.gamma_hat.size() != frame.p())
    throw invalid_input("theorem_check: dimension mismatch with the frame");

  const BoundConstants b = constants(cert.delta);
  TheoremCheck out;
  out.k = k;
  out.delta = cert.delta;
  out.c0 = b.c0;
  out.c1 = b.c1;
  out.eps = inst.eps;
  out.tail = tail_l1(frame, inst.beta, k);
  out.lhs = (inst.beta - result.gamma_hat).norm();
  out.rhs = b.c0 * inst.eps + b.c1 * out.tail / std::sqrt(static_cast<double>(k));
  out.margin = out.rhs - out.lhs;
  out.holds = out.margin >= -check_tol;
  return out;
}

}  // namespace tframe
