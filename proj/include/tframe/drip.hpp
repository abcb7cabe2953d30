#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "tframe/errors.hpp"
#include "tframe/frame.hpp"
#include "tframe/linalg.hpp"
#include "tframe/measurement.hpp"
#include "tframe/rng.hpp"

namespace tframe {

// How a restricted-isometry constant was obtained. An exact certificate is a
// two-sided guarantee from full support enumeration; a lower bound only
// witnesses that the true constant is at least this large.
enum class DripMethod { exact, lower_bound };

struct DripCertificate {
  int k = 0;
  double delta = 0.0;
  DripMethod method = DripMethod::exact;
  std::uint64_t supports_examined = 0;
  std::uint64_t samples = 0;
  double rank_tol = 0.0;
};

inline std::string drip_method_name(DripMethod m) {
  return m == DripMethod::exact ? "exact" : "lower_bound";
}

// C(n, k) with saturation at uint64 max instead of overflow.
inline std::uint64_t binomial_coefficient(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t c = 1;
  for (int i = 1; i <= k; ++i) {
    const auto f = static_cast<std::uint64_t>(n - k + i);
    if (c > std::numeric_limits<std::uint64_t>::max() / f)
      return std::numeric_limits<std::uint64_t>::max();
    c = c * f / i;  // exact: c * f is divisible by i at every step
  }
  return c;
}

namespace detail {

// Advance a k-combination of {0..d-1} in lexicographic order.
inline bool next_combination(std::vector<int>& comb, int d) {
  const int k = static_cast<int>(comb.size());
  for (int i = k - 1; i >= 0; --i) {
    if (comb[static_cast<std::size_t>(i)] < d - k + i) {
      int v = ++comb[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < k; ++j) comb[static_cast<std::size_t>(j)] = ++v;
      return true;
    }
  }
  return false;
}

}  // namespace detail

struct SparseSubspaceEigenRange {
  double lambda_min = 1.0;
  double lambda_max = 1.0;
  std::uint64_t supports_examined = 0;
};

// For every support S of size k, the eigenvalues of Phi restricted to the
// subspace D_S spans are those of (Phi Q)^T (Phi Q) where Q is an orthonormal
// basis of col(D_S). This returns the extremes over all supports. Supports
// whose columns are entirely dependent (rank 0) span nothing and are skipped;
// if every support is skipped the range collapses to {1}, i.e. delta = 0.
inline SparseSubspaceEigenRange sparse_subspace_eigen_range(const MeasurementMatrix& phi,
                                                            const Frame& frame, int k,
                                                            double rank_tol = 1e-10) {
  if (phi.p() != frame.p())
    throw invalid_input("sparse_subspace_eigen_range: Phi has p=" + std::to_string(phi.p()) +
                        ", frame has p=" + std::to_string(frame.p()));
  const int d = frame.d();
  if (k < 1 || k > d)
    throw invalid_input("sparse_subspace_eigen_range: need 1 <= k <= " + std::to_string(d));
  if (!(rank_tol > 0.0))
    throw invalid_input("sparse_subspace_eigen_range: rank_tol must be positive");

  SparseSubspaceEigenRange out;
  out.lambda_min = std::numeric_limits<double>::infinity();
  out.lambda_max = -std::numeric_limits<double>::infinity();
  bool any = false;
  std::vector<int> comb(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) comb[static_cast<std::size_t>(i)] = i;
  Matrix cols(frame.p(), k);
  do {
    ++out.supports_examined;
    for (int i = 0; i < k; ++i) cols.col(i) = frame.matrix().col(comb[static_cast<std::size_t>(i)]);
    const auto [q, rank] = orthonormal_column_basis(cols, rank_tol);
    if (rank == 0) continue;
    const Matrix b = phi.phi * q;
    const auto [lo, hi] = symmetric_eig_extremes(b.transpose() * b);
    out.lambda_min = std::min(out.lambda_min, lo);
    out.lambda_max = std::max(out.lambda_max, hi);
    any = true;
  } while (detail::next_combination(comb, d));
  if (!any) {
    out.lambda_min = 1.0;
    out.lambda_max = 1.0;
  }
  return out;
}

// Exact D-RIP constant by support enumeration. Refuses up front when C(d, k)
// exceeds the enumeration budget.
inline DripCertificate delta_exact(const MeasurementMatrix& phi, const Frame& frame, int k,
                                   double rank_tol = 1e-10,
                                   std::uint64_t enumeration_budget = 1'000'000) {
  const std::uint64_t total = binomial_coefficient(frame.d(), k);
  if (k >= 1 && k <= frame.d() && total > enumeration_budget)
    throw budget_exceeded("delta_exact: C(" + std::to_string(frame.d()) + ", " +
                          std::to_string(k) + ") = " + std::to_string(total) +
                          " supports exceed the enumeration budget of " +
                          std::to_string(enumeration_budget));
  const auto range = sparse_subspace_eigen_range(phi, frame, k, rank_tol);
  DripCertificate cert;
  cert.k = k;
  cert.delta = std::max(range.lambda_max - 1.0, 1.0 - range.lambda_min);
  cert.method = DripMethod::exact;
  cert.supports_examined = range.supports_examined;
  cert.samples = 0;
  cert.rank_tol = rank_tol;
  return cert;
}

// Monte-Carlo lower bound: max deviation |(||Phi D v||/||D v||)^2 - 1| over
// random k-sparse coefficient draws. Always a valid lower bound on the true
// constant, never a certificate that the hypothesis holds.
inline DripCertificate delta_lower_mc(const MeasurementMatrix& phi, const Frame& frame, int k,
                                      std::uint64_t samples, SeededRng& rng) {
  if (phi.p() != frame.p())
    throw invalid_input("delta_lower_mc: Phi has p=" + std::to_string(phi.p()) +
                        ", frame has p=" + std::to_string(frame.p()));
  const int d = frame.d();
  if (k < 1 || k > d) throw invalid_input("delta_lower_mc: need 1 <= k <= " + std::to_string(d));
  if (samples < 1) throw invalid_input("delta_lower_mc: need at least one sample");
  const double rank_tol = 1e-10;
  double worst = 0.0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    const auto support = rng.sample_without_replacement(k, d);
    Vector coeff = rng.normal_vector(k);
    Vector dv = Vector::Zero(frame.p());
    for (int i = 0; i < k; ++i) dv += coeff(i) * frame.matrix().col(support[static_cast<std::size_t>(i)]);
    const double ndv = dv.norm();
    if (ndv <= rank_tol * coeff.norm()) continue;  // v is (numerically) in the kernel of D
    const double ratio = (phi.phi * dv).squaredNorm() / (ndv * ndv);
    worst = std::max(worst, std::abs(ratio - 1.0));
  }
  DripCertificate cert;
  cert.k = k;
  cert.delta = worst;
  cert.method = DripMethod::lower_bound;
  cert.supports_examined = 0;
  cert.samples = samples;
  cert.rank_tol = rank_tol;
  return cert;
}

// Whether the certificate establishes delta_k < 2/3. A lower bound can refute
// the hypothesis but never confirm it.
inline bool theorem_hypothesis_holds(const DripCertificate& cert) {
  const double threshold = 2.0 / 3.0;
  if (cert.method == DripMethod::exact) return cert.delta < threshold;
  if (cert.delta >= threshold) return false;
  throw indeterminate_result(
      "theorem_hypothesis_holds: a lower-bound certificate with delta < 2/3 cannot confirm "
      "the hypothesis; use an exact certificate");
}

}  // namespace tframe
