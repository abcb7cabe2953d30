#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "tframe/bounds.hpp"
#include "tframe/decompose.hpp"
#include "tframe/drip.hpp"
#include "tframe/frame.hpp"
#include "tframe/measurement.hpp"
#include "tframe/report.hpp"
#include "tframe/rng.hpp"

namespace tframe {

namespace detail {

// Classical RIP constant of Phi by direct column-slice eigenvalues, the
// reduction target for delta_exact with an identity frame. Kept separate from
// the subspace-basis route on purpose.
inline double classical_rip_delta(const Matrix& phi, int k) {
  const int p = static_cast<int>(phi.cols());
  std::vector<int> comb(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) comb[static_cast<std::size_t>(i)] = i;
  double delta = 0.0;
  do {
    Matrix sub(phi.rows(), k);
    for (int i = 0; i < k; ++i) sub.col(i) = phi.col(comb[static_cast<std::size_t>(i)]);
    Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(sub.transpose() * sub), Eigen::EigenvaluesOnly);
    const Vector& ev = es.eigenvalues();
    delta = std::max({delta, ev(ev.size() - 1) - 1.0, 1.0 - ev(0)});
  } while (next_combination(comb, p));
  return delta;
}

// Residual of the tight-frame splitting identity
//   <D D_T^* h, D D_{T^c}^* h> = ||D_T^* h||^2 - ||D D_T^* h||^2.
// inject_fault flips the sign of the last term to prove the check can fail.
inline double analysis_identity_residual(const Frame& f, const Vector& h, const SupportSet& t,
                                         bool inject_fault) {
  const Matrix dt = restrict_columns(f, t);
  const Matrix dtc = restrict_columns(f, t.complement());
  const Vector vt = dt.transpose() * h;
  const Vector vtc = dtc.transpose() * h;
  const Vector dvt = f.matrix() * vt;
  const double lhs = dvt.dot(f.matrix() * vtc);
  const double sign = inject_fault ? 1.0 : -1.0;
  const double rhs = vt.squaredNorm() + sign * dvt.squaredNorm();
  return std::abs(lhs - rhs) / std::max(1.0, h.squaredNorm());
}

}  // namespace detail

// End-to-end health check of the library's own claims on fresh random data.
// inject_fault demonstrates that the harness actually detects a broken
// identity instead of rubber-stamping everything.
inline std::vector<CheckLine> run_selftest(bool inject_fault = false) {
  std::vector<CheckLine> checks;
  SeededRng rng(0xC0FFEEull);

  std::vector<Frame> frames;
  frames.push_back(identity_frame(6));
  frames.push_back(mercedes_benz_frame());
  frames.push_back(random_tight_frame(3, 7, rng));

  for (const auto& f : frames) {
    const double tight = tightness_residual(f.matrix());
    checks.push_back({"tightness/" + f.label(), tight, 1e-10, tight <= 1e-10});

    double parseval = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
      const Vector x = rng.normal_vector(f.p());
      parseval = std::max(parseval,
                          std::abs(analysis(f, x).squaredNorm() - x.squaredNorm()) /
                              std::max(1.0, x.squaredNorm()));
    }
    checks.push_back({"parseval/" + f.label(), parseval, 1e-10, parseval <= 1e-10});

    double identity_resid = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
      const Vector h = rng.normal_vector(f.p());
      const int size = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(f.d())));
      const auto t = SupportSet::of(rng.sample_without_replacement(size, f.d()), f.d());
      identity_resid = std::max(identity_resid,
                                detail::analysis_identity_residual(f, h, t, inject_fault));
    }
    checks.push_back(
        {"analysis_identity/" + f.label(), identity_resid, 1e-9, identity_resid <= 1e-9});
  }

  double worst_decomp = 0.0;
  bool decomp_pass = true;
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 4 + static_cast<int>(rng.below(13));
    const int k = 1 + static_cast<int>(rng.below(3));
    Vector v = rng.normal_vector(n);
    const double c = std::max(v.lpNorm<1>(), k * v.lpNorm<Eigen::Infinity>());
    const auto dec = convex_k_sparse_decompose(v, k, c);
    for (const auto& line : validate_decomposition(v, dec)) {
      decomp_pass = decomp_pass && line.pass;
      if (line.tolerance > 0.0) worst_decomp = std::max(worst_decomp, line.residual);
    }
  }
  checks.push_back({"decompose_roundtrip", worst_decomp, 1e-10, decomp_pass});

  double rip_gap = 0.0;
  for (int rep = 0; rep < 5; ++rep) {
    const int p = 4 + static_cast<int>(rng.below(3));
    const int n = 3 + static_cast<int>(rng.below(4));
    const int k = 1 + static_cast<int>(rng.below(2));
    const auto phi = gaussian_measurement(n, p, rng);
    const auto cert = delta_exact(phi, identity_frame(p), k);
    rip_gap = std::max(rip_gap, std::abs(cert.delta - detail::classical_rip_delta(phi.phi, k)));
  }
  checks.push_back({"rip_reduction", rip_gap, 1e-10, rip_gap <= 1e-10});

  const BoundConstants at0 = constants(0.0);
  const BoundConstants at13 = constants(1.0 / 3.0);
  const double const_resid = std::max(
      {std::abs(at0.c0_prime - 2.0), std::abs(at0.c1_prime), std::abs(at0.c0 - 4.0),
       std::abs(at0.c1 - 2.0), std::abs(at13.c0_prime - 8.0 / std::sqrt(3.0))});
  checks.push_back({"constants_values", const_resid, 1e-12, const_resid <= 1e-12});

  bool guard = false;
  try {
    constants(2.0 / 3.0);
  } catch (const out_of_domain&) {
    guard = true;
  }
  checks.push_back({"constants_domain_guard", guard ? 0.0 : 1.0, 0.0, guard});

  return checks;
}

}  // namespace tframe
