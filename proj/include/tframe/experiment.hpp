#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tframe/bounds.hpp"
#include "tframe/decompose.hpp"
#include "tframe/drip.hpp"
#include "tframe/errors.hpp"
#include "tframe/frame.hpp"
#include "tframe/measurement.hpp"
#include "tframe/rng.hpp"
#include "tframe/serialize.hpp"
#include "tframe/solver.hpp"

namespace tframe {

enum class FrameKind { identity, mercedes_benz, random_tight };

inline std::string frame_kind_name(FrameKind f) {
  switch (f) {
    case FrameKind::identity: return "identity";
    case FrameKind::mercedes_benz: return "mercedes_benz";
    case FrameKind::random_tight: return "random_tight";
  }
  throw invalid_input("frame_kind_name: unknown kind");
}

inline FrameKind frame_kind_from_name(const std::string& name) {
  if (name == "identity") return FrameKind::identity;
  if (name == "mercedes_benz") return FrameKind::mercedes_benz;
  if (name == "random_tight") return FrameKind::random_tight;
  throw invalid_input("frame_kind_from_name: unknown kind '" + name + "'");
}

struct ExperimentConfig {
  int p = 8;
  int d = 8;
  int n = 8;
  int k = 1;
  FrameKind frame = FrameKind::identity;
  bool orthonormal_phi = false;
  double eps = 0.0;
  double noise_fraction = 1.0;
  int trials = 10;
  std::uint64_t seed = 1;
  std::uint64_t enumeration_budget = 1'000'000;
  double rank_tol = 1e-10;
  double check_tol = 1e-7;
  SolverConfig solver;
};

// A trial either produced a theorem check, failed its hypothesis (delta_2k
// not below 2/3), or did not converge. Nothing is silently dropped.
enum class TrialStatus { ok, hypothesis_failed, not_converged };

inline std::string trial_status_name(TrialStatus s) {
  switch (s) {
    case TrialStatus::ok: return "ok";
    case TrialStatus::hypothesis_failed: return "hypothesis_failed";
    case TrialStatus::not_converged: return "not_converged";
  }
  throw invalid_input("trial_status_name: unknown status");
}

struct ExperimentRecord {
  int trial = 0;
  std::uint64_t seed = 0;
  TrialStatus status = TrialStatus::ok;
  DripCertificate certificate;
  bool converged = false;
  int iters_used = 0;
  double objective = 0.0;
  double feas_residual = 0.0;
  double tail = 0.0;
  double measured_error = 0.0;
  std::optional<TheoremCheck> check;
  double wall_ms = 0.0;  // diagnostic only; never serialized (outputs stay run-independent)
};

inline void validate_config(const ExperimentConfig& cfg) {
  if (cfg.p < 1) throw invalid_input("experiment: p must be at least 1");
  if (cfg.d < cfg.p) throw invalid_input("experiment: need d >= p");
  if (cfg.n < 1) throw invalid_input("experiment: n must be at least 1");
  if (cfg.k < 1) throw invalid_input("experiment: k must be at least 1");
  if (2 * cfg.k > cfg.d)
    throw invalid_input("experiment: need 2k <= d for the delta_2k certificate, got k=" +
                        std::to_string(cfg.k) + " d=" + std::to_string(cfg.d));
  if (cfg.frame == FrameKind::identity && cfg.d != cfg.p)
    throw invalid_input("experiment: identity frame needs d == p");
  if (cfg.frame == FrameKind::mercedes_benz && (cfg.p != 2 || cfg.d != 3))
    throw invalid_input("experiment: mercedes_benz frame needs p=2, d=3");
  if (cfg.orthonormal_phi && cfg.n < cfg.p)
    throw invalid_input("experiment: orthonormal Phi needs n >= p");
  if (!(cfg.eps >= 0.0)) throw invalid_input("experiment: eps must be nonnegative");
  if (!(cfg.noise_fraction >= 0.0 && cfg.noise_fraction <= 1.0))
    throw invalid_input("experiment: noise_fraction must lie in [0, 1]");
  if (cfg.trials < 1) throw invalid_input("experiment: trials must be at least 1");
  const std::uint64_t supports = binomial_coefficient(cfg.d, 2 * cfg.k);
  if (supports > cfg.enumeration_budget)
    throw budget_exceeded("experiment: C(" + std::to_string(cfg.d) + ", " +
                          std::to_string(2 * cfg.k) + ") = " + std::to_string(supports) +
                          " supports exceed the enumeration budget of " +
                          std::to_string(cfg.enumeration_budget));
}

inline std::uint64_t derive_trial_seed(std::uint64_t root, std::uint64_t trial) {
  std::uint64_t s = root ^ (0x9E3779B97F4A7C15ull * (trial + 1));
  return splitmix64_next(s);
}

inline ExperimentRecord run_trial(const ExperimentConfig& cfg, int trial) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentRecord rec;
  rec.trial = trial;
  rec.seed = derive_trial_seed(cfg.seed, static_cast<std::uint64_t>(trial));
  SeededRng rng(rec.seed);

  Frame frame = cfg.frame == FrameKind::identity ? identity_frame(cfg.p)
                : cfg.frame == FrameKind::mercedes_benz ? mercedes_benz_frame()
                : random_tight_frame(cfg.p, cfg.d, rng);
  MeasurementMatrix phi = cfg.orthonormal_phi ? orthonormal_measurement(cfg.n, cfg.p, rng)
                                              : gaussian_measurement(cfg.n, cfg.p, rng);

  // Ground truth with k-sparse analysis coefficients: synthesize from a
  // k-sparse coefficient vector, which for a tight frame lands D^T beta in
  // the row space with tail mass zero when the frame is a basis and small
  // otherwise; the bound is evaluated on whatever tail results.
  const auto support = rng.sample_without_replacement(cfg.k, cfg.d);
  Vector coeffs = Vector::Zero(cfg.d);
  for (int i : support) coeffs(i) = rng.normal();
  const Vector beta = synthesis(frame, coeffs);
  const SignalInstance inst = measure(phi, beta, cfg.eps, cfg.noise_fraction, rng);

  rec.certificate = delta_exact(phi, frame, 2 * cfg.k, cfg.rank_tol, cfg.enumeration_budget);
  const RecoveryResult result = solve_l1_analysis(phi, frame, inst.y, inst.eps, cfg.solver);
  rec.converged = result.converged;
  rec.iters_used = result.iters_used;
  rec.objective = result.objective;
  rec.feas_residual = result.feas_residual;
  rec.tail = tail_l1(frame, beta, cfg.k);
  rec.measured_error = (beta - result.gamma_hat).norm();

  if (!theorem_hypothesis_holds(rec.certificate)) {
    rec.status = TrialStatus::hypothesis_failed;
  } else if (!result.converged) {
    rec.status = TrialStatus::not_converged;
  } else {
    rec.status = TrialStatus::ok;
    rec.check = theorem_check(inst, result, rec.certificate, frame, cfg.k, cfg.check_tol);
  }
  rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

inline std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  std::vector<ExperimentRecord> records;
  records.reserve(static_cast<std::size_t>(cfg.trials));
  for (int t = 0; t < cfg.trials; ++t) records.push_back(run_trial(cfg, t));
  return records;
}

inline Json to_json(const ExperimentConfig& cfg) {
  return Json{{"p", cfg.p},
              {"d", cfg.d},
              {"n", cfg.n},
              {"k", cfg.k},
              {"frame", frame_kind_name(cfg.frame)},
              {"orthonormal_phi", cfg.orthonormal_phi},
              {"eps", cfg.eps},
              {"noise_fraction", cfg.noise_fraction},
              {"trials", cfg.trials},
              {"seed", cfg.seed},
              {"enumeration_budget", cfg.enumeration_budget},
              {"rank_tol", cfg.rank_tol},
              {"check_tol", cfg.check_tol},
              {"solver", Json{{"max_iters", cfg.solver.max_iters},
                              {"tol", cfg.solver.tol},
                              {"feas_slack", cfg.solver.feas_slack},
                              {"step_ratio", cfg.solver.step_ratio}}}};
}

inline Json to_json(const ExperimentRecord& rec) {
  Json j{{"trial", rec.trial},
         {"seed", rec.seed},
         {"status", trial_status_name(rec.status)},
         {"certificate", to_json(rec.certificate)},
         {"converged", rec.converged},
         {"iters_used", rec.iters_used},
         {"objective", rec.objective},
         {"feas_residual", rec.feas_residual},
         {"tail", rec.tail},
         {"measured_error", rec.measured_error}};
  j["check"] = rec.check ? to_json(*rec.check) : Json(nullptr);
  return j;
}

// One JSON object per line: a header with the config, then one line per trial.
inline std::string experiment_jsonl(const ExperimentConfig& cfg,
                                    const std::vector<ExperimentRecord>& records) {
  std::string out;
  out += Json{{"schema", "experiment/1"}, {"config", to_json(cfg)}}.dump();
  out += '\n';
  for (const auto& rec : records) {
    out += to_json(rec).dump();
    out += '\n';
  }
  return out;
}

// Plot-ready summary, one row per trial. Trials without a theorem check
// (hypothesis failed or no convergence) leave rhs/margin empty and put the
// status in the holds column.
inline std::string experiment_csv(const ExperimentConfig& cfg,
                                  const std::vector<ExperimentRecord>& records) {
  std::string out = "seed,delta2k,eps,tail,lhs,rhs,margin,holds\n";
  for (const auto& rec : records) {
    out += std::to_string(rec.seed);
    out += ',';
    out += format_double(rec.certificate.delta);
    out += ',';
    out += format_double(cfg.eps);
    out += ',';
    out += format_double(rec.tail);
    out += ',';
    out += format_double(rec.measured_error);
    out += ',';
    if (rec.check) {
      out += format_double(rec.check->rhs);
      out += ',';
      out += format_double(rec.check->margin);
      out += ',';
      out += rec.check->holds ? "true" : "false";
    } else {
      out += ",,";
      out += trial_status_name(rec.status);
    }
    out += '\n';
  }
  return out;
}

}  // namespace tframe
