#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <string>

#include "tframe/bounds.hpp"
#include "tframe/decompose.hpp"
#include "tframe/drip.hpp"
#include "tframe/errors.hpp"
#include "tframe/experiment.hpp"
#include "tframe/frame.hpp"
#include "tframe/matrix_io.hpp"
#include "tframe/measurement.hpp"
#include "tframe/selftest.hpp"
#include "tframe/serialize.hpp"
#include "tframe/solver.hpp"

namespace {

struct GlobalOpts {
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "json";
};

void emit(const GlobalOpts& g, const std::string& payload) {
  if (g.out.empty() || g.out == "-")
    std::cout << payload;
  else
    tframe::write_text_file(g.out, payload);
}

void require_json_format(const GlobalOpts& g, const std::string& cmd) {
  if (g.format != "json")
    throw tframe::invalid_input(cmd + ": only --format json is available here");
}

std::string strip_csv_suffix(const std::string& path) {
  if (path.size() > 4 && path.substr(path.size() - 4) == ".csv")
    return path.substr(0, path.size() - 4);
  return path;
}

tframe::Frame load_frame(const std::string& path) {
  return tframe::Frame(tframe::read_matrix_csv(path), "loaded");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tight-frame l1-analysis recovery toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOpts g;
  app.add_option("--seed", g.seed, "Root RNG seed")->capture_default_str();
  app.add_option("--out", g.out, "Output path ('-' or empty for stdout)");
  app.add_option("--format", g.format, "Primary output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();

  bool selftest_failed = false;

  // frame gen
  auto* frame_cmd = app.add_subcommand("frame", "Tight-frame constructors");
  frame_cmd->require_subcommand(1);
  auto* gen = frame_cmd->add_subcommand("gen", "Generate a frame; writes <out>.csv and <out>.json");
  struct {
    std::string kind = "identity";
    int p = 4;
    int d = -1;
  } gen_opts;
  gen->add_option("--kind", gen_opts.kind, "Frame family")
      ->check(CLI::IsMember({"identity", "mercedes_benz", "random_tight"}))
      ->capture_default_str();
  gen->add_option("--p", gen_opts.p, "Signal dimension")->capture_default_str();
  gen->add_option("--d", gen_opts.d, "Number of frame vectors (defaults to p)");
  gen->callback([&] {
    require_json_format(g, "frame gen");
    tframe::SeededRng rng(g.seed);
    const int d = gen_opts.d < 0 ? gen_opts.p : gen_opts.d;
    tframe::Frame frame = [&] {
      const auto kind = tframe::frame_kind_from_name(gen_opts.kind);
      switch (kind) {
        case tframe::FrameKind::identity:
          if (d != gen_opts.p) throw tframe::invalid_input("frame gen: identity needs d == p");
          return tframe::identity_frame(gen_opts.p);
        case tframe::FrameKind::mercedes_benz:
          if (!((gen_opts.p == 4 && gen_opts.d < 0) || (gen_opts.p == 2 && d == 3)))
            throw tframe::invalid_input("frame gen: mercedes_benz is fixed at p=2, d=3");
          return tframe::mercedes_benz_frame();
        default:
          return tframe::random_tight_frame(gen_opts.p, d, rng);
      }
    }();
    const std::string base = strip_csv_suffix(g.out.empty() ? "frame" : g.out);
    tframe::write_text_file(base + ".csv", tframe::matrix_to_csv(frame.matrix()));
    tframe::write_text_file(base + ".json", tframe::frame_sidecar_json(frame).dump() + "\n");
    std::cerr << "wrote " << base << ".csv and " << base << ".json\n";
  });

  // measure
  auto* meas = app.add_subcommand("measure", "Draw measurements y = Phi beta + z");
  struct {
    std::string beta_path;
    std::string phi_path;
    int gaussian_n = 0;
    int orthonormal_n = 0;
    double eps = 0.0;
    double noise_fraction = 1.0;
    std::string emit_phi;
    std::string emit_y;
  } m_opts;
  meas->add_option("--beta", m_opts.beta_path, "Ground-truth vector CSV")->required();
  auto* phi_file = meas->add_option("--phi", m_opts.phi_path, "Sensing matrix CSV");
  auto* phi_gauss = meas->add_option("--gaussian-n", m_opts.gaussian_n,
                                     "Draw an n x p Gaussian sensing matrix instead");
  auto* phi_orth = meas->add_option("--orthonormal-n", m_opts.orthonormal_n,
                                    "Draw an n x p orthonormal-column sensing matrix instead");
  phi_file->excludes(phi_gauss)->excludes(phi_orth);
  phi_gauss->excludes(phi_orth);
  meas->add_option("--eps", m_opts.eps, "Noise level of the recovery program")->capture_default_str();
  meas->add_option("--noise-fraction", m_opts.noise_fraction, "||z|| as a fraction of eps")
      ->capture_default_str();
  meas->add_option("--emit-phi", m_opts.emit_phi, "Also write the sensing matrix CSV here");
  meas->add_option("--emit-y", m_opts.emit_y, "Also write y as CSV here");
  meas->callback([&] {
    require_json_format(g, "measure");
    tframe::SeededRng rng(g.seed);
    const tframe::Vector beta = tframe::read_vector_csv(m_opts.beta_path);
    const int p = static_cast<int>(beta.size());
    tframe::MeasurementMatrix phi = [&] {
      if (!m_opts.phi_path.empty())
        return tframe::MeasurementMatrix{tframe::read_matrix_csv(m_opts.phi_path), "loaded"};
      if (m_opts.orthonormal_n > 0)
        return tframe::orthonormal_measurement(m_opts.orthonormal_n, p, rng);
      if (m_opts.gaussian_n > 0) return tframe::gaussian_measurement(m_opts.gaussian_n, p, rng);
      throw tframe::invalid_input("measure: need --phi, --gaussian-n, or --orthonormal-n");
    }();
    const auto inst = tframe::measure(phi, beta, m_opts.eps, m_opts.noise_fraction, rng);
    if (!m_opts.emit_phi.empty())
      tframe::write_text_file(m_opts.emit_phi, tframe::matrix_to_csv(phi.phi));
    if (!m_opts.emit_y.empty())
      tframe::write_text_file(m_opts.emit_y, tframe::vector_to_csv(inst.y));
    emit(g, tframe::to_json(inst).dump() + "\n");
  });

  // drip certify
  auto* drip_cmd = app.add_subcommand("drip", "Restricted-isometry certification");
  drip_cmd->require_subcommand(1);
  auto* certify = drip_cmd->add_subcommand("certify", "Certify delta_k for (Phi, D)");
  struct {
    std::string phi_path;
    std::string frame_path;
    int k = 1;
    std::string method = "exact";
    std::uint64_t budget = 1'000'000;
    std::uint64_t samples = 10'000;
    double rank_tol = 1e-10;
  } c_opts;
  certify->add_option("--phi", c_opts.phi_path, "Sensing matrix CSV")->required();
  certify->add_option("--frame", c_opts.frame_path, "Frame matrix CSV")->required();
  certify->add_option("--k", c_opts.k, "Sparsity level")->required();
  certify->add_option("--method", c_opts.method, "exact enumeration or Monte-Carlo lower bound")
      ->check(CLI::IsMember({"exact", "lower_bound"}))
      ->capture_default_str();
  certify->add_option("--budget", c_opts.budget, "Support enumeration budget")->capture_default_str();
  certify->add_option("--samples", c_opts.samples, "Monte-Carlo samples")->capture_default_str();
  certify->add_option("--rank-tol", c_opts.rank_tol, "Rank tolerance")->capture_default_str();
  certify->callback([&] {
    require_json_format(g, "drip certify");
    const auto frame = load_frame(c_opts.frame_path);
    const tframe::MeasurementMatrix phi{tframe::read_matrix_csv(c_opts.phi_path), "loaded"};
    tframe::DripCertificate cert;
    if (c_opts.method == "exact") {
      cert = tframe::delta_exact(phi, frame, c_opts.k, c_opts.rank_tol, c_opts.budget);
    } else {
      tframe::SeededRng rng(g.seed);
      cert = tframe::delta_lower_mc(phi, frame, c_opts.k, c_opts.samples, rng);
    }
    emit(g, tframe::to_json(cert).dump() + "\n");
  });

  // decompose
  auto* dec_cmd = app.add_subcommand("decompose", "Convex k-sparse decomposition of a vector");
  struct {
    std::string v_path;
    int k = 1;
    double c = -1.0;
    std::uint64_t budget = 1u << 20;
  } d_opts;
  dec_cmd->add_option("--v", d_opts.v_path, "Vector CSV")->required();
  dec_cmd->add_option("--k", d_opts.k, "Atom sparsity")->required();
  dec_cmd->add_option("--c", d_opts.c, "l1 budget C (defaults to max(||v||_1, k ||v||_inf))");
  dec_cmd->add_option("--budget", d_opts.budget, "Distinct-atom budget")->capture_default_str();
  dec_cmd->callback([&] {
    require_json_format(g, "decompose");
    const tframe::Vector v = tframe::read_vector_csv(d_opts.v_path);
    double c = d_opts.c;
    if (c < 0.0)
      c = std::max(v.lpNorm<1>(), d_opts.k * v.lpNorm<Eigen::Infinity>());
    const auto dec = tframe::convex_k_sparse_decompose(v, d_opts.k, c, d_opts.budget);
    emit(g, tframe::to_json(dec).dump() + "\n");
  });

  // recover
  auto* rec_cmd = app.add_subcommand("recover", "Solve the l1-analysis recovery program");
  struct {
    std::string phi_path;
    std::string frame_path;
    std::string y_path;
    double eps = 0.0;
    tframe::SolverConfig solver;
  } r_opts;
  rec_cmd->add_option("--phi", r_opts.phi_path, "Sensing matrix CSV")->required();
  rec_cmd->add_option("--frame", r_opts.frame_path, "Frame matrix CSV")->required();
  rec_cmd->add_option("--y", r_opts.y_path, "Measurement vector CSV")->required();
  rec_cmd->add_option("--eps", r_opts.eps, "Noise level")->capture_default_str();
  rec_cmd->add_option("--max-iters", r_opts.solver.max_iters)->capture_default_str();
  rec_cmd->add_option("--tol", r_opts.solver.tol)->capture_default_str();
  rec_cmd->add_option("--feas-slack", r_opts.solver.feas_slack)->capture_default_str();
  rec_cmd->add_option("--step-ratio", r_opts.solver.step_ratio)->capture_default_str();
  rec_cmd->callback([&] {
    require_json_format(g, "recover");
    const auto frame = load_frame(r_opts.frame_path);
    const tframe::MeasurementMatrix phi{tframe::read_matrix_csv(r_opts.phi_path), "loaded"};
    const tframe::Vector y = tframe::read_vector_csv(r_opts.y_path);
    const auto result = tframe::solve_l1_analysis(phi, frame, y, r_opts.eps, r_opts.solver);
    emit(g, tframe::to_json(result).dump() + "\n");
  });

  // experiment
  auto* exp_cmd = app.add_subcommand("experiment", "Seeded end-to-end bound verification runs");
  tframe::ExperimentConfig cfg;
  std::string frame_kind = "identity";
  std::string csv_path;
  exp_cmd->add_option("--p", cfg.p)->capture_default_str();
  exp_cmd->add_option("--d", cfg.d)->capture_default_str();
  exp_cmd->add_option("--n", cfg.n)->capture_default_str();
  exp_cmd->add_option("--k", cfg.k)->capture_default_str();
  exp_cmd->add_option("--frame", frame_kind, "identity, mercedes_benz, or random_tight")
      ->check(CLI::IsMember({"identity", "mercedes_benz", "random_tight"}))
      ->capture_default_str();
  exp_cmd->add_flag("--orthonormal-phi", cfg.orthonormal_phi, "Use orthonormal-column Phi");
  exp_cmd->add_option("--eps", cfg.eps)->capture_default_str();
  exp_cmd->add_option("--noise-fraction", cfg.noise_fraction)->capture_default_str();
  exp_cmd->add_option("--trials", cfg.trials)->capture_default_str();
  exp_cmd->add_option("--budget", cfg.enumeration_budget)->capture_default_str();
  exp_cmd->add_option("--rank-tol", cfg.rank_tol)->capture_default_str();
  exp_cmd->add_option("--check-tol", cfg.check_tol)->capture_default_str();
  exp_cmd->add_option("--max-iters", cfg.solver.max_iters)->capture_default_str();
  exp_cmd->add_option("--tol", cfg.solver.tol)->capture_default_str();
  exp_cmd->add_option("--feas-slack", cfg.solver.feas_slack)->capture_default_str();
  exp_cmd->add_option("--step-ratio", cfg.solver.step_ratio)->capture_default_str();
  exp_cmd->add_option("--csv", csv_path, "Also write the CSV summary here");
  exp_cmd->callback([&] {
    cfg.seed = g.seed;
    cfg.frame = tframe::frame_kind_from_name(frame_kind);
    const auto records = tframe::run_experiment(cfg);
    if (g.format == "csv")
      emit(g, tframe::experiment_csv(cfg, records));
    else
      emit(g, tframe::experiment_jsonl(cfg, records));
    if (!csv_path.empty())
      tframe::write_text_file(csv_path, tframe::experiment_csv(cfg, records));
    double total_ms = 0.0;
    int ok = 0, hypo = 0, nc = 0;
    for (const auto& r : records) {
      total_ms += r.wall_ms;
      if (r.status == tframe::TrialStatus::ok) ++ok;
      if (r.status == tframe::TrialStatus::hypothesis_failed) ++hypo;
      if (r.status == tframe::TrialStatus::not_converged) ++nc;
    }
    std::cerr << "experiment: " << records.size() << " trials in " << total_ms << " ms (ok " << ok
              << ", hypothesis_failed " << hypo << ", not_converged " << nc << ")\n";
  });

  // selftest
  auto* self_cmd = app.add_subcommand("selftest", "Run the built-in health checks");
  bool inject_fault = false;
  self_cmd->add_flag("--inject-fault", inject_fault,
                     "Deliberately break one identity to prove the checks can fail");
  self_cmd->callback([&] {
    require_json_format(g, "selftest");
    const auto checks = tframe::run_selftest(inject_fault);
    std::string report;
    for (const auto& c : checks) {
      report += c.pass ? "[PASS] " : "[FAIL] ";
      report += c.name + " residual=" + tframe::format_double(c.residual) +
                " tol=" + tframe::format_double(c.tolerance) + "\n";
    }
    emit(g, report);
    selftest_failed = !tframe::all_pass(checks);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const tframe::budget_exceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const tframe::invalid_input& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const tframe::out_of_domain& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const tframe::indeterminate_result& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return selftest_failed ? 4 : 0;
}
