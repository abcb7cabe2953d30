#pragma once

#include <json.hpp>
#include <string>

#include "tframe/bounds.hpp"
#include "tframe/decompose.hpp"
#include "tframe/drip.hpp"
#include "tframe/frame.hpp"
#include "tframe/matrix_io.hpp"
#include "tframe/measurement.hpp"
#include "tframe/report.hpp"
#include "tframe/solver.hpp"

namespace tframe {

using Json = nlohmann::json;

// Vectors ride inside JSON as CSV strings so both formats share one
// full-precision encoding.
inline Json vector_to_json(const Vector& v) { return vector_to_csv(v); }

inline Vector vector_from_json(const Json& j) {
  if (!j.is_string()) throw invalid_input("vector_from_json: expected a CSV string");
  return vector_from_csv(j.get<std::string>());
}

inline Json to_json(const DripCertificate& c) {
  return Json{{"k", c.k},
              {"delta", c.delta},
              {"method", drip_method_name(c.method)},
              {"supports_examined", c.supports_examined},
              {"samples", c.samples},
              {"rank_tol", c.rank_tol}};
}

inline DripCertificate drip_certificate_from_json(const Json& j) {
  DripCertificate c;
  c.k = j.at("k").get<int>();
  c.delta = j.at("delta").get<double>();
  const auto method = j.at("method").get<std::string>();
  if (method == "exact")
    c.method = DripMethod::exact;
  else if (method == "lower_bound")
    c.method = DripMethod::lower_bound;
  else
    throw invalid_input("drip_certificate_from_json: unknown method '" + method + "'");
  c.supports_examined = j.at("supports_examined").get<std::uint64_t>();
  c.samples = j.at("samples").get<std::uint64_t>();
  c.rank_tol = j.at("rank_tol").get<double>();
  return c;
}

inline Json frame_sidecar_json(const Frame& f) {
  return Json{{"label", f.label()}, {"p", f.p()}, {"d", f.d()}};
}

inline Json to_json(const SignalInstance& inst) {
  return Json{{"eps", inst.eps},
              {"beta", vector_to_json(inst.beta)},
              {"y", vector_to_json(inst.y)},
              {"z", vector_to_json(inst.z)}};
}

inline SignalInstance signal_instance_from_json(const Json& j) {
  SignalInstance inst;
  inst.eps = j.at("eps").get<double>();
  inst.beta = vector_from_json(j.at("beta"));
  inst.y = vector_from_json(j.at("y"));
  inst.z = vector_from_json(j.at("z"));
  return inst;
}

inline Json to_json(const RecoveryResult& r) {
  return Json{{"gamma_hat", vector_to_json(r.gamma_hat)},
              {"iters_used", r.iters_used},
              {"objective", r.objective},
              {"feas_residual", r.feas_residual},
              {"converged", r.converged}};
}

inline Json to_json(const TheoremCheck& c) {
  return Json{{"k", c.k},      {"delta", c.delta}, {"c0", c.c0},         {"c1", c.c1},
              {"eps", c.eps},  {"tail", c.tail},   {"lhs", c.lhs},       {"rhs", c.rhs},
              {"margin", c.margin}, {"holds", c.holds}};
}

inline Json to_json(const SparseDecomposition& dec) {
  Json atoms = Json::array();
  for (const auto& atom : dec.atoms) {
    Json entries = Json::array();
    for (Index i = 0; i < atom.size(); ++i)
      if (atom(i) != 0.0) entries.push_back(Json{{"index", i}, {"value", atom(i)}});
    atoms.push_back(entries);
  }
  return Json{{"k", dec.k}, {"cap", dec.cap}, {"weights", dec.weights}, {"atoms", atoms}};
}

inline Json to_json(const CheckLine& c) {
  return Json{{"name", c.name}, {"residual", c.residual}, {"tolerance", c.tolerance}, {"pass", c.pass}};
}

}  // namespace tframe
