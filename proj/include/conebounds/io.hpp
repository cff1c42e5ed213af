#pragma once

#include <string>

#include <json.hpp>

#include "conebounds/bounds.hpp"
#include "conebounds/experiments.hpp"
#include "conebounds/solvers.hpp"

namespace conebounds {

using json = nlohmann::json;

inline json model_to_json(const StructureModel& m) {
  json j;
  j["kind"] = to_string(m.kind);
  j["n"] = m.n;
  if (m.kind == StructureKind::block_sparse) {
    j["q"] = m.block_count;
    j["b"] = m.block_size;
  }
  if (m.kind == StructureKind::low_rank) j["d"] = m.side;
  return j;
}

inline StructureModel model_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "sparse") return StructureModel::sparse(j.at("n").get<int>());
  if (kind == "non_negative") return StructureModel::non_negative(j.at("n").get<int>());
  if (kind == "block_sparse")
    return StructureModel::block_sparse(j.at("q").get<int>(), j.at("b").get<int>());
  if (kind == "low_rank") return StructureModel::low_rank(j.at("d").get<int>());
  throw std::invalid_argument("model_from_json: unknown kind '" + kind + "'");
}

inline json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

inline Vector vector_from_json(const json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  Eigen::Index i = 0;
  for (const auto& e : j) v[i++] = e.get<double>();
  return v;
}

// ProblemInstance schema: {m, n, model, seed, sigma, A, x0, z}. "A" is either
// a row-major array of length m*n, or the generator spec {"gaussian_seed": s}
// meaning N(0, 1/m) entries drawn from the keyed stream (s, 0, sensing) —
// the compact form used to keep instance files small. y is always recomputed
// as A x0 + z.
inline json instance_to_json(const ProblemInstance& inst, bool explicit_matrix = true) {
  json j;
  j["m"] = inst.m();
  j["n"] = inst.n();
  j["model"] = model_to_json(inst.model);
  j["seed"] = inst.seed;
  j["sigma"] = inst.sigma;
  if (explicit_matrix) {
    json arr = json::array();
    for (int i = 0; i < inst.m(); ++i)
      for (int k = 0; k < inst.n(); ++k) arr.push_back(inst.A(i, k));
    j["A"] = std::move(arr);
  } else {
    j["A"] = json{{"gaussian_seed", inst.seed}};
  }
  j["x0"] = vector_to_json(inst.x0);
  j["z"] = vector_to_json(inst.z);
  return j;
}

inline ProblemInstance instance_from_json(const json& j) {
  const int m = j.at("m").get<int>();
  const int n = j.at("n").get<int>();
  if (m < 1 || n < 1) throw std::invalid_argument("instance_from_json: m, n must be >= 1");
  const StructureModel model = model_from_json(j.at("model"));
  Matrix a(m, n);
  const json& ja = j.at("A");
  if (ja.is_array()) {
    if (ja.size() != static_cast<std::size_t>(m) * static_cast<std::size_t>(n))
      throw std::invalid_argument("instance_from_json: A has wrong length");
    std::size_t idx = 0;
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < n; ++k) a(i, k) = ja[idx++].get<double>();
  } else if (ja.is_object() && ja.contains("gaussian_seed")) {
    RngStream rng(ja.at("gaussian_seed").get<std::uint64_t>(), 0, stream_tag::sensing);
    a = rng.gaussian_matrix(m, n, 1.0 / std::sqrt(static_cast<double>(m)));
  } else {
    throw std::invalid_argument(
        "instance_from_json: A must be an array or {\"gaussian_seed\": ...}");
  }
  Vector x0 = vector_from_json(j.at("x0"));
  Vector z = vector_from_json(j.at("z"));
  return ProblemInstance::assemble(std::move(a), std::move(x0), std::move(z), model,
                                   j.value("seed", std::uint64_t{0}), j.value("sigma", 0.0));
}

inline json width_to_json(const WidthEstimate& w) {
  const auto num = [](double v) { return std::isfinite(v) ? json(v) : json(); };
  json j;
  j["closed_form_bound"] = num(w.closed_form_bound);
  j["mc_estimate"] = num(w.mc_estimate);
  j["mc_samples"] = w.mc_samples;
  j["mc_std_error"] = w.mc_std_error;
  return j;
}

inline json bound_report_to_json(const BoundReport& r) {
  const auto num = [](double v) { return std::isfinite(v) ? json(v) : json(); };
  json j;
  j["eta"] = num(r.eta);
  j["eta_remark1"] = num(r.eta_remark1);
  j["lasso_bound"] = num(r.lasso_bound);
  j["socp_bound"] = num(r.socp_bound);
  j["success_prob"] = num(r.success_prob);
  j["gordon_sigma_lower"] = num(r.gordon_sigma_lower);
  j["adversarial_lower"] = num(r.adversarial_lower);
  j["adversarial_upper"] = num(r.adversarial_upper);
  j["cha_bound"] = num(r.cha_bound);
  j["oym_style_bound"] = num(r.oym_style_bound);
  return j;
}

inline json solver_result_to_json(const SolverResult& r, bool include_x = true) {
  json j;
  j["method"] = to_string(r.method);
  j["residual_norm"] = r.residual_norm;
  j["f_value"] = r.f_value;
  j["error_norm"] = r.error_norm;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  if (include_x) j["x_star"] = vector_to_json(r.x_star);
  return j;
}

// SweepConfig schema, all fields optional except model/k/m_values:
// {model:{...}, k, m_values:[...], trials_per_m, sigma (number or null for the
//  0.1/sqrt(m) rule), t, base_seed, tol, max_iter, width_mc_samples, socp}
inline SweepConfig sweep_config_from_json(const json& j) {
  SweepConfig c;
  c.model = model_from_json(j.at("model"));
  c.k = j.at("k").get<int>();
  c.m_values = j.at("m_values").get<std::vector<int>>();
  c.trials_per_m = j.value("trials_per_m", 1);
  if (j.contains("sigma") && !j.at("sigma").is_null())
    c.sigma = j.at("sigma").get<double>();
  c.t = j.value("t", 2.0);
  c.base_seed = j.value("base_seed", std::uint64_t{1});
  c.solver.tol = j.value("tol", 1e-8);
  c.solver.max_iter = j.value("max_iter", 20000);
  c.width_mc_samples = j.value("width_mc_samples", 0L);
  c.run_socp = j.value("socp", true);
  c.validate();
  return c;
}

inline json sweep_config_to_json(const SweepConfig& c) {
  json j;
  j["model"] = model_to_json(c.model);
  j["k"] = c.k;
  j["m_values"] = c.m_values;
  j["trials_per_m"] = c.trials_per_m;
  j["sigma"] = c.sigma ? json(*c.sigma) : json();
  j["t"] = c.t;
  j["base_seed"] = c.base_seed;
  j["tol"] = c.solver.tol;
  j["max_iter"] = c.solver.max_iter;
  j["width_mc_samples"] = c.width_mc_samples;
  j["socp"] = c.run_socp;
  return j;
}

}  // namespace conebounds
