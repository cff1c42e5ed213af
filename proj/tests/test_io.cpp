#include <catch2/catch_amalgamated.hpp>

#include "conebounds/experiments.hpp"
#include "conebounds/io.hpp"

using namespace conebounds;

TEST_CASE("problem instance JSON round trip with explicit matrix", "[io]") {
  SweepConfig cfg;
  cfg.model = StructureModel::sparse(12);
  cfg.k = 2;
  cfg.m_values = {8};
  const auto inst = generate_instance(cfg, 8, 0);
  const json j = instance_to_json(inst);
  CHECK(j.at("m") == 8);
  CHECK(j.at("n") == 12);
  const auto back = instance_from_json(j);
  CHECK((back.A - inst.A).norm() == 0.0);
  CHECK((back.x0 - inst.x0).norm() == 0.0);
  CHECK((back.z - inst.z).norm() == 0.0);
  CHECK((back.y - inst.y).norm() == 0.0);
  CHECK(back.model.kind == inst.model.kind);
  CHECK(back.seed == inst.seed);
}

TEST_CASE("generator spec loads the same matrix the stream draws", "[io]") {
  json j;
  j["m"] = 6;
  j["n"] = 9;
  j["model"] = {{"kind", "sparse"}, {"n", 9}};
  j["seed"] = 42;
  j["sigma"] = 0.1;
  j["A"] = {{"gaussian_seed", 42}};
  Vector x0 = Vector::Zero(9);
  x0[4] = 1.0;
  j["x0"] = vector_to_json(x0);
  j["z"] = vector_to_json(Vector::Zero(6));
  const auto inst = instance_from_json(j);
  RngStream rng(42, 0, stream_tag::sensing);
  const Matrix expected = rng.gaussian_matrix(6, 9, 1.0 / std::sqrt(6.0));
  CHECK((inst.A - expected).norm() == 0.0);
  CHECK((inst.y - inst.A * x0).norm() == 0.0);
}

TEST_CASE("bound report JSON fields carry the published names", "[io]") {
  const auto rep = make_bound_report({200, 5.0, 3.0, 0.7});
  const json j = bound_report_to_json(rep);
  for (const char* key : {"eta", "eta_remark1", "lasso_bound", "socp_bound", "success_prob",
                          "gordon_sigma_lower", "adversarial_lower", "adversarial_upper",
                          "cha_bound", "oym_style_bound"}) {
    INFO(key);
    REQUIRE(j.contains(key));
  }
  CHECK(j.at("eta").get<double>() == rep.eta);
  CHECK(j.at("socp_bound").get<double>() == Catch::Approx(2.0 * rep.lasso_bound));
}

TEST_CASE("sweep config JSON round trip and defaults", "[io]") {
  const json j = json::parse(R"({
    "model": {"kind": "sparse", "n": 500},
    "k": 5,
    "m_values": [120, 160],
    "trials_per_m": 2,
    "sigma": null,
    "t": 10.0,
    "base_seed": 3
  })");
  const auto cfg = sweep_config_from_json(j);
  CHECK(cfg.model.n == 500);
  CHECK(cfg.k == 5);
  CHECK_FALSE(cfg.sigma.has_value());
  CHECK(cfg.t == 10.0);
  CHECK(cfg.solver.tol == 1e-8);
  CHECK(cfg.solver.max_iter == 20000);
  const json round = sweep_config_to_json(cfg);
  CHECK(round.at("sigma").is_null());
  CHECK(sweep_config_from_json(round).m_values == cfg.m_values);

  const json fixed = json::parse(R"({
    "model": {"kind": "block_sparse", "q": 10, "b": 4},
    "k": 3, "m_values": [30], "sigma": 0.05
  })");
  const auto cfg2 = sweep_config_from_json(fixed);
  CHECK(cfg2.sigma.has_value());
  CHECK(*cfg2.sigma == 0.05);
  CHECK(cfg2.model.block_count == 10);
}

TEST_CASE("malformed input raises parse or validation errors", "[io]") {
  CHECK_THROWS_AS(json::parse("{ not json"), json::parse_error);
  json j;
  j["m"] = 4;
  j["n"] = 3;
  j["model"] = {{"kind", "sparse"}, {"n", 3}};
  j["A"] = json::array({1.0, 2.0});  // wrong length
  j["x0"] = json::array({0.0, 0.0, 1.0});
  j["z"] = json::array({0.0, 0.0, 0.0, 0.0});
  CHECK_THROWS_AS(instance_from_json(j), std::invalid_argument);
  json bad_model = {{"kind", "mystery"}, {"n", 3}};
  CHECK_THROWS_AS(model_from_json(bad_model), std::invalid_argument);
}

TEST_CASE("width estimate JSON", "[io]") {
  WidthEstimate w;
  w.closed_form_bound = 7.5;
  w.mc_estimate = 7.1;
  w.mc_samples = 100;
  w.mc_std_error = 0.05;
  const json j = width_to_json(w);
  CHECK(j.at("closed_form_bound").get<double>() == 7.5);
  CHECK(j.at("mc_samples").get<long>() == 100);
  WidthEstimate empty;
  CHECK(width_to_json(empty).at("mc_estimate").is_null());
}
