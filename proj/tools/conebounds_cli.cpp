// conebounds command line: widths, bounds, solvers, sweeps, validators.
//
// Exit codes: 0 success (and, for `validate`, gate passed); 1 domain or
// numeric errors and failed validation gates; 2 usage or input parse errors.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "conebounds/conebounds.hpp"
#include "conebounds/io.hpp"

namespace cb = conebounds;
using cb::json;

namespace {

std::uint64_t default_seed() {
  if (const char* env = std::getenv("CONEBOUNDS_SEED")) {
    try {
      return std::stoull(env);
    } catch (...) {
      std::cerr << "warning: ignoring unparsable CONEBOUNDS_SEED\n";
    }
  }
  return 1;
}

void emit(const json& j, const std::string& out_path, const std::string& format) {
  std::string text;
  if (format == "csv") {
    // Flat CSV rendering of scalar fields, arrays skipped.
    std::string header, row;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it->is_array() || it->is_object()) continue;
      if (!header.empty()) {
        header += ',';
        row += ',';
      }
      header += it.key();
      if (it->is_number_float())
        row += cb::fmt17(it->get<double>());
      else
        row += it->dump();
    }
    text = header + "\n" + row + "\n";
  } else {
    text = j.dump(2) + "\n";
  }
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file " + out_path);
    f << text;
  }
}

json load_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw CLI::ValidationError("input", "cannot open " + path);
  return json::parse(f);  // parse_error propagates, mapped to exit 2
}

cb::StructureModel model_from_flags(const std::string& kind, int n, int q, int b, int d) {
  if (kind == "sparse") return cb::StructureModel::sparse(n);
  if (kind == "non_negative") return cb::StructureModel::non_negative(n);
  if (kind == "block_sparse") return cb::StructureModel::block_sparse(q, b);
  if (kind == "low_rank") return cb::StructureModel::low_rank(d);
  throw CLI::ValidationError("--model", "unknown model kind " + kind);
}

// Canonical anchor with the requested complexity. The Gaussian width of the
// tangent cone is invariant under support permutations and sign flips, so a
// fixed-pattern anchor represents the whole class.
cb::Vector canonical_anchor(const cb::StructureModel& model, int k) {
  cb::Vector x0 = cb::Vector::Zero(model.n);
  switch (model.kind) {
    case cb::StructureKind::sparse:
    case cb::StructureKind::non_negative:
      for (int i = 0; i < k; ++i) x0[i] = 1.0;
      break;
    case cb::StructureKind::block_sparse:
      for (int i = 0; i < k; ++i) x0[static_cast<Eigen::Index>(i) * model.block_size] = 1.0;
      break;
    case cb::StructureKind::low_rank:
      for (int i = 0; i < k; ++i) x0[static_cast<Eigen::Index>(i) * (model.side + 1)] = 1.0;
      break;
  }
  if (k > 0) x0 /= x0.norm();
  return x0;
}

double binomial_sigma(double p, int trials) {
  return std::sqrt(std::max(p * (1.0 - p), 0.0) / trials);
}

struct GlobalFlags {
  std::uint64_t seed = default_seed();
  std::string out;
  std::string format = "json";
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sharp error bounds for structured linear inverse problems: "
               "Gaussian widths, constrained Lasso / SOCP solvers, bound formulas, "
               "and Monte Carlo validation sweeps"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  GlobalFlags g;
  app.add_option("--seed", g.seed, "base seed (default: CONEBOUNDS_SEED env or 1)");
  app.add_option("--out", g.out, "write output to this path instead of stdout");
  app.add_option("--format", g.format, "output format: json (default) or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  // ---- width ----
  auto* w_cmd = app.add_subcommand("width", "closed-form and Monte Carlo Gaussian widths");
  std::string w_model = "sparse";
  int w_n = 0, w_k = -1, w_r = -1, w_q = 0, w_b = 0, w_d = 0;
  long w_samples = 0;
  w_cmd->add_option("--model", w_model, "sparse|block_sparse|low_rank|non_negative")
      ->check(CLI::IsMember({"sparse", "block_sparse", "low_rank", "non_negative"}));
  w_cmd->add_option("--n", w_n, "ambient dimension (sparse / non_negative)");
  w_cmd->add_option("--k", w_k, "sparsity or active block count");
  w_cmd->add_option("--r", w_r, "rank (low_rank)");
  w_cmd->add_option("--q", w_q, "block count (block_sparse)");
  w_cmd->add_option("--b", w_b, "block size (block_sparse)");
  w_cmd->add_option("--d", w_d, "matrix side (low_rank)");
  w_cmd->add_option("--mc-samples", w_samples, "Monte Carlo samples (0: closed form only)");

  // ---- bound ----
  auto* b_cmd = app.add_subcommand("bound", "error-bound report for (m, width, t, ||z||)");
  int b_m = 0;
  double b_width = 0.0, b_t = 0.0, b_znorm = 0.0;
  b_cmd->add_option("--m", b_m, "measurement count")->required();
  b_cmd->add_option("--width", b_width, "Gaussian width of the tangent cone")->required();
  b_cmd->add_option("--t", b_t, "deviation parameter")->required();
  b_cmd->add_option("--znorm", b_znorm, "noise norm ||z||")->required();

  // ---- solve ----
  auto* s_cmd = app.add_subcommand("solve", "run an estimator on a problem instance file");
  std::string s_input, s_method = "lasso", s_lambda = "";
  double s_delta = -1.0, s_tol = 1e-8;
  int s_maxiter = 20000;
  long s_mc = 2000;
  bool s_no_x = false;
  s_cmd->add_option("--input", s_input, "problem JSON file")->required();
  s_cmd->add_option("--method", s_method, "lasso|socp|penalized|ls")
      ->check(CLI::IsMember({"lasso", "socp", "penalized", "ls"}));
  s_cmd->add_option("--lambda", s_lambda, "penalty for --method penalized, or 'auto'");
  s_cmd->add_option("--delta", s_delta, "SOCP residual budget (default ||z||)");
  s_cmd->add_option("--tol", s_tol, "solver tolerance");
  s_cmd->add_option("--max-iter", s_maxiter, "iteration cap");
  s_cmd->add_option("--mc-samples", s_mc, "samples for the auto lambda rule");
  s_cmd->add_flag("--no-x", s_no_x, "omit x_star from the output");

  // ---- sweep ----
  auto* sw_cmd = app.add_subcommand("sweep", "run a (m, trial) sweep from a config file");
  std::string sw_config, sw_csv = "sweep.csv", sw_summary = "summary.json";
  int sw_jobs = 0;
  bool sw_quiet = false;
  sw_cmd->add_option("--config", sw_config, "sweep config JSON")->required();
  sw_cmd->add_option("--out", sw_csv, "records CSV path (default sweep.csv)");
  sw_cmd->add_option("--summary", sw_summary, "summary JSON path (default summary.json)");
  sw_cmd->add_option("--jobs", sw_jobs, "parallel cells (default: hardware)");
  sw_cmd->add_flag("--quiet", sw_quiet, "suppress per-cell log lines");

  // ---- validate ----
  auto* v_cmd = app.add_subcommand("validate", "Monte Carlo gates for the probabilistic claims");
  std::string v_check;
  int v_n = 0, v_k = 0, v_m = 0, v_trials = 200, v_restarts = 50;
  double v_t = 2.0, v_sigma = -1.0;
  v_cmd->add_option("--check", v_check, "gordon|correlation|adversarial")
      ->required()
      ->check(CLI::IsMember({"gordon", "correlation", "adversarial"}));
  v_cmd->add_option("--n", v_n, "ambient dimension")->required();
  v_cmd->add_option("--k", v_k, "sparsity")->required();
  v_cmd->add_option("--m", v_m, "measurement count")->required();
  v_cmd->add_option("--t", v_t, "deviation parameter");
  v_cmd->add_option("--trials", v_trials, "Monte Carlo trials");
  v_cmd->add_option("--restarts", v_restarts, "restarts for the restricted singular value");
  v_cmd->add_option("--sigma", v_sigma, "noise std (default 0.1/sqrt(m))");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*w_cmd) {
      const cb::StructureModel model = model_from_flags(w_model, w_n, w_q, w_b, w_d);
      const int k = w_model == "low_rank" ? w_r : w_k;
      if (k < 0) throw CLI::ValidationError("--k/--r", "complexity is required");
      cb::WidthEstimate est;
      if (w_samples > 0) {
        const auto desc = cb::SignalDescriptor::analyze(model, canonical_anchor(model, k));
        const auto cone = (model.is_norm() || k > 0)
                              ? cb::ConeHandle::tangent(desc)
                              : cb::ConeHandle::full_space(model.n);
        est = cb::width_monte_carlo(cone, w_samples, g.seed);
      } else if (model.is_norm()) {
        est.closed_form_bound = cb::width_closed_form(model, k);
      } else {
        throw cb::unsupported_model_error(
            "width: non_negative has no closed form; pass --mc-samples");
      }
      json j = cb::width_to_json(est);
      j["model"] = cb::model_to_json(model);
      j["k"] = k;
      j["seed"] = g.seed;
      emit(j, g.out, g.format);
      return 0;
    }

    if (*b_cmd) {
      const cb::BoundParams params{b_m, b_width, b_t, b_znorm};
      const cb::BoundReport rep = cb::make_bound_report(params);
      json j = cb::bound_report_to_json(rep);
      j["m"] = b_m;
      j["width"] = b_width;
      j["t"] = b_t;
      j["z_norm"] = b_znorm;
      emit(j, g.out, g.format);
      return 0;
    }

    if (*s_cmd) {
      const cb::ProblemInstance inst = cb::instance_from_json(load_json_file(s_input));
      cb::SolveOptions opts;
      opts.tol = s_tol;
      opts.max_iter = s_maxiter;
      cb::SolverResult res;
      json extra;
      if (s_method == "lasso") {
        res = cb::solve_constrained_lasso(inst, opts);
      } else if (s_method == "socp") {
        res = cb::solve_socp(inst, s_delta >= 0.0 ? s_delta : inst.z.norm(), opts);
      } else if (s_method == "ls") {
        res = cb::solve_least_squares(inst);
      } else {
        double lambda = 0.0;
        if (s_lambda == "auto") {
          const auto desc = cb::SignalDescriptor::analyze(inst.model, inst.x0);
          const auto cone = cb::ConeHandle::tangent(desc);
          const auto width = cb::width_monte_carlo(cone, s_mc, g.seed);
          const double tau = cb::compute_tau_star(desc, s_mc, g.seed);
          lambda = cb::lambda_best(inst, width, tau);
          extra["lambda"] = lambda;
          extra["tau_star"] = tau;
          extra["width_mc"] = width.mc_estimate;
        } else if (!s_lambda.empty()) {
          lambda = std::stod(s_lambda);
          extra["lambda"] = lambda;
        } else {
          throw CLI::ValidationError("--lambda", "required for --method penalized");
        }
        res = cb::solve_penalized_lasso(inst, lambda, opts);
      }
      json j = cb::solver_result_to_json(res, !s_no_x);
      if (extra.is_object()) j.update(extra);
      j["seed"] = inst.seed;
      emit(j, g.out, g.format);
      return 0;
    }

    if (*sw_cmd) {
      cb::SweepConfig config = cb::sweep_config_from_json(load_json_file(sw_config));
      if (app.count("--seed")) config.base_seed = g.seed;
      if (!sw_quiet)
        std::cerr << "sweep: " << config.m_values.size() << " m-values x "
                  << config.trials_per_m << " trials\n";
      const auto result = cb::run_sweep(config, sw_jobs);
      {
        std::ofstream f(sw_csv, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open " + sw_csv);
        f << cb::sweep_csv(config, result.records);
      }
      {
        std::ofstream f(sw_summary, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open " + sw_summary);
        f << cb::summary_json(config, result.summary);
      }
      if (!sw_quiet) {
        for (const auto& row : result.summary)
          std::cerr << "  m=" << row.m << " median_err=" << cb::fmt17(row.median_err_lasso)
                    << " frac_within=" << cb::fmt17(row.frac_within_lasso) << "\n";
        for (const auto& f : result.failures) std::cerr << "  cell failed: " << f << "\n";
      }
      std::cout << "wrote " << sw_csv << " and " << sw_summary << "\n";
      return result.failures.empty() ? 0 : 1;
    }

    if (*v_cmd) {
      cb::SweepConfig config;
      config.model = cb::StructureModel::sparse(v_n);
      config.k = v_k;
      config.m_values = {v_m};
      config.base_seed = g.seed;
      if (v_sigma >= 0.0) config.sigma = v_sigma;
      json j;
      j["check"] = v_check;
      j["n"] = v_n;
      j["k"] = v_k;
      j["m"] = v_m;
      j["t"] = v_t;
      j["trials"] = v_trials;
      j["seed"] = g.seed;
      bool pass = false;
      if (v_check == "gordon") {
        const double rate = cb::validate_gordon(config, v_trials, v_t, v_restarts);
        const double p = std::exp(-v_t * v_t / 2.0);
        const double threshold = p + 3.0 * binomial_sigma(p, v_trials);
        pass = rate <= threshold;
        j["empirical_failure_rate"] = rate;
        j["threshold"] = threshold;
      } else if (v_check == "correlation") {
        const cb::ProblemInstance inst = cb::generate_instance(config, v_m, 0);
        const auto desc = cb::SignalDescriptor::analyze(config.model, inst.x0);
        const auto cone = cb::ConeHandle::tangent(desc);
        const double w = cb::width_closed_form(config.model, desc.complexity);
        const double alpha = (w + v_t) / cb::gamma_d(v_m - 1) * inst.z.norm();
        const double rate =
            cb::restricted_correlation_check(inst, cone, alpha, v_trials, g.seed);
        const double p = std::min(1.0, 5.0 * std::exp(-v_t * v_t / 26.0));
        const double threshold = std::min(1.0, p + 3.0 * binomial_sigma(p, v_trials));
        pass = rate <= threshold;
        j["alpha"] = alpha;
        j["empirical_failure_rate"] = rate;
        j["threshold"] = threshold;
      } else {  // adversarial
        int lower_hits = 0, upper_ok = 0, upper_applicable = 0;
        const double w = cb::width_closed_form(config.model, config.k);
        for (int trial = 0; trial < v_trials; ++trial) {
          const auto inst = cb::adversarial_instance(config, v_m, trial);
          const auto res = cb::solve_constrained_lasso(inst, config.solver);
          const auto bounds = cb::adversarial_bounds(v_m, w, v_t, inst.z.norm());
          if (res.error_norm >= bounds.lower) ++lower_hits;
          if (bounds.upper_defined) {
            ++upper_applicable;
            if (res.error_norm <= bounds.upper) ++upper_ok;
          }
        }
        const double frac = static_cast<double>(lower_hits) / v_trials;
        const double p = 1.0 - std::exp(-v_t * v_t / 2.0);
        const double threshold = p - 3.0 * binomial_sigma(p, v_trials);
        pass = frac >= threshold && upper_ok == upper_applicable;
        j["lower_bound_hit_fraction"] = frac;
        j["threshold"] = threshold;
        j["upper_bound_violations"] = upper_applicable - upper_ok;
      }
      j["pass"] = pass;
      emit(j, g.out, g.format);
      return pass ? 0 : 1;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
