#pragma once

#include <atomic>
#include <charconv>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "conebounds/bounds.hpp"
#include "conebounds/solvers.hpp"
#include "conebounds/width.hpp"

namespace conebounds {

// All floats in CSV and summary output carry 17 significant digits so files
// round-trip exactly.
inline std::string fmt17(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

struct SweepConfig {
  StructureModel model = StructureModel::sparse(1);
  int k = 1;  // sparsity / block-sparsity count / rank
  std::vector<int> m_values;
  int trials_per_m = 1;
  // Noise std; when unset, sigma = 0.1/sqrt(m) per cell so that ||z|| ~ 0.1.
  std::optional<double> sigma;
  double t = 2.0;  // deviation parameter for the recorded bounds
  std::uint64_t base_seed = 1;
  SolveOptions solver;
  long width_mc_samples = 0;  // 0 disables the Monte Carlo width column
  bool run_socp = true;

  void validate() const {
    model.validate();
    if (trials_per_m < 1) throw std::invalid_argument("SweepConfig: trials_per_m must be >= 1");
    if (!(t >= 0.0)) throw std::invalid_argument("SweepConfig: t must be >= 0");
    for (std::size_t i = 0; i < m_values.size(); ++i) {
      if (m_values[i] < 2) throw std::invalid_argument("SweepConfig: every m must be >= 2");
      if (i > 0 && m_values[i] < m_values[i - 1])
        throw std::invalid_argument("SweepConfig: m_values must be sorted ascending");
    }
    const int limit = model.kind == StructureKind::low_rank    ? model.side
                      : model.kind == StructureKind::block_sparse ? model.block_count
                                                                  : model.n;
    if (k < 1 || k > limit)
      throw std::invalid_argument("SweepConfig: complexity k out of range for the model");
    if (sigma && !(*sigma >= 0.0)) throw std::invalid_argument("SweepConfig: sigma must be >= 0");
  }

  double sigma_for(int m) const {
    return sigma ? *sigma : 0.1 / std::sqrt(static_cast<double>(m));
  }
};

enum class PhaseSide { above, below };

inline const char* to_string(PhaseSide p) { return p == PhaseSide::above ? "above" : "below"; }

struct SweepRecord {
  int m = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  double z_norm = 0.0;
  double err_lasso = std::numeric_limits<double>::quiet_NaN();
  double err_socp = std::numeric_limits<double>::quiet_NaN();
  double eta_bound = std::numeric_limits<double>::quiet_NaN();      // factor, bound is eta*||z||
  double remark1_bound = std::numeric_limits<double>::quiet_NaN();  // factor
  double width_cf = std::numeric_limits<double>::quiet_NaN();
  double width_mc = std::numeric_limits<double>::quiet_NaN();
  double gamma_m = 0.0;
  bool within_bound = false;  // err_lasso <= eta_bound * z_norm, exactly as recorded
  PhaseSide phase_side = PhaseSide::below;
  bool lasso_converged = false;
  bool socp_converged = false;
};

// Deterministic per-cell seed; recorded in the CSV for standalone replay.
inline std::uint64_t cell_seed(std::uint64_t base_seed, int m, int trial) {
  std::uint64_t h = RngStream::combine(0x5eedc0debull, base_seed);
  h = RngStream::combine(h, static_cast<std::uint64_t>(m));
  return RngStream::combine(h, static_cast<std::uint64_t>(trial));
}

// x0 with unit norm and the configured structure, A with N(0,1/m) entries,
// z with N(0,sigma^2) entries, all drawn from streams keyed by
// (base_seed, m, trial, stream_tag); y = A x0 + z.
inline ProblemInstance generate_instance(const SweepConfig& config, int m, int trial) {
  config.validate();
  if (m < 1) throw std::invalid_argument("generate_instance: m must be >= 1");
  const StructureModel& model = config.model;
  const int n = model.n;
  const auto key = [&](std::uint64_t tag) {
    return RngStream(config.base_seed,
                     static_cast<std::uint64_t>(m),
                     static_cast<std::uint64_t>(trial), tag);
  };

  Vector x0 = Vector::Zero(n);
  {
    RngStream rng = key(stream_tag::signal);
    switch (model.kind) {
      case StructureKind::sparse:
      case StructureKind::non_negative: {
        std::vector<int> idx(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
        for (int i = 0; i < config.k; ++i) {
          const int j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - i)));
          std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
        }
        for (int i = 0; i < config.k; ++i) {
          const double g = rng.next_gaussian();
          x0[idx[static_cast<std::size_t>(i)]] =
              model.kind == StructureKind::non_negative ? std::abs(g) : g;
        }
        break;
      }
      case StructureKind::block_sparse: {
        const int q = model.block_count, b = model.block_size;
        std::vector<int> idx(static_cast<std::size_t>(q));
        for (int i = 0; i < q; ++i) idx[static_cast<std::size_t>(i)] = i;
        for (int i = 0; i < config.k; ++i) {
          const int j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(q - i)));
          std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
        }
        for (int i = 0; i < config.k; ++i)
          x0.segment(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(i)]) * b, b) =
              rng.gaussian_vector(b);
        break;
      }
      case StructureKind::low_rank: {
        const int d = model.side, r = config.k;
        const Matrix g1 = rng.gaussian_matrix(d, r);
        const Matrix g2 = rng.gaussian_matrix(d, r);
        const Matrix x = g1 * g2.transpose();
        x0 = Eigen::Map<const Vector>(x.data(), x.size());
        break;
      }
    }
    const double norm = x0.norm();
    if (!(norm > 0.0)) throw numeric_error("generate_instance: degenerate zero signal");
    x0 /= norm;
  }

  const double sigma = config.sigma_for(m);
  Matrix a = key(stream_tag::sensing)
                 .gaussian_matrix(m, n, 1.0 / std::sqrt(static_cast<double>(m)));
  Vector z = sigma * key(stream_tag::noise).gaussian_vector(m);
  return ProblemInstance::assemble(std::move(a), std::move(x0), std::move(z), model,
                                   cell_seed(config.base_seed, m, trial), sigma);
}

// Worst-case construction z = A(x_fmin - x0) with x_fmin = 0 for every
// supported norm: y = A x0 + z = 0 exactly, so x* = 0 is an exact optimum of
// the constrained Lasso and the error is ||x0||.
inline ProblemInstance adversarial_instance(const SweepConfig& config, int m, int trial) {
  if (!config.model.is_norm())
    throw unsupported_model_error(
        "adversarial_instance: needs f with minimizer 0, i.e. a norm");
  ProblemInstance inst = generate_instance(config, m, trial);
  const Vector ax = inst.A * inst.x0;
  inst.z = -ax;
  inst.y = ax + inst.z;  // exact zeros coordinatewise
  inst.sigma = 1.0 / std::sqrt(static_cast<double>(m));  // z ~ N(0, ||x0||^2/m I)
  return inst;
}

inline SweepRecord run_trial(const SweepConfig& config, int m, int trial) {
  const ProblemInstance inst = generate_instance(config, m, trial);
  const auto desc = SignalDescriptor::analyze(config.model, inst.x0);
  const auto cone = ConeHandle::tangent(desc);

  SweepRecord rec;
  rec.m = m;
  rec.trial = trial;
  rec.seed = inst.seed;
  rec.z_norm = inst.z.norm();
  rec.gamma_m = gamma_d(m);

  if (config.model.is_norm()) rec.width_cf = width_closed_form(config.model, desc.complexity);
  if (config.width_mc_samples > 0)
    rec.width_mc = width_monte_carlo(cone, config.width_mc_samples, inst.seed).mc_estimate;

  const auto lasso = solve_constrained_lasso(inst, config.solver);
  rec.err_lasso = lasso.error_norm;
  rec.lasso_converged = lasso.converged;
  if (config.run_socp) {
    const auto socp = solve_socp(inst, rec.z_norm, config.solver);
    rec.err_socp = socp.error_norm;
    rec.socp_converged = socp.converged;
  }

  // Bounds use the closed-form width when available (reproducible without MC);
  // cells where t violates the theorem hypothesis keep NaN bounds and are
  // excluded from gates by the consumers.
  const double w = std::isfinite(rec.width_cf) ? rec.width_cf : rec.width_mc;
  if (std::isfinite(w)) {
    if (config.t < rec.gamma_m - w)
      rec.eta_bound = eta({m, w, config.t, rec.z_norm});
    const double root = std::sqrt(static_cast<double>(m) - 1.0);
    if (config.t < root - w) rec.remark1_bound = eta_remark1({m, w, config.t, rec.z_norm});
    rec.phase_side = (static_cast<double>(m) >= w * w) ? PhaseSide::above : PhaseSide::below;
  }
  rec.within_bound = rec.err_lasso <= rec.eta_bound * rec.z_norm;  // false when bound is NaN
  return rec;
}

struct SweepSummaryRow {
  int m = 0;
  int trials = 0;
  int solver_failures = 0;  // cells whose lasso (or requested socp) did not converge
  double mean_z_norm = 0.0;
  double mean_err_lasso = 0.0;
  double median_err_lasso = 0.0;
  double mean_err_socp = std::numeric_limits<double>::quiet_NaN();
  double median_err_socp = std::numeric_limits<double>::quiet_NaN();
  double eta_bound = std::numeric_limits<double>::quiet_NaN();
  double remark1_bound = std::numeric_limits<double>::quiet_NaN();
  double median_bound_to_error = std::numeric_limits<double>::quiet_NaN();
  double frac_within_lasso = 0.0;
  double frac_within_socp = 0.0;
  double gamma_m = 0.0;
  double width_cf = std::numeric_limits<double>::quiet_NaN();
};

struct SweepResult {
  std::vector<SweepRecord> records;           // sorted by (m, trial)
  std::vector<SweepSummaryRow> summary;       // one row per m
  std::vector<std::string> failures;          // exceptions from cells, if any
};

namespace detail {
inline double median_of(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}
}  // namespace detail

// Runs every (m, trial) cell, optionally across threads. Each cell draws only
// from streams keyed by (base_seed, m, trial), so the records (and the CSV
// written from them) do not depend on the schedule or the job count.
inline SweepResult run_sweep(const SweepConfig& config, int jobs = 0) {
  config.validate();
  SweepResult out;
  const std::size_t cells = config.m_values.size() * static_cast<std::size_t>(config.trials_per_m);
  out.records.resize(cells);
  std::vector<std::string> errors(cells);
  if (cells > 0) {
    if (jobs <= 0) jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    jobs = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(jobs), cells));
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= cells) return;
        const int m = config.m_values[i / static_cast<std::size_t>(config.trials_per_m)];
        const int trial = static_cast<int>(i % static_cast<std::size_t>(config.trials_per_m));
        try {
          out.records[i] = run_trial(config, m, trial);
        } catch (const std::exception& e) {
          out.records[i].m = m;
          out.records[i].trial = trial;
          out.records[i].seed = cell_seed(config.base_seed, m, trial);
          errors[i] = e.what();
        }
      }
    };
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
  }
  for (std::size_t i = 0; i < cells; ++i)
    if (!errors[i].empty())
      out.failures.push_back("m=" + std::to_string(out.records[i].m) +
                             " trial=" + std::to_string(out.records[i].trial) + ": " + errors[i]);

  for (int m : config.m_values) {
    SweepSummaryRow row;
    row.m = m;
    row.gamma_m = gamma_d(m);
    std::vector<double> el, es, ratio;
    double sum_z = 0.0, sum_el = 0.0, sum_es = 0.0;
    int n_socp = 0, within_l = 0, within_s = 0;
    for (const auto& r : out.records) {
      if (r.m != m) continue;
      ++row.trials;
      if (!r.lasso_converged || (config.run_socp && !r.socp_converged)) ++row.solver_failures;
      sum_z += r.z_norm;
      sum_el += r.err_lasso;
      el.push_back(r.err_lasso);
      if (std::isfinite(r.err_socp)) {
        sum_es += r.err_socp;
        es.push_back(r.err_socp);
        if (r.err_socp <= 2.0 * r.eta_bound * r.z_norm) ++within_s;
        ++n_socp;
      }
      if (r.within_bound) ++within_l;
      if (std::isfinite(r.eta_bound)) {
        row.eta_bound = r.eta_bound;
        if (r.err_lasso > 0.0) ratio.push_back(r.eta_bound * r.z_norm / r.err_lasso);
      }
      if (std::isfinite(r.remark1_bound)) row.remark1_bound = r.remark1_bound;
      if (std::isfinite(r.width_cf)) row.width_cf = r.width_cf;
    }
    if (row.trials == 0) continue;
    row.mean_z_norm = sum_z / row.trials;
    row.mean_err_lasso = sum_el / row.trials;
    row.median_err_lasso = detail::median_of(el);
    if (n_socp > 0) {
      row.mean_err_socp = sum_es / n_socp;
      row.median_err_socp = detail::median_of(es);
      row.frac_within_socp = static_cast<double>(within_s) / n_socp;
    }
    row.median_bound_to_error = detail::median_of(ratio);
    row.frac_within_lasso = static_cast<double>(within_l) / row.trials;
    out.summary.push_back(row);
  }
  return out;
}

inline std::string sweep_config_line(const SweepConfig& c) {
  std::ostringstream os;
  os << "# conebounds sweep model=" << to_string(c.model.kind) << " n=" << c.model.n;
  if (c.model.kind == StructureKind::block_sparse)
    os << " q=" << c.model.block_count << " b=" << c.model.block_size;
  if (c.model.kind == StructureKind::low_rank) os << " d=" << c.model.side;
  os << " k=" << c.k << " m=";
  for (std::size_t i = 0; i < c.m_values.size(); ++i)
    os << (i ? "," : "") << c.m_values[i];
  os << " trials=" << c.trials_per_m
     << " sigma=" << (c.sigma ? fmt17(*c.sigma) : std::string("auto"))
     << " t=" << fmt17(c.t) << " base_seed=" << c.base_seed
     << " tol=" << fmt17(c.solver.tol) << " max_iter=" << c.solver.max_iter
     << " width_mc_samples=" << c.width_mc_samples << " socp=" << (c.run_socp ? 1 : 0);
  return os.str();
}

inline constexpr const char* kSweepCsvHeader =
    "m,trial,seed,z_norm,err_lasso,err_socp,eta_bound,remark1_bound,width_cf,width_mc,"
    "gamma_m,within_bound,phase_side";

inline std::string sweep_csv(const SweepConfig& config, const std::vector<SweepRecord>& records) {
  std::string out = sweep_config_line(config);
  out += '\n';
  out += kSweepCsvHeader;
  out += '\n';
  for (const auto& r : records) {
    out += std::to_string(r.m);
    out += ',';
    out += std::to_string(r.trial);
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    out += fmt17(r.z_norm);
    out += ',';
    out += fmt17(r.err_lasso);
    out += ',';
    out += fmt17(r.err_socp);
    out += ',';
    out += fmt17(r.eta_bound);
    out += ',';
    out += fmt17(r.remark1_bound);
    out += ',';
    out += fmt17(r.width_cf);
    out += ',';
    out += fmt17(r.width_mc);
    out += ',';
    out += fmt17(r.gamma_m);
    out += ',';
    out += r.within_bound ? '1' : '0';
    out += ',';
    out += to_string(r.phase_side);
    out += '\n';
  }
  return out;
}

inline std::string summary_json(const SweepConfig& config,
                                const std::vector<SweepSummaryRow>& rows) {
  std::ostringstream os;
  os << "{\n  \"model\": \"" << to_string(config.model.kind) << "\",\n  \"n\": "
     << config.model.n << ",\n  \"k\": " << config.k << ",\n  \"t\": " << fmt17(config.t)
     << ",\n  \"base_seed\": " << config.base_seed << ",\n  \"per_m\": [\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const auto num = [](double v) {
      return std::isfinite(v) ? fmt17(v) : std::string("null");
    };
    os << "    {\"m\": " << r.m << ", \"trials\": " << r.trials
       << ", \"solver_failures\": " << r.solver_failures
       << ", \"mean_z_norm\": " << num(r.mean_z_norm)
       << ", \"mean_err_lasso\": " << num(r.mean_err_lasso)
       << ", \"median_err_lasso\": " << num(r.median_err_lasso)
       << ", \"mean_err_socp\": " << num(r.mean_err_socp)
       << ", \"median_err_socp\": " << num(r.median_err_socp)
       << ", \"eta_bound\": " << num(r.eta_bound)
       << ", \"remark1_bound\": " << num(r.remark1_bound)
       << ", \"median_bound_to_error\": " << num(r.median_bound_to_error)
       << ", \"frac_within_lasso\": " << num(r.frac_within_lasso)
       << ", \"frac_within_socp\": " << num(r.frac_within_socp)
       << ", \"gamma_m\": " << num(r.gamma_m) << ", \"width_cf\": " << num(r.width_cf) << "}"
       << (i + 1 < rows.size() ? "," : "") << "\n";
  }
  os << "  ]\n}\n";
  return os.str();
}

// Monte Carlo check of the Gordon restricted-eigenvalue bound: over fresh
// instances, the fraction with sigma_hat < (gamma_m - w - t)/sqrt(m) should
// not exceed exp(-t^2/2) beyond binomial noise. sigma_hat overestimates the
// true restricted minimum, so observed failures are conservative evidence.
// When t >= gamma_m - w the bound is non-positive and the check is vacuous.
inline double validate_gordon(const SweepConfig& config, int trials, double t,
                              int restarts = 50) {
  config.validate();
  if (config.m_values.empty())
    throw std::invalid_argument("validate_gordon: config needs at least one m");
  if (trials < 1) throw std::invalid_argument("validate_gordon: trials must be >= 1");
  const int m = config.m_values.front();
  const double g = gamma_d(m);
  int failures = 0;
  for (int trial = 0; trial < trials; ++trial) {
    const ProblemInstance inst = generate_instance(config, m, trial);
    const auto desc = SignalDescriptor::analyze(config.model, inst.x0);
    const auto cone = ConeHandle::tangent(desc);
    const double w = config.model.is_norm()
                         ? width_closed_form(config.model, desc.complexity)
                         : width_monte_carlo(cone, std::max(config.width_mc_samples, 200L),
                                             inst.seed)
                               .mc_estimate;
    const double bound = (g - w - t) / std::sqrt(static_cast<double>(m));
    const double sigma_hat = restricted_min_singular(inst.A, cone, restarts, inst.seed);
    if (sigma_hat < bound) ++failures;
  }
  return static_cast<double>(failures) / static_cast<double>(trials);
}

}  // namespace conebounds
