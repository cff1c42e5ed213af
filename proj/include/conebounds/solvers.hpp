#pragma once

#include <cmath>
#include <utility>

#include "conebounds/cones.hpp"
#include "conebounds/gamma.hpp"
#include "conebounds/projections.hpp"
#include "conebounds/prox_engine.hpp"
#include "conebounds/width.hpp"

namespace conebounds {

// One observation y = A x0 + z. y is always derived from the stored (A, x0, z)
// triple, never perturbed independently.
struct ProblemInstance {
  Matrix A;
  Vector x0, z, y;
  StructureModel model;
  std::uint64_t seed = 0;
  double sigma = 0.0;

  int m() const { return static_cast<int>(A.rows()); }
  int n() const { return static_cast<int>(A.cols()); }

  static ProblemInstance assemble(Matrix a, Vector x0, Vector z, StructureModel model,
                                  std::uint64_t seed = 0, double sigma = 0.0) {
    model.validate();
    if (a.rows() < 1 || a.cols() < 1)
      throw std::invalid_argument("ProblemInstance: A must be at least 1x1");
    if (x0.size() != a.cols()) throw std::invalid_argument("ProblemInstance: x0 length != n");
    if (z.size() != a.rows()) throw std::invalid_argument("ProblemInstance: z length != m");
    if (model.n != a.cols())
      throw std::invalid_argument("ProblemInstance: model dimension != n");
    ProblemInstance inst;
    // standalone gemv then add: keeps y = A x0 + z bitwise reproducible
    const Vector ax = a * x0;
    inst.y = ax + z;
    inst.A = std::move(a);
    inst.x0 = std::move(x0);
    inst.z = std::move(z);
    inst.model = model;
    inst.seed = seed;
    inst.sigma = sigma;
    return inst;
  }
};

enum class SolveMethod { lasso_constrained, socp, lasso_penalized, least_squares };

inline const char* to_string(SolveMethod m) {
  switch (m) {
    case SolveMethod::lasso_constrained: return "lasso_constrained";
    case SolveMethod::socp: return "socp";
    case SolveMethod::lasso_penalized: return "lasso_penalized";
    case SolveMethod::least_squares: return "least_squares";
  }
  return "?";
}

struct SolveOptions {
  double tol = 1e-8;  // scales the gradient-mapping and residual-matching tolerances
  int max_iter = 20000;
  std::function<void(int, double)> on_iteration;  // objective trace, for diagnostics
};

struct SolverResult {
  Vector x_star;
  double residual_norm = 0.0;  // ||y - A x*||
  double f_value = 0.0;        // f(x*)
  double error_norm = 0.0;     // ||x* - x0||
  int iterations = 0;
  bool converged = false;
  SolveMethod method = SolveMethod::lasso_constrained;
};

namespace detail {
inline SolverResult finish_result(const ProblemInstance& inst, Vector x, int iterations,
                                  bool converged, SolveMethod method) {
  SolverResult r;
  r.residual_norm = (inst.y - inst.A * x).norm();
  r.f_value = structure_norm(inst.model, x);
  r.error_norm = (x - inst.x0).norm();
  r.x_star = std::move(x);
  r.iterations = iterations;
  r.converged = converged;
  r.method = method;
  return r;
}
}  // namespace detail

// minimize 0.5*||y - A x||^2  subject to  f(x) <= f(x0)
//
// Accelerated projected gradient with the structure ball projection. x0 is
// feasible, so at convergence the residual cannot exceed ||z|| by more than
// the optimality gap.
inline SolverResult solve_constrained_lasso(const ProblemInstance& inst,
                                            const SolveOptions& opts = {}) {
  const double radius = structure_norm(inst.model, inst.x0);
  if (!std::isfinite(radius))
    throw std::domain_error("solve_constrained_lasso: x0 is infeasible for its own model");
  detail::EngineOptions eopts;
  eopts.grad_tol_abs = opts.tol * (1.0 + inst.y.norm());
  eopts.max_iter = opts.max_iter;
  eopts.on_iteration = opts.on_iteration;
  const double lip = detail::spectral_norm_sq(inst.A);
  auto res = detail::accelerated_prox_descent(
      inst.A, inst.y, Vector::Zero(inst.n()),
      [&](const Vector& v, double) { return project_structure_ball(inst.model, v, radius); },
      [](const Vector&) { return 0.0; }, lip, eopts);
  return detail::finish_result(inst, std::move(res.x), res.iterations, res.converged,
                               SolveMethod::lasso_constrained);
}

// minimize lambda*f(x) + 0.5*||y - A x||^2   (proximal gradient)
inline SolverResult solve_penalized_lasso(const ProblemInstance& inst, double lambda,
                                          const SolveOptions& opts = {}) {
  if (!(lambda > 0.0)) throw std::domain_error("solve_penalized_lasso: lambda must be > 0");
  detail::EngineOptions eopts;
  eopts.grad_tol_abs = opts.tol * (1.0 + inst.y.norm());
  eopts.max_iter = opts.max_iter;
  eopts.on_iteration = opts.on_iteration;
  const double lip = detail::spectral_norm_sq(inst.A);
  const bool indicator = !inst.model.is_norm();
  auto res = detail::accelerated_prox_descent(
      inst.A, inst.y, Vector::Zero(inst.n()),
      [&](const Vector& v, double step) {
        return prox_structure_norm(inst.model, v, lambda * step);
      },
      [&](const Vector& x) { return indicator ? 0.0 : lambda * structure_norm(inst.model, x); },
      lip, eopts);
  return detail::finish_result(inst, std::move(res.x), res.iterations, res.converged,
                               SolveMethod::lasso_penalized);
}

namespace detail {
// Warm-startable penalized solve used by the SOCP bisection.
inline EngineResult penalized_step(const ProblemInstance& inst, double lambda, Vector start,
                                   double lip, double grad_tol_abs, int max_iter) {
  EngineOptions eopts;
  eopts.grad_tol_abs = grad_tol_abs;
  eopts.max_iter = max_iter;
  return accelerated_prox_descent(
      inst.A, inst.y, std::move(start),
      [&](const Vector& v, double step) {
        return prox_structure_norm(inst.model, v, lambda * step);
      },
      [&](const Vector& x) { return lambda * structure_norm(inst.model, x); }, lip, eopts);
}
}  // namespace detail

// minimize f(x)  subject to  ||y - A x|| <= delta
//
// Solved on the penalized path: the residual ||y - A x*(lambda)|| is monotone
// non-decreasing in lambda, so a bracketed bisection on [1e-10, dual_norm(A^T y)]
// finds the lambda whose residual matches delta within tolerance. Each inner
// solve warm-starts from the previous one. delta >= ||y|| short-circuits to
// x* = 0, where the residual constraint is inactive.
inline SolverResult solve_socp(const ProblemInstance& inst, double delta,
                               const SolveOptions& opts = {}) {
  if (!inst.model.is_norm())
    throw unsupported_model_error(
        "solve_socp: objective f is an indicator for non_negative; the residual-matching "
        "path is undefined");
  if (!(delta >= 0.0)) throw std::domain_error("solve_socp: delta must be >= 0");
  const double y_norm = inst.y.norm();
  if (delta >= y_norm)
    return detail::finish_result(inst, Vector::Zero(inst.n()), 0, true, SolveMethod::socp);

  const double lambda_hi0 = structure_dual_norm(inst.model, inst.A.transpose() * inst.y);
  const double tol_match = opts.tol * std::max(1.0, delta);
  if (!(lambda_hi0 > 0.0))
    throw std::domain_error("solve_socp: delta below the minimum achievable residual");

  const double lip = detail::spectral_norm_sq(inst.A);
  const double grad_tol = opts.tol * (1.0 + y_norm);

  double lambda_lo = 1e-10, lambda_hi = lambda_hi0;
  auto lo_res = detail::penalized_step(inst, lambda_lo, Vector::Zero(inst.n()), lip, grad_tol,
                                       opts.max_iter);
  int total_iters = lo_res.iterations;
  double r_lo = (inst.y - inst.A * lo_res.x).norm();
  // The minimum achievable residual is itself only known to solver precision,
  // so the infeasibility test carries that slack.
  if (r_lo > delta + std::max(tol_match, 50.0 * grad_tol))
    throw std::domain_error(
        "solve_socp: infeasible delta, below the minimum achievable residual " +
        std::to_string(r_lo));
  if (r_lo >= delta - tol_match)  // constraint already (numerically) tight at lambda -> 0
    return detail::finish_result(inst, std::move(lo_res.x), total_iters, true,
                                 SolveMethod::socp);

  Vector warm = lo_res.x;
  Vector best_feasible = lo_res.x;  // residual <= delta side of the bracket
  bool matched = false;
  Vector matched_x;
  for (int it = 0; it < 90 && lambda_hi / lambda_lo > 1.0 + 1e-14; ++it) {
    const double lambda = std::sqrt(lambda_lo * lambda_hi);
    auto res = detail::penalized_step(inst, lambda, warm, lip, grad_tol, opts.max_iter);
    total_iters += res.iterations;
    warm = res.x;
    const double r = (inst.y - inst.A * res.x).norm();
    if (r <= delta) {
      lambda_lo = lambda;
      best_feasible = res.x;
      // accept only from below, so the residual never exceeds delta
      if (delta - r <= tol_match) {
        matched = true;
        matched_x = std::move(res.x);
        break;
      }
    } else {
      lambda_hi = lambda;
    }
  }
  Vector x_final = matched ? std::move(matched_x) : std::move(best_feasible);
  return detail::finish_result(inst, std::move(x_final), total_iters, matched,
                               SolveMethod::socp);
}

inline SolverResult solve_socp(const ProblemInstance& inst, const SolveOptions& opts) {
  return solve_socp(inst, inst.z.norm(), opts);  // exact noise side information
}

// Ordinary least squares min ||y - A x|| via column-pivoted QR; requires
// m >= n and full column rank. The closed-form error identity
// ||x* - x0||^2 = z^T A (A^T A)^-2 A^T z is recomputed as a consistency check
// on the instance.
inline SolverResult solve_least_squares(const ProblemInstance& inst) {
  if (inst.m() < inst.n())
    throw std::invalid_argument("solve_least_squares: requires m >= n");
  Eigen::ColPivHouseholderQR<Matrix> qr(inst.A);
  if (qr.rank() < inst.n())
    throw numeric_error("solve_least_squares: A is rank deficient (rank " +
                        std::to_string(qr.rank()) + " < n = " + std::to_string(inst.n()) + ")");
  Vector x = qr.solve(inst.y);
  const Vector u = qr.solve(inst.z);  // (A^T A)^-1 A^T z
  const double lhs = (x - inst.x0).squaredNorm();
  const double rhs = u.squaredNorm();
  const double scale = std::max({lhs, rhs, 1e-30});
  if (std::abs(lhs - rhs) > 1e-8 * scale && scale > 1e-24 * (1.0 + inst.x0.squaredNorm()))
    throw numeric_error("solve_least_squares: error identity violated; y != A x0 + z?");
  return detail::finish_result(inst, std::move(x), 0, true, SolveMethod::least_squares);
}

namespace detail {
// Reduce E[dist(g, tau * subdifferential f(x0))^2] over `samples` Monte Carlo
// draws to the shared 1-D quadratic-plus-hinges form.
inline ScalarDistance tau_star_reduction(const SignalDescriptor& anchor, long samples,
                                         std::uint64_t seed) {
  const StructureModel& model = anchor.model;
  if (!model.is_norm())
    throw unsupported_model_error("compute_tau_star: subdifferential scaling needs a norm");
  if (anchor.is_zero())
    throw degenerate_anchor_error("compute_tau_star: anchor must be nonzero");
  if (samples < 1) throw std::invalid_argument("compute_tau_star: samples must be >= 1");

  ScalarDistance sd;
  const int n = model.n;
  switch (model.kind) {
    case StructureKind::sparse: {
      for (long s = 0; s < samples; ++s) {
        RngStream rng(seed, static_cast<std::uint64_t>(s), stream_tag::tau);
        for (int i = 0; i < n; ++i) {
          const double g = rng.next_gaussian();
          if (std::abs(anchor.x0[i]) > anchor.zero_tol) {
            sd.a_lin += g * (anchor.x0[i] > 0.0 ? 1.0 : -1.0);
            sd.c_const += g * g;
          } else {
            sd.u.push_back(std::abs(g));
          }
        }
      }
      sd.k_quad = static_cast<double>(samples) * anchor.complexity;
      break;
    }
    case StructureKind::block_sparse: {
      const int q = model.block_count, b = model.block_size;
      for (long s = 0; s < samples; ++s) {
        RngStream rng(seed, static_cast<std::uint64_t>(s), stream_tag::tau);
        const Vector g = rng.gaussian_vector(n);
        for (int i = 0; i < q; ++i) {
          const auto xb = anchor.x0.segment(static_cast<Eigen::Index>(i) * b, b);
          const auto gb = g.segment(static_cast<Eigen::Index>(i) * b, b);
          const double nx = xb.norm();
          if (nx > anchor.zero_tol) {
            sd.a_lin += gb.dot(xb) / nx;
            sd.c_const += gb.squaredNorm();
          } else {
            sd.u.push_back(gb.norm());
          }
        }
      }
      sd.k_quad = static_cast<double>(samples) * anchor.complexity;
      break;
    }
    case StructureKind::low_rank: {
      const int d = model.side;
      Eigen::JacobiSVD<Matrix> svd(as_matrix(anchor.x0, d),
                                   Eigen::ComputeFullU | Eigen::ComputeFullV);
      const int r = anchor.complexity;
      for (long s = 0; s < samples; ++s) {
        RngStream rng(seed, static_cast<std::uint64_t>(s), stream_tag::tau);
        const Matrix g = rng.gaussian_matrix(d, d);
        const Matrix gh = svd.matrixU().transpose() * g * svd.matrixV();
        sd.a_lin += gh.topLeftCorner(r, r).trace();
        sd.c_const += gh.topLeftCorner(r, r).squaredNorm() +
                      gh.topRightCorner(r, d - r).squaredNorm() +
                      gh.bottomLeftCorner(d - r, r).squaredNorm();
        if (d > r) {
          Eigen::JacobiSVD<Matrix> cc(gh.bottomRightCorner(d - r, d - r));
          for (int j = 0; j < d - r; ++j) sd.u.push_back(cc.singularValues()[j]);
        }
      }
      sd.k_quad = static_cast<double>(samples) * r;
      break;
    }
    case StructureKind::non_negative:
      throw unsupported_model_error("compute_tau_star: unsupported model kind");
  }
  sd.finalize();
  return sd;
}
}  // namespace detail

// Monte Carlo estimate of E[dist(g, tau * subdifferential f(x0))^2] at a given
// tau, with the same draws compute_tau_star minimizes over.
inline double expected_sq_distance(const SignalDescriptor& anchor, long samples,
                                   std::uint64_t seed, double tau) {
  if (!(tau >= 0.0)) throw std::domain_error("expected_sq_distance: tau must be >= 0");
  const auto sd = detail::tau_star_reduction(anchor, samples, seed);
  return sd.value(tau) / static_cast<double>(samples);
}

// tau* = argmin_{tau >= 0} E[dist(g, tau * subdifferential f(x0))^2], the
// subdifferential scaling that enters the penalized-Lasso lambda rule.
// Deterministic given the seed.
inline double compute_tau_star(const SignalDescriptor& anchor, long samples,
                               std::uint64_t seed) {
  const auto sd = detail::tau_star_reduction(anchor, samples, seed);
  const double u_max = sd.u.empty() ? 0.0 : sd.u.front();
  const double tau_hi = std::max(u_max, std::max(0.0, sd.a_lin / sd.k_quad));
  return sd.minimize(tau_hi);
}

// lambda = (||z|| / sqrt(m)) * tau* * sqrt(1 - w^2/m), the suggested penalty
// for the penalized Lasso. Uses the Monte Carlo width by default; pass
// use_closed_form to use the closed-form width bound instead.
inline double lambda_best(const ProblemInstance& inst, const WidthEstimate& width,
                          double tau_star, bool use_closed_form = false) {
  const double w = use_closed_form ? width.closed_form_bound : width.mc_estimate;
  if (!std::isfinite(w) || w < 0.0)
    throw std::domain_error("lambda_best: width estimate is not available");
  const double m = static_cast<double>(inst.m());
  if (!(w * w < m))
    throw std::domain_error(
        "lambda_best: w^2 >= m is past the phase transition; the rule is undefined there");
  const double z_norm = inst.z.norm();
  if (!(z_norm > 0.0)) throw std::domain_error("lambda_best: requires ||z|| > 0");
  return z_norm / std::sqrt(m) * tau_star * std::sqrt(1.0 - w * w / m);
}

}  // namespace conebounds
