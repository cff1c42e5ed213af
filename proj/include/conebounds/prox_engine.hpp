#pragma once

#include <functional>

#include "conebounds/common.hpp"
#include "conebounds/rng.hpp"

namespace conebounds::detail {

// lambda_max(A^T A) = ||A||_2^2 estimated by power iteration.
inline double spectral_norm_sq(const Matrix& a, int iters = 100, std::uint64_t seed = 0) {
  RngStream rng(seed, 0, stream_tag::power_iter);
  Vector v = rng.gaussian_vector(a.cols());
  double nv = v.norm();
  if (nv == 0.0) return 0.0;
  v /= nv;
  double lambda = 0.0;
  for (int i = 0; i < iters; ++i) {
    Vector w = a.transpose() * (a * v);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    lambda = v.dot(w);
    v = w / nw;
  }
  return std::max(lambda, 0.0);
}

struct EngineOptions {
  double grad_tol_abs = 1e-8;
  int max_iter = 20000;
  // Invoked once per accepted iterate with (iteration, full objective value).
  std::function<void(int, double)> on_iteration;
};

struct EngineResult {
  Vector x;
  int iterations = 0;
  bool converged = false;
  double objective = 0.0;
};

// Accelerated proximal gradient (FISTA) for  min 0.5*||y - A x||^2 + h(x)
// with h given through its prox. Backtracking halves the step when the local
// quadratic model is violated; a monotone guard falls back to a plain
// proximal step from the previous iterate whenever the accelerated candidate
// would increase the objective, which also restarts the momentum. Iterates
// therefore never increase the objective.
//
// prox(v, step) must return argmin_u h(u) + ||u - v||^2 / (2*step),
// penalty(x) must return h(x) (0 for constraint indicators).
template <class Prox, class Penalty>
EngineResult accelerated_prox_descent(const Matrix& a, const Vector& y, Vector x_start,
                                      Prox&& prox, Penalty&& penalty, double lipschitz,
                                      const EngineOptions& opts) {
  EngineResult res;
  double step = lipschitz > 0.0 ? 1.0 / lipschitz : 1.0;

  Vector x = std::move(x_start);
  Vector ax = a * x;
  double fx = 0.5 * (y - ax).squaredNorm() + penalty(x);

  Vector x_prev = x;
  Vector ax_prev = ax;
  double t = 1.0;
  Vector v = x;       // extrapolated point
  Vector av = ax;

  const auto backtracked_step = [&](const Vector& base, const Vector& a_base,
                                    Vector& cand, Vector& a_cand, double& g_cand) {
    const Vector r = a_base - y;
    const double g_base = 0.5 * r.squaredNorm();
    const Vector grad = a.transpose() * r;
    for (;;) {
      cand = prox(base - step * grad, step);
      a_cand = a * cand;
      g_cand = 0.5 * (y - a_cand).squaredNorm();
      const Vector diff = cand - base;
      const double model =
          g_base + grad.dot(diff) + diff.squaredNorm() / (2.0 * step);
      if (g_cand <= model + 1e-12 * std::max(1.0, std::abs(g_base))) break;
      step *= 0.5;
      if (step < 1e-18) break;
    }
  };

  Vector cand, a_cand;
  double g_cand = 0.0;
  for (int k = 1; k <= opts.max_iter; ++k) {
    res.iterations = k;
    backtracked_step(v, av, cand, a_cand, g_cand);
    double f_cand = g_cand + penalty(cand);
    double gap = (v - cand).norm() / step;

    if (f_cand > fx) {
      // plain step from x; restarts the momentum
      backtracked_step(x, ax, cand, a_cand, g_cand);
      f_cand = g_cand + penalty(cand);
      gap = (x - cand).norm() / step;
      t = 1.0;
    }

    x_prev.swap(x);
    ax_prev.swap(ax);
    x = cand;
    ax = a_cand;
    fx = f_cand;

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double beta = (t - 1.0) / t_next;
    v = x + beta * (x - x_prev);
    av = ax + beta * (ax - ax_prev);
    t = t_next;

    if (opts.on_iteration) opts.on_iteration(k, fx);
    if (gap <= opts.grad_tol_abs) {
      res.converged = true;
      break;
    }
  }
  res.x = std::move(x);
  res.objective = fx;
  return res;
}

}  // namespace conebounds::detail
