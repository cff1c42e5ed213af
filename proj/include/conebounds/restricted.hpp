#pragma once

#include "conebounds/cones.hpp"
#include "conebounds/prox_engine.hpp"
#include "conebounds/rng.hpp"

namespace conebounds {

struct RestrictedSingularOptions {
  int max_iter = 500;
  double stall_tol = 1e-12;
  int power_iters = 100;
};

// Heuristic estimate of sigma_min(A, T intersected with the unit sphere) =
// min ||A v|| over unit cone vectors: projected gradient descent on ||A v||^2
// with renormalization, best value over random restarts. The problem is
// nonconvex, so the result is an upper estimate of the true restricted
// minimum singular value; it is intended for validation, not as a certified
// quantity.
inline double restricted_min_singular(const Matrix& a, const ConeHandle& cone, int restarts,
                                      std::uint64_t seed,
                                      const RestrictedSingularOptions& opts = {}) {
  if (cone.select() != ConeSelect::tangent)
    throw std::invalid_argument("restricted_min_singular: handle must select the tangent cone");
  if (restarts < 1) throw std::invalid_argument("restricted_min_singular: restarts must be >= 1");
  if (a.cols() != cone.dim())
    throw std::invalid_argument("restricted_min_singular: dimension mismatch");

  const double lip = detail::spectral_norm_sq(a, opts.power_iters, seed);
  const double step = lip > 0.0 ? 1.0 / lip : 1.0;
  double best = std::numeric_limits<double>::infinity();

  for (int r = 0; r < restarts; ++r) {
    RngStream rng(seed, static_cast<std::uint64_t>(r), stream_tag::restart);
    Vector v;
    double nv = 0.0;
    for (int attempt = 0; attempt < 16 && nv < 1e-12; ++attempt) {
      v = cone.project_onto_tangent(rng.gaussian_vector(a.cols()));
      nv = v.norm();
    }
    if (nv < 1e-12) continue;
    v /= nv;

    double prev = std::numeric_limits<double>::infinity();
    int stalls = 0;
    for (int it = 0; it < opts.max_iter; ++it) {
      const Vector av = a * v;
      const double obj = av.norm();
      best = std::min(best, obj);
      if (std::abs(prev - obj) <= opts.stall_tol * std::max(1.0, obj)) {
        if (++stalls >= 3) break;
      } else {
        stalls = 0;
      }
      prev = obj;
      Vector w = cone.project_onto_tangent(v - step * (a.transpose() * av));
      const double nw = w.norm();
      if (nw < 1e-12) break;  // collapsed into the polar cone
      v = w / nw;
    }
  }
  return best;
}

struct ConeImageResult {
  Vector point;  // Proj(z, A T_f(x0)), i.e. A w* for the solved w*
  int iterations = 0;
  bool converged = false;
};

// Projection of z onto the cone image A T_f(x0) = { A v : v in T_f(x0) }:
// solves min_{w in T} 0.5*||z - A w||^2 by accelerated projected gradient and
// returns A w*. The flag reports whether the gradient-mapping tolerance was
// met before the iteration cap.
inline ConeImageResult project_cone_image(const Vector& z, const Matrix& a,
                                          const ConeHandle& cone, double tol = 1e-8,
                                          int max_iter = 5000) {
  if (cone.select() != ConeSelect::tangent)
    throw std::invalid_argument("project_cone_image: handle must select the tangent cone");
  if (a.rows() != z.size() || a.cols() != cone.dim())
    throw std::invalid_argument("project_cone_image: dimension mismatch");

  detail::EngineOptions opts;
  opts.grad_tol_abs = tol * (1.0 + z.norm());
  opts.max_iter = max_iter;
  const double lip = detail::spectral_norm_sq(a);
  auto result = detail::accelerated_prox_descent(
      a, z, Vector::Zero(a.cols()),
      [&cone](const Vector& v, double) { return cone.project_onto_tangent(v); },
      [](const Vector&) { return 0.0; }, lip, opts);

  ConeImageResult out;
  out.point = a * result.x;
  out.iterations = result.iterations;
  out.converged = result.converged;
  return out;
}

}  // namespace conebounds
