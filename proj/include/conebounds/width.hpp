#pragma once

#include <cmath>

#include "conebounds/cones.hpp"
#include "conebounds/gamma.hpp"
#include "conebounds/rng.hpp"

namespace conebounds {

struct WidthEstimate {
  double closed_form_bound = std::numeric_limits<double>::quiet_NaN();
  double mc_estimate = std::numeric_limits<double>::quiet_NaN();
  long mc_samples = 0;
  double mc_std_error = 0.0;
};

// Upper bounds on the Gaussian width of the tangent cone intersected with the
// unit ball, for the three norm structures. All logarithms are natural; the
// literature the formulas come from uses natural logs throughout.
//
//   sparse (l1, k-sparse in R^n):           sqrt(2k log(2n/k))
//   low_rank (nuclear, rank r, d x d):      sqrt(3r(2d - r))
//   block_sparse (l1,2, k of q blocks, b):  sqrt(4k(b + log(q/k)))
inline double width_closed_form(const StructureModel& model, int complexity) {
  model.validate();
  switch (model.kind) {
    case StructureKind::sparse:
      if (complexity < 1 || complexity > model.n)
        throw std::domain_error("width_closed_form: need 1 <= k <= n");
      return std::sqrt(2.0 * complexity * std::log(2.0 * model.n / complexity));
    case StructureKind::low_rank:
      if (complexity < 1 || complexity > model.side)
        throw std::domain_error("width_closed_form: need 1 <= r <= d");
      return std::sqrt(3.0 * complexity * (2.0 * model.side - complexity));
    case StructureKind::block_sparse:
      if (complexity < 1 || complexity > model.block_count)
        throw std::domain_error("width_closed_form: need 1 <= k <= q");
      return std::sqrt(4.0 * complexity *
                       (model.block_size + std::log(static_cast<double>(model.block_count) /
                                                    complexity)));
    case StructureKind::non_negative:
      throw unsupported_model_error(
          "width_closed_form: no closed-form width for the non-negative orthant");
  }
  throw std::logic_error("width_closed_form: unreachable");
}

// Monte Carlo estimate of w(T_f(x0) intersected with the unit ball):
// E sup_{v in T, ||v||<=1} <v,g> = E ||Proj(g, T)||, one standard normal g per
// sample. Sample i draws from the stream keyed (seed, i), so the estimate is
// independent of evaluation order.
inline WidthEstimate width_monte_carlo(const ConeHandle& cone, long samples,
                                       std::uint64_t seed) {
  if (cone.select() != ConeSelect::tangent)
    throw std::invalid_argument("width_monte_carlo: handle must select the tangent cone");
  if (samples < 1) throw std::invalid_argument("width_monte_carlo: samples must be >= 1");
  const int n = cone.dim();
  double sum = 0.0, sumsq = 0.0;
  for (long i = 0; i < samples; ++i) {
    RngStream rng(seed, static_cast<std::uint64_t>(i), stream_tag::width);
    const double v = cone.project_onto_tangent(rng.gaussian_vector(n)).norm();
    sum += v;
    sumsq += v * v;
  }
  WidthEstimate est;
  est.mc_samples = samples;
  est.mc_estimate = sum / static_cast<double>(samples);
  if (samples > 1) {
    const double var =
        std::max(0.0, (sumsq - sum * sum / samples) / static_cast<double>(samples - 1));
    est.mc_std_error = std::sqrt(var / static_cast<double>(samples));
  }
  if (cone.is_full_space()) {
    est.closed_form_bound = gamma_d(n);  // width of the full ball is E||g|| exactly
  } else if (cone.has_anchor() && cone.anchor().model.is_norm()) {
    est.closed_form_bound = width_closed_form(cone.anchor().model, cone.anchor().complexity);
  }
  return est;
}

}  // namespace conebounds
