#pragma once

#include <cmath>

#include "conebounds/gamma.hpp"
#include "conebounds/restricted.hpp"
#include "conebounds/solvers.hpp"

namespace conebounds {

// Inputs of the error-bound formulas: measurement count m, Gaussian width w of
// the tangent cone (intersected with the unit ball), deviation parameter t,
// and the noise norm ||z||.
struct BoundParams {
  int m = 0;
  double width = 0.0;
  double t = 0.0;
  double z_norm = 0.0;

  void validate() const {
    if (m < 2) throw std::domain_error("BoundParams: m must be >= 2");
    if (!(width >= 0.0)) throw std::domain_error("BoundParams: width must be >= 0");
    if (!(z_norm >= 0.0)) throw std::domain_error("BoundParams: z_norm must be >= 0");
    if (!(t >= 0.0) || t > gamma_d(m) - width)
      throw std::domain_error(
          "BoundParams: need 0 <= t <= gamma_m - width (hypothesis of the error-bound "
          "theorem)");
  }
};

// eta(x0, t) = (sqrt(m)/gamma_{m-1}) * (w + t) / (gamma_m - w - t), the sharp
// error-amplification factor: ||x_L* - x0|| <= eta * ||z|| with probability
// 1 - 6 exp(-t^2/26), and twice that for the SOCP estimate.
inline double eta(const BoundParams& p) {
  p.validate();
  const double denom = gamma_d(p.m) - p.width - p.t;
  if (!(denom > 0.0))
    throw std::domain_error(
        "eta: gamma_m - width - t must be strictly positive (hypothesis of the error-bound "
        "theorem)");
  return std::sqrt(static_cast<double>(p.m)) / gamma_d(p.m - 1) * (p.width + p.t) / denom;
}

// Relaxation of eta using gamma_{m-1} gamma_m = m-1 and gamma_{m-1} <= sqrt(m-1):
// (sqrt(m)/sqrt(m-1)) * (w + t) / (sqrt(m-1) - w - t).
inline double eta_remark1(const BoundParams& p) {
  if (p.m < 2) throw std::domain_error("eta_remark1: m must be >= 2");
  if (!(p.width >= 0.0) || !(p.t >= 0.0))
    throw std::domain_error("eta_remark1: width and t must be >= 0");
  const double root = std::sqrt(static_cast<double>(p.m) - 1.0);
  const double denom = root - p.width - p.t;
  if (!(denom > 0.0))
    throw std::domain_error("eta_remark1: sqrt(m-1) - width - t must be strictly positive");
  return std::sqrt(static_cast<double>(p.m)) / root * (p.width + p.t) / denom;
}

// 1 - 6 exp(-t^2/26), clamped at 0: the raw expression is negative for small t,
// where the theorem is vacuous.
inline double success_probability(double t) {
  if (!(t >= 0.0)) throw std::domain_error("success_probability: t must be >= 0");
  return std::max(0.0, 1.0 - 6.0 * std::exp(-t * t / 26.0));
}

// Gordon's restricted-eigenvalue bound for A with N(0, 1/m) entries:
// sigma_min(A, T cap S^{n-1}) >= (gamma_m - w - t)/sqrt(m) with probability
// 1 - exp(-t^2/2).
inline double gordon_lower_bound(int m, double width, double t) {
  if (m < 1) throw std::domain_error("gordon_lower_bound: m must be >= 1");
  if (!(width >= 0.0) || !(t >= 0.0))
    throw std::domain_error("gordon_lower_bound: width and t must be >= 0");
  const double g = gamma_d(m);
  if (t > g - width)
    throw std::domain_error(
        "gordon_lower_bound: t > gamma_m - width; past that regime it is futile to expect "
        "noise robustness");
  return (g - width - t) / std::sqrt(static_cast<double>(m));
}

struct AdversarialBounds {
  double lower = 0.0;  // sqrt(m)/(gamma_m + t) * ||z||, achieved by z = A(x* - x0)
  double upper = std::numeric_limits<double>::quiet_NaN();  // 2 sqrt(m) ||z|| / (gamma_m - w - t)
  bool upper_defined = false;
};

// Worst-case noise: the lower bound always exists; the uniform upper bound
// needs t < gamma_m - width and is flagged undefined otherwise.
inline AdversarialBounds adversarial_bounds(int m, double width, double t, double z_norm) {
  if (m < 1) throw std::domain_error("adversarial_bounds: m must be >= 1");
  if (!(width >= 0.0) || !(t >= 0.0) || !(z_norm >= 0.0))
    throw std::domain_error("adversarial_bounds: negative argument");
  AdversarialBounds b;
  const double g = gamma_d(m);
  const double root_m = std::sqrt(static_cast<double>(m));
  b.lower = root_m / (g + t) * z_norm;
  if (t < g - width) {
    b.upper = 2.0 * root_m * z_norm / (g - width - t);
    b.upper_defined = true;
  }
  return b;
}

// Bounds from related analyses, for side-by-side comparison. Formulas outside
// their regime are flagged and left NaN. informal_lasso drops the t's and uses
// gamma_m ~ sqrt(m); it is informational only and never used in validation.
struct ComparisonReport {
  double cha_bound = std::numeric_limits<double>::quiet_NaN();  // 2 sqrt(m) ||z||/(gamma_m-w-t)
  bool cha_defined = false;
  double oym_style = std::numeric_limits<double>::quiet_NaN();  // ||z|| w / sqrt(m - w^2)
  bool oym_defined = false;
  double informal_lasso = std::numeric_limits<double>::quiet_NaN();  // ||z|| w / (sqrt(m) - w)
  bool informal_defined = false;
  double epsilon = std::numeric_limits<double>::quiet_NaN();  // from m = (1+eps)^2 w^2
  double denominator_ratio = std::numeric_limits<double>::quiet_NaN();  // sqrt(2/eps + 1)
  bool ratio_defined = false;
};

inline ComparisonReport comparison_ratios(int m, double width, double z_norm, double t) {
  if (m < 1) throw std::domain_error("comparison_ratios: m must be >= 1");
  if (!(width >= 0.0) || !(z_norm >= 0.0) || !(t >= 0.0))
    throw std::domain_error("comparison_ratios: negative argument");
  ComparisonReport r;
  const double g = gamma_d(m);
  const double root_m = std::sqrt(static_cast<double>(m));
  if (t < g - width) {
    r.cha_bound = 2.0 * root_m * z_norm / (g - width - t);
    r.cha_defined = true;
  }
  if (width * width < m) {
    r.oym_style = z_norm * width / std::sqrt(m - width * width);
    r.oym_defined = true;
  }
  if (width < root_m) {
    r.informal_lasso = z_norm * width / (root_m - width);
    r.informal_defined = true;
  }
  if (width > 0.0 && width * width < m) {
    r.epsilon = root_m / width - 1.0;
    r.denominator_ratio = std::sqrt(2.0 / r.epsilon + 1.0);
    r.ratio_defined = true;
  }
  return r;
}

struct KappaHatCheck {
  double kappa = 0.0;        // alpha*sqrt(1-beta^2) - beta*sqrt(1+alpha^2-2*alpha*beta)
  double lower_bound = 0.0;  // sqrt((1-beta)/2) * (alpha - beta)
  bool holds = false;
};

// Scalar inequality from the restricted-correlation proof:
// kappa(alpha) >= sqrt((1-beta)/2) * (alpha - beta) for 0 <= beta <= alpha <= 1.
inline KappaHatCheck kappa_hat_check(double alpha_hat, double beta) {
  if (!(beta >= 0.0 && beta <= alpha_hat && alpha_hat <= 1.0 && beta < 1.0))
    throw std::domain_error("kappa_hat_check: need 0 <= beta <= alpha_hat <= 1 and beta < 1");
  KappaHatCheck c;
  c.kappa = alpha_hat * std::sqrt(1.0 - beta * beta) -
            beta * std::sqrt(1.0 + alpha_hat * alpha_hat - 2.0 * alpha_hat * beta);
  c.lower_bound = std::sqrt((1.0 - beta) / 2.0) * (alpha_hat - beta);
  c.holds = c.kappa >= c.lower_bound - 1e-12;
  return c;
}

// The full report the CLI serializes.
struct BoundReport {
  double eta = 0.0;
  double eta_remark1 = 0.0;
  double lasso_bound = 0.0;  // eta * ||z||
  double socp_bound = 0.0;   // 2 * eta * ||z||
  double success_prob = 0.0;
  double gordon_sigma_lower = 0.0;
  double adversarial_lower = 0.0;
  double adversarial_upper = 0.0;
  double cha_bound = 0.0;
  double oym_style_bound = 0.0;
};

inline BoundReport make_bound_report(const BoundParams& p) {
  BoundReport r;
  r.eta = eta(p);
  // the relaxation can be undefined on a thin sliver where gamma_m > sqrt(m-1); NaN there
  const double root = std::sqrt(static_cast<double>(p.m) - 1.0);
  r.eta_remark1 = (root - p.width - p.t > 0.0)
                      ? eta_remark1(p)
                      : std::numeric_limits<double>::quiet_NaN();
  r.lasso_bound = r.eta * p.z_norm;
  r.socp_bound = 2.0 * r.eta * p.z_norm;
  r.success_prob = success_probability(p.t);
  r.gordon_sigma_lower = gordon_lower_bound(p.m, p.width, p.t);
  const auto adv = adversarial_bounds(p.m, p.width, p.t, p.z_norm);
  r.adversarial_lower = adv.lower;
  r.adversarial_upper = adv.upper;
  const auto cmp = comparison_ratios(p.m, p.width, p.z_norm, p.t);
  r.cha_bound = cmp.cha_bound;
  r.oym_style_bound = cmp.oym_style;
  return r;
}

// Empirical check of the restricted-correlation consequence
// ||Proj(z, A T_f(x0))|| <= alpha: over fresh A ~ N(0, 1/m) draws, returns the
// fraction of trials where the projection norm exceeds alpha. Under the
// theorem's choice alpha = (w + t)/gamma_{m-1} * ||z|| the fraction should not
// exceed 5 exp(-t^2/26) beyond binomial noise.
inline double restricted_correlation_check(const ProblemInstance& inst,
                                           const ConeHandle& tangent_cone, double alpha,
                                           int trials, std::uint64_t seed, double tol = 1e-8) {
  if (trials < 1) throw std::invalid_argument("restricted_correlation_check: trials >= 1");
  if (tangent_cone.select() != ConeSelect::tangent)
    throw std::invalid_argument("restricted_correlation_check: handle must select the tangent cone");
  const int m = inst.m(), n = inst.n();
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  int failures = 0;
  for (int trial = 0; trial < trials; ++trial) {
    RngStream rng(seed, static_cast<std::uint64_t>(trial), stream_tag::trial_matrix);
    const Matrix a = rng.gaussian_matrix(m, n, scale);
    const auto proj = project_cone_image(inst.z, a, tangent_cone, tol);
    if (proj.point.norm() > alpha) ++failures;
  }
  return static_cast<double>(failures) / static_cast<double>(trials);
}

}  // namespace conebounds
