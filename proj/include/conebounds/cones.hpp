#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "conebounds/common.hpp"
#include "conebounds/structure.hpp"

namespace conebounds {

enum class ConeSelect { tangent, polar };

namespace detail {

// One-dimensional reduction of dist(v, tau * subdifferential)^2:
//
//   d(tau) = k_quad*tau^2 - 2*a_lin*tau + c_const + sum_j max(u_j - tau, 0)^2
//
// The fixed part of the subdifferential (signs / unit blocks / identity on the
// anchor's row space) contributes the quadratic, the free part (clamped
// entries / block norms / singular values) contributes the hinge terms.
// d is convex in tau; the minimizer is found by golden section on [0, tau_hi]
// (tolerance 1e-10) and then polished with Newton steps on the piecewise
// linear derivative, which is exact once the right segment is reached.
struct ScalarDistance {
  double k_quad = 0.0;
  double a_lin = 0.0;
  double c_const = 0.0;
  std::vector<double> u;  // hinge breakpoints, sorted descending by finalize()
  std::vector<double> s1, s2;

  void finalize() {
    std::sort(u.begin(), u.end(), std::greater<double>());
    s1.assign(u.size() + 1, 0.0);
    s2.assign(u.size() + 1, 0.0);
    for (std::size_t j = 0; j < u.size(); ++j) {
      s1[j + 1] = s1[j] + u[j];
      s2[j + 1] = s2[j] + u[j] * u[j];
    }
  }

  std::size_t count_above(double tau) const {
    auto it = std::lower_bound(u.begin(), u.end(), tau, std::greater<double>());
    return static_cast<std::size_t>(it - u.begin());
  }

  double value(double tau) const {
    const std::size_t c = count_above(tau);
    const double off = s2[c] - 2.0 * tau * s1[c] + static_cast<double>(c) * tau * tau;
    return k_quad * tau * tau - 2.0 * a_lin * tau + c_const + off;
  }

  double deriv(double tau) const {
    const std::size_t c = count_above(tau);
    return 2.0 * (k_quad * tau - a_lin) + 2.0 * (static_cast<double>(c) * tau - s1[c]);
  }

  double deriv2(double tau) const {
    return 2.0 * (k_quad + static_cast<double>(count_above(tau)));
  }

  double minimize(double tau_hi) const {
    if (tau_hi <= 0.0 || deriv(0.0) >= 0.0) return 0.0;
    double lo = 0.0, hi = tau_hi;
    const double gr = 0.6180339887498949;
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = value(c), fd = value(d);
    const double width_tol = 1e-10 * std::max(1.0, tau_hi);
    for (int it = 0; it < 200 && (hi - lo) > width_tol; ++it) {
      if (fc <= fd) {
        hi = d;
        d = c;
        fd = fc;
        c = hi - gr * (hi - lo);
        fc = value(c);
      } else {
        lo = c;
        c = d;
        fc = fd;
        d = lo + gr * (hi - lo);
        fd = value(d);
      }
    }
    double tau = 0.5 * (lo + hi);
    for (int it = 0; it < 16; ++it) {
      const double g = deriv(tau);
      const double h = deriv2(tau);
      if (h <= 0.0) break;
      double next = tau - g / h;
      next = std::clamp(next, 0.0, tau_hi);
      if (next == tau) break;
      tau = next;
    }
    return tau;
  }
};

}  // namespace detail

// Handle on the tangent cone T_f(x0) of a structure function at an anchor, or
// on its polar Cl(cone(subdifferential(f)(x0))). The handle precomputes the
// anchor's support pattern (or SVD bases) once so that repeated projections
// are cheap. Two special cones used by estimators and tests are also
// representable: the whole space and a single ray.
class ConeHandle {
 public:
  static ConeHandle tangent(SignalDescriptor anchor) {
    return ConeHandle(std::move(anchor), ConeSelect::tangent);
  }
  static ConeHandle polar(SignalDescriptor anchor) {
    return ConeHandle(std::move(anchor), ConeSelect::polar);
  }

  // Override for the degenerate x0 = 0 regime: T = R^n, polar = {0}.
  static ConeHandle full_space(int n, ConeSelect sel = ConeSelect::tangent) {
    ConeHandle h;
    h.special_ = Special::full_space;
    h.select_ = sel;
    h.n_ = n;
    return h;
  }

  static ConeHandle ray(Vector direction, ConeSelect sel = ConeSelect::tangent) {
    const double nd = direction.norm();
    if (!(nd > 0.0)) throw std::invalid_argument("ConeHandle::ray: zero direction");
    ConeHandle h;
    h.special_ = Special::ray;
    h.select_ = sel;
    h.n_ = static_cast<int>(direction.size());
    h.ray_dir_ = direction / nd;
    return h;
  }

  ConeSelect select() const { return select_; }
  int dim() const { return n_; }
  bool is_full_space() const { return special_ == Special::full_space; }
  bool is_ray() const { return special_ == Special::ray; }
  bool has_anchor() const { return special_ == Special::anchored; }

  const SignalDescriptor& anchor() const {
    if (!has_anchor()) throw std::logic_error("ConeHandle: special cone has no anchor");
    return anchor_;
  }

  ConeHandle reselected(ConeSelect sel) const {
    ConeHandle h = *this;
    h.select_ = sel;
    return h;
  }

  // Projection onto the polar cone T_f(x0)^polar, regardless of select().
  Vector project_onto_polar(const Vector& v) const {
    check_dim(v);
    switch (special_) {
      case Special::full_space:
        return Vector::Zero(n_);
      case Special::ray: {
        const double c = ray_dir_.dot(v);
        return c > 0.0 ? Vector(v - c * ray_dir_) : v;
      }
      case Special::anchored:
        break;
    }
    switch (anchor_.model.kind) {
      case StructureKind::non_negative: {
        Vector p(n_);
        for (int i = 0; i < n_; ++i) p[i] = on_support_[static_cast<std::size_t>(i)]
                                                 ? 0.0
                                                 : std::min(v[i], 0.0);
        return p;
      }
      case StructureKind::sparse: {
        if (v.lpNorm<1>() == 0.0) return Vector::Zero(n_);
        detail::ScalarDistance sd;
        sd.k_quad = static_cast<double>(anchor_.complexity);
        for (int i = 0; i < n_; ++i) {
          if (on_support_[static_cast<std::size_t>(i)]) {
            sd.a_lin += v[i] * unit_field_[i];
            sd.c_const += v[i] * v[i];
          } else {
            sd.u.push_back(std::abs(v[i]));
          }
        }
        sd.finalize();
        const double tau = sd.minimize(v.cwiseAbs().maxCoeff());
        Vector p(n_);
        for (int i = 0; i < n_; ++i)
          p[i] = on_support_[static_cast<std::size_t>(i)] ? tau * unit_field_[i]
                                                          : std::clamp(v[i], -tau, tau);
        return p;
      }
      case StructureKind::block_sparse: {
        if (v.norm() == 0.0) return Vector::Zero(n_);
        const int q = anchor_.model.block_count, b = anchor_.model.block_size;
        detail::ScalarDistance sd;
        sd.k_quad = static_cast<double>(anchor_.complexity);
        Vector norms(q);
        for (int i = 0; i < q; ++i) {
          const auto seg = v.segment(static_cast<Eigen::Index>(i) * b, b);
          norms[i] = seg.norm();
          if (block_active_[static_cast<std::size_t>(i)]) {
            sd.a_lin += seg.dot(unit_field_.segment(static_cast<Eigen::Index>(i) * b, b));
            sd.c_const += norms[i] * norms[i];
          } else {
            sd.u.push_back(norms[i]);
          }
        }
        sd.finalize();
        const double tau = sd.minimize(v.norm());
        Vector p(v.size());
        for (int i = 0; i < q; ++i) {
          const auto seg = v.segment(static_cast<Eigen::Index>(i) * b, b);
          if (block_active_[static_cast<std::size_t>(i)])
            p.segment(static_cast<Eigen::Index>(i) * b, b) =
                tau * unit_field_.segment(static_cast<Eigen::Index>(i) * b, b);
          else
            p.segment(static_cast<Eigen::Index>(i) * b, b) =
                norms[i] > tau && norms[i] > 0.0 ? Vector(seg * (tau / norms[i])) : seg;
        }
        return p;
      }
      case StructureKind::low_rank: {
        const int d = anchor_.model.side, r = rank_;
        const Matrix mh = svd_u_.transpose() * detail::as_matrix(v, d) * svd_v_;
        detail::ScalarDistance sd;
        sd.k_quad = static_cast<double>(r);
        sd.a_lin = mh.topLeftCorner(r, r).trace();
        sd.c_const = mh.topLeftCorner(r, r).squaredNorm() +
                     mh.topRightCorner(r, d - r).squaredNorm() +
                     mh.bottomLeftCorner(d - r, r).squaredNorm();
        Eigen::JacobiSVD<Matrix> cc;
        if (d > r) {
          cc.compute(mh.bottomRightCorner(d - r, d - r),
                     Eigen::ComputeFullU | Eigen::ComputeFullV);
          if (cc.info() != Eigen::Success)
            throw numeric_error("ConeHandle: SVD of the complement block did not converge");
          for (int j = 0; j < d - r; ++j) sd.u.push_back(cc.singularValues()[j]);
        }
        sd.finalize();
        const double tau = sd.minimize(v.norm());
        Matrix ph = Matrix::Zero(d, d);
        ph.topLeftCorner(r, r) = tau * Matrix::Identity(r, r);
        if (d > r) {
          const Vector clipped = cc.singularValues().cwiseMin(tau);
          ph.bottomRightCorner(d - r, d - r) =
              cc.matrixU() * clipped.asDiagonal() * cc.matrixV().transpose();
        }
        const Matrix p = svd_u_ * ph * svd_v_.transpose();
        return Eigen::Map<const Vector>(p.data(), p.size());
      }
    }
    throw std::logic_error("ConeHandle::project_onto_polar: unreachable");
  }

  // Moreau: Proj(v, T) = v - Proj(v, T^polar).
  Vector project_onto_tangent(const Vector& v) const {
    if (special_ == Special::full_space) {
      check_dim(v);
      return v;
    }
    return v - project_onto_polar(v);
  }

 private:
  ConeHandle() = default;

  ConeHandle(SignalDescriptor anchor, ConeSelect sel)
      : special_(Special::anchored), select_(sel), n_(anchor.model.n), anchor_(std::move(anchor)) {
    const StructureModel& model = anchor_.model;
    if (model.is_norm() && anchor_.is_zero())
      throw degenerate_anchor_error(
          "ConeHandle: x0 = 0 anchors a norm at its minimizer; the tangent cone is all of R^n "
          "(use ConeHandle::full_space to opt in)");
    switch (model.kind) {
      case StructureKind::sparse: {
        on_support_.assign(static_cast<std::size_t>(n_), 0);
        unit_field_ = Vector::Zero(n_);
        for (int i = 0; i < n_; ++i) {
          if (std::abs(anchor_.x0[i]) > anchor_.zero_tol) {
            on_support_[static_cast<std::size_t>(i)] = 1;
            unit_field_[i] = anchor_.x0[i] > 0.0 ? 1.0 : -1.0;
          }
        }
        break;
      }
      case StructureKind::non_negative: {
        on_support_.assign(static_cast<std::size_t>(n_), 0);
        for (int i = 0; i < n_; ++i)
          if (anchor_.x0[i] > anchor_.zero_tol) on_support_[static_cast<std::size_t>(i)] = 1;
        break;
      }
      case StructureKind::block_sparse: {
        const int q = model.block_count, b = model.block_size;
        block_active_.assign(static_cast<std::size_t>(q), 0);
        unit_field_ = Vector::Zero(n_);
        for (int i = 0; i < q; ++i) {
          const auto seg = anchor_.x0.segment(static_cast<Eigen::Index>(i) * b, b);
          const double nb = seg.norm();
          if (nb > anchor_.zero_tol) {
            block_active_[static_cast<std::size_t>(i)] = 1;
            unit_field_.segment(static_cast<Eigen::Index>(i) * b, b) = seg / nb;
          }
        }
        break;
      }
      case StructureKind::low_rank: {
        Eigen::JacobiSVD<Matrix> svd(detail::as_matrix(anchor_.x0, model.side),
                                     Eigen::ComputeFullU | Eigen::ComputeFullV);
        if (svd.info() != Eigen::Success)
          throw numeric_error("ConeHandle: anchor SVD did not converge");
        svd_u_ = svd.matrixU();
        svd_v_ = svd.matrixV();
        rank_ = static_cast<int>((svd.singularValues().array() > anchor_.zero_tol).count());
        break;
      }
    }
  }

  void check_dim(const Vector& v) const {
    if (v.size() != n_) throw std::invalid_argument("ConeHandle: vector dimension mismatch");
  }

  enum class Special { anchored, full_space, ray };
  Special special_ = Special::anchored;
  ConeSelect select_ = ConeSelect::tangent;
  int n_ = 0;
  SignalDescriptor anchor_;
  std::vector<char> on_support_;    // sparse / non_negative
  std::vector<char> block_active_;  // block_sparse
  Vector unit_field_;               // signs (sparse) or unit blocks (block_sparse)
  Matrix svd_u_, svd_v_;            // low_rank
  int rank_ = 0;
  Vector ray_dir_;
};

// Closest point of Cl(cone(subdifferential f(x0))) to v.
inline Vector project_polar_cone(const Vector& v, const ConeHandle& cone) {
  if (cone.select() != ConeSelect::polar)
    throw std::invalid_argument("project_polar_cone: handle must select the polar cone");
  return cone.project_onto_polar(v);
}

// Closest point of T_f(x0) to v, via the Moreau decomposition.
inline Vector project_tangent_cone(const Vector& v, const ConeHandle& cone) {
  if (cone.select() != ConeSelect::tangent)
    throw std::invalid_argument("project_tangent_cone: handle must select the tangent cone");
  return cone.project_onto_tangent(v);
}

struct MoreauSplit {
  Vector tangent_part;
  Vector polar_part;
};

inline MoreauSplit moreau_split(const Vector& v, const ConeHandle& cone) {
  MoreauSplit s;
  s.polar_part = cone.project_onto_polar(v);
  s.tangent_part = v - s.polar_part;
  return s;
}

}  // namespace conebounds
