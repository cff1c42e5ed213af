#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "conebounds/common.hpp"
#include "conebounds/structure.hpp"

namespace conebounds {

// Euclidean projection onto { u : ||u||_1 <= radius }.
//
// Sort-based exact threshold: sort |v| descending, find the largest prefix
// whose water level stays positive, soft-threshold at that level. Ties are
// resolved by the sorted-prefix rule, which is deterministic because the
// level theta is unique even when entries tie.
inline Vector project_l1_ball(const Vector& v, double radius) {
  if (!(radius >= 0.0)) throw std::domain_error("project_l1_ball: radius must be >= 0");
  if (v.lpNorm<1>() <= radius) return v;
  if (radius == 0.0) return Vector::Zero(v.size());
  const Eigen::Index n = v.size();
  std::vector<double> mag(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) mag[static_cast<std::size_t>(i)] = std::abs(v[i]);
  std::sort(mag.begin(), mag.end(), std::greater<double>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < mag.size(); ++j) {
    cumsum += mag[j];
    const double level = (cumsum - radius) / static_cast<double>(j + 1);
    if (mag[j] - level > 0.0)
      theta = level;
    else
      break;
  }
  Vector out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = std::abs(v[i]) - theta;
    out[i] = m > 0.0 ? (v[i] > 0.0 ? m : -m) : 0.0;
  }
  return out;
}

// Euclidean projection onto { u : sum_b ||u_b||_2 <= radius } with q blocks of
// size b: project the vector of block norms onto the l1 ball, rescale blocks.
inline Vector project_l12_ball(const Vector& v, int q, int b, double radius) {
  if (q < 1 || b < 1 || v.size() != static_cast<Eigen::Index>(q) * b)
    throw std::invalid_argument("project_l12_ball: dimension mismatch");
  if (!(radius >= 0.0)) throw std::domain_error("project_l12_ball: radius must be >= 0");
  Vector norms(q);
  for (int i = 0; i < q; ++i) norms[i] = v.segment(static_cast<Eigen::Index>(i) * b, b).norm();
  const Vector scaled = project_l1_ball(norms, radius);
  Vector out(v.size());
  for (int i = 0; i < q; ++i) {
    const auto seg = v.segment(static_cast<Eigen::Index>(i) * b, b);
    if (norms[i] > 0.0)
      out.segment(static_cast<Eigen::Index>(i) * b, b) = seg * (scaled[i] / norms[i]);
    else
      out.segment(static_cast<Eigen::Index>(i) * b, b).setZero();
  }
  return out;
}

// Euclidean projection onto the nuclear-norm ball of the given radius:
// full SVD, l1-ball projection of the singular values, reconstruction.
inline Matrix project_nuclear_ball(const Matrix& v, double radius) {
  if (!(radius >= 0.0)) throw std::domain_error("project_nuclear_ball: radius must be >= 0");
  Eigen::JacobiSVD<Matrix> svd(v, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success)
    throw numeric_error("project_nuclear_ball: SVD did not converge on a " +
                        std::to_string(v.rows()) + "x" + std::to_string(v.cols()) + " matrix");
  const Vector sigma = svd.singularValues();
  if (sigma.sum() <= radius) return v;
  const Vector clipped = project_l1_ball(sigma, radius);
  return svd.matrixU() * clipped.asDiagonal() * svd.matrixV().transpose();
}

// Projection onto { f(x) <= radius } for the model's structure function.
// For non_negative the set is the orthant itself (radius is ignored; the
// indicator takes value 0 on every feasible point).
inline Vector project_structure_ball(const StructureModel& model, const Vector& v,
                                     double radius) {
  switch (model.kind) {
    case StructureKind::sparse:
      return project_l1_ball(v, radius);
    case StructureKind::block_sparse:
      return project_l12_ball(v, model.block_count, model.block_size, radius);
    case StructureKind::low_rank: {
      const Matrix p = project_nuclear_ball(detail::as_matrix(v, model.side), radius);
      return Eigen::Map<const Vector>(p.data(), p.size());
    }
    case StructureKind::non_negative:
      return v.cwiseMax(0.0);
  }
  throw std::logic_error("project_structure_ball: unreachable");
}

// prox_{s*f}(v), the proximal operator of the model's norm scaled by s.
inline Vector prox_structure_norm(const StructureModel& model, const Vector& v, double s) {
  if (!(s >= 0.0)) throw std::domain_error("prox_structure_norm: scale must be >= 0");
  switch (model.kind) {
    case StructureKind::sparse: {
      Vector out(v.size());
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double m = std::abs(v[i]) - s;
        out[i] = m > 0.0 ? (v[i] > 0.0 ? m : -m) : 0.0;
      }
      return out;
    }
    case StructureKind::block_sparse: {
      Vector out(v.size());
      for (int i = 0; i < model.block_count; ++i) {
        const auto seg = v.segment(static_cast<Eigen::Index>(i) * model.block_size,
                                   model.block_size);
        const double nb = seg.norm();
        out.segment(static_cast<Eigen::Index>(i) * model.block_size, model.block_size) =
            (nb > s) ? Vector(seg * (1.0 - s / nb)) : Vector::Zero(model.block_size);
      }
      return out;
    }
    case StructureKind::low_rank: {
      Eigen::JacobiSVD<Matrix> svd(detail::as_matrix(v, model.side),
                                   Eigen::ComputeThinU | Eigen::ComputeThinV);
      if (svd.info() != Eigen::Success)
        throw numeric_error("prox_structure_norm: SVD did not converge");
      const Vector sigma = (svd.singularValues().array() - s).max(0.0);
      const Matrix p = svd.matrixU() * sigma.asDiagonal() * svd.matrixV().transpose();
      return Eigen::Map<const Vector>(p.data(), p.size());
    }
    case StructureKind::non_negative:
      return v.cwiseMax(0.0);  // prox of the indicator, independent of s
  }
  throw std::logic_error("prox_structure_norm: unreachable");
}

// Dual norm of the model's structure function, used for penalty brackets:
// l_inf for l1, max block l2 for l1,2, spectral norm for nuclear.
inline double structure_dual_norm(const StructureModel& model, const Vector& v) {
  switch (model.kind) {
    case StructureKind::sparse:
      return v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
    case StructureKind::block_sparse: {
      double best = 0.0;
      for (int i = 0; i < model.block_count; ++i)
        best = std::max(best, v.segment(static_cast<Eigen::Index>(i) * model.block_size,
                                        model.block_size)
                                  .norm());
      return best;
    }
    case StructureKind::low_rank: {
      Eigen::JacobiSVD<Matrix> svd(detail::as_matrix(v, model.side));
      return svd.singularValues()[0];
    }
    case StructureKind::non_negative:
      throw unsupported_model_error("structure_dual_norm: indicator has no dual norm");
  }
  throw std::logic_error("structure_dual_norm: unreachable");
}

}  // namespace conebounds
