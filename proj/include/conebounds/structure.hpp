#pragma once

#include <cmath>
#include <string>

#include "conebounds/common.hpp"

namespace conebounds {

// Which structure-inducing function f is in play.
//
//   sparse       f = l1 norm
//   block_sparse f = l1,2 norm (sum of per-block l2 norms), q blocks of size b
//   low_rank     f = nuclear norm on d x d matrices, vectors hold vec(X)
//   non_negative f = indicator of the non-negative orthant
enum class StructureKind { sparse, block_sparse, low_rank, non_negative };

inline const char* to_string(StructureKind k) {
  switch (k) {
    case StructureKind::sparse: return "sparse";
    case StructureKind::block_sparse: return "block_sparse";
    case StructureKind::low_rank: return "low_rank";
    case StructureKind::non_negative: return "non_negative";
  }
  return "?";
}

struct StructureModel {
  StructureKind kind = StructureKind::sparse;
  int n = 0;            // ambient dimension (d*d for low_rank)
  int block_count = 0;  // q, block_sparse only
  int block_size = 0;   // b, block_sparse only
  int side = 0;         // d, low_rank only

  static StructureModel sparse(int n) { return validated({StructureKind::sparse, n, 0, 0, 0}); }
  static StructureModel block_sparse(int q, int b) {
    return validated({StructureKind::block_sparse, q * b, q, b, 0});
  }
  static StructureModel low_rank(int d) {
    return validated({StructureKind::low_rank, d * d, 0, 0, d});
  }
  static StructureModel non_negative(int n) {
    return validated({StructureKind::non_negative, n, 0, 0, 0});
  }

  bool is_norm() const { return kind != StructureKind::non_negative; }

  void validate() const {
    if (n < 1) throw std::invalid_argument("StructureModel: n must be >= 1");
    if (kind == StructureKind::block_sparse) {
      if (block_count < 1 || block_size < 1)
        throw std::invalid_argument("StructureModel: block dimensions must be >= 1");
      if (block_count * block_size != n)
        throw std::invalid_argument("StructureModel: q*b must equal n");
    }
    if (kind == StructureKind::low_rank) {
      if (side < 1) throw std::invalid_argument("StructureModel: matrix side must be >= 1");
      if (side * side != n) throw std::invalid_argument("StructureModel: d^2 must equal n");
    }
  }

 private:
  static StructureModel validated(StructureModel m) {
    m.validate();
    return m;
  }
};

namespace detail {
inline Eigen::Map<const Matrix> as_matrix(const Vector& v, int d) {
  return Eigen::Map<const Matrix>(v.data(), d, d);
}
}  // namespace detail

// f(x) for the model's structure function. For non_negative this is the
// orthant indicator: 0 when feasible (up to a tiny slack), +inf otherwise.
inline double structure_norm(const StructureModel& model, const Vector& x) {
  if (x.size() != model.n) throw std::invalid_argument("structure_norm: dimension mismatch");
  switch (model.kind) {
    case StructureKind::sparse:
      return x.lpNorm<1>();
    case StructureKind::block_sparse: {
      double s = 0.0;
      for (int b = 0; b < model.block_count; ++b)
        s += x.segment(static_cast<Eigen::Index>(b) * model.block_size, model.block_size).norm();
      return s;
    }
    case StructureKind::low_rank: {
      Eigen::JacobiSVD<Matrix> svd(detail::as_matrix(x, model.side));
      return svd.singularValues().sum();
    }
    case StructureKind::non_negative: {
      const double slack = 1e-12 * (1.0 + x.cwiseAbs().maxCoeff());
      return (x.minCoeff() >= -slack) ? 0.0 : std::numeric_limits<double>::infinity();
    }
  }
  throw std::logic_error("structure_norm: unreachable");
}

// A signal x0 with its detected complexity: sparsity k, block-sparsity k, or
// rank r, counted above a scale-invariant zero tolerance 1e-9 * ||x0||_inf.
struct SignalDescriptor {
  StructureModel model;
  Vector x0;
  int complexity = 0;
  double zero_tol = 0.0;

  static SignalDescriptor analyze(const StructureModel& model, Vector x0) {
    model.validate();
    if (x0.size() != model.n)
      throw std::invalid_argument("SignalDescriptor: x0 length does not match model");
    SignalDescriptor d;
    d.model = model;
    d.zero_tol = 1e-9 * (x0.size() ? x0.cwiseAbs().maxCoeff() : 0.0);
    switch (model.kind) {
      case StructureKind::sparse:
        d.complexity = static_cast<int>((x0.cwiseAbs().array() > d.zero_tol).count());
        break;
      case StructureKind::non_negative: {
        const double tol = d.zero_tol;
        if (x0.minCoeff() < -std::max(tol, 1e-12))
          throw std::domain_error("SignalDescriptor: non_negative anchor has negative entries");
        d.complexity = static_cast<int>((x0.array() > tol).count());
        break;
      }
      case StructureKind::block_sparse: {
        int k = 0;
        for (int b = 0; b < model.block_count; ++b)
          if (x0.segment(static_cast<Eigen::Index>(b) * model.block_size, model.block_size)
                  .norm() > d.zero_tol)
            ++k;
        d.complexity = k;
        break;
      }
      case StructureKind::low_rank: {
        Eigen::JacobiSVD<Matrix> svd(detail::as_matrix(x0, model.side));
        d.complexity = static_cast<int>((svd.singularValues().array() > d.zero_tol).count());
        break;
      }
    }
    d.x0 = std::move(x0);
    return d;
  }

  bool is_zero() const { return complexity == 0; }
};

}  // namespace conebounds
