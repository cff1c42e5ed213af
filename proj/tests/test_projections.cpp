#include <catch2/catch_amalgamated.hpp>

#include "conebounds/projections.hpp"
#include "conebounds/rng.hpp"

using namespace conebounds;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double e : v) x[i++] = e;
  return x;
}

// Independent oracle: bisection on the soft-threshold level theta solving
// sum_i max(|v_i| - theta, 0) = radius.
Vector l1_projection_bisection(const Vector& v, double radius) {
  if (v.lpNorm<1>() <= radius) return v;
  double lo = 0.0, hi = v.cwiseAbs().maxCoeff();
  for (int it = 0; it < 200; ++it) {
    const double theta = 0.5 * (lo + hi);
    double mass = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) mass += std::max(std::abs(v[i]) - theta, 0.0);
    (mass > radius ? lo : hi) = theta;
  }
  const double theta = 0.5 * (lo + hi);
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double m = std::max(std::abs(v[i]) - theta, 0.0);
    out[i] = v[i] >= 0.0 ? m : -m;
  }
  return out;
}

}  // namespace

TEST_CASE("l1 ball projection examples", "[projections]") {
  CHECK((project_l1_ball(vec({0.5, -0.3}), 1.0) - vec({0.5, -0.3})).norm() == 0.0);
  CHECK((project_l1_ball(vec({3.0, 0.0}), 1.0) - vec({1.0, 0.0})).norm() < 1e-14);
  CHECK((project_l1_ball(vec({2.0, 1.0}), 2.0) - vec({1.5, 0.5})).norm() < 1e-14);
}

TEST_CASE("l1 ball projection matches the bisection oracle", "[projections]") {
  RngStream rng(42);
  for (int rep = 0; rep < 50; ++rep) {
    const Vector v = rng.gaussian_vector(30);
    const double radius = 0.3 + 2.0 * rng.next_unit();
    const Vector fast = project_l1_ball(v, radius);
    const Vector slow = l1_projection_bisection(v, radius);
    CHECK((fast - slow).norm() < 1e-9);
    CHECK(fast.lpNorm<1>() <= radius * (1.0 + 1e-10));
  }
}

TEST_CASE("l1 ball projection domain errors", "[projections]") {
  CHECK_THROWS_AS(project_l1_ball(vec({1.0}), -0.5), std::domain_error);
  CHECK(project_l1_ball(vec({1.0, -2.0}), 0.0).norm() == 0.0);
}

TEST_CASE("l12 ball projection reductions", "[projections]") {
  // all blocks zero
  CHECK(project_l12_ball(Vector::Zero(6), 3, 2, 1.0).norm() == 0.0);
  // single block reduces to l2 ball projection
  const Vector v = vec({3.0, 4.0});
  const Vector p = project_l12_ball(v, 1, 2, 2.0);
  CHECK((p - v * (2.0 / 5.0)).norm() < 1e-14);
  // q blocks of size 1 reduce to the l1 ball with signs restored
  RngStream rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    const Vector w = rng.gaussian_vector(9);
    const double radius = 1.5 * rng.next_unit();
    CHECK((project_l12_ball(w, 9, 1, radius) - project_l1_ball(w, radius)).norm() < 1e-12);
  }
  CHECK_THROWS_AS(project_l12_ball(vec({1.0, 2.0, 3.0}), 2, 2, 1.0), std::invalid_argument);
}

TEST_CASE("nuclear ball projection reductions", "[projections]") {
  RngStream rng(11);
  // within the ball: unchanged
  Matrix small = Matrix::Zero(3, 3);
  small(0, 0) = 0.2;
  small(1, 2) = 0.1;
  CHECK((project_nuclear_ball(small, 1.0) - small).norm() == 0.0);
  // diagonal matrices reduce to the l1 projection of the diagonal
  Vector diag = vec({2.0, -1.0, 0.5, 0.0});
  Matrix d = diag.asDiagonal();
  const Matrix pd = project_nuclear_ball(d, 2.0);
  const Vector pdiag = project_l1_ball(diag, 2.0);
  CHECK((pd - Matrix(pdiag.asDiagonal())).norm() < 1e-12);
  // rank one: radius * u v^T
  const Vector u = rng.gaussian_vector(5).normalized();
  const Vector w = rng.gaussian_vector(5).normalized();
  const Matrix r1 = 3.7 * u * w.transpose();
  CHECK((project_nuclear_ball(r1, 1.25) - 1.25 * u * w.transpose()).norm() < 1e-12);
}

TEST_CASE("ball projections are idempotent and non-expansive", "[projections]") {
  RngStream rng(99);
  for (int rep = 0; rep < 25; ++rep) {
    const Vector v = 3.0 * rng.gaussian_vector(24);
    const Vector w = 3.0 * rng.gaussian_vector(24);
    const double radius = 0.5 + 2.0 * rng.next_unit();

    const Vector pv1 = project_l1_ball(v, radius);
    CHECK((project_l1_ball(pv1, radius) - pv1).norm() < 1e-10);
    CHECK((pv1 - project_l1_ball(w, radius)).norm() <= (v - w).norm() * (1.0 + 1e-12));

    const Vector pv2 = project_l12_ball(v, 6, 4, radius);
    CHECK((project_l12_ball(pv2, 6, 4, radius) - pv2).norm() < 1e-10);
    CHECK((pv2 - project_l12_ball(w, 6, 4, radius)).norm() <= (v - w).norm() * (1.0 + 1e-12));

    const Matrix mv = Eigen::Map<const Matrix>(v.data(), 6, 4);
    const Matrix mw = Eigen::Map<const Matrix>(w.data(), 6, 4);
    const Matrix pm = project_nuclear_ball(mv, radius);
    CHECK((project_nuclear_ball(pm, radius) - pm).norm() < 1e-10);
    CHECK((pm - project_nuclear_ball(mw, radius)).norm() <= (mv - mw).norm() * (1.0 + 1e-12));

    const Vector po = Vector(v.cwiseMax(0.0));
    CHECK((po.cwiseMax(0.0) - po).norm() == 0.0);
  }
}

TEST_CASE("structure prox operators", "[projections]") {
  // l1 prox is soft thresholding
  const auto model = StructureModel::sparse(4);
  const Vector v = vec({2.0, -0.4, 0.6, -3.0});
  const Vector p = prox_structure_norm(model, v, 0.5);
  CHECK((p - vec({1.5, 0.0, 0.1, -2.5})).norm() < 1e-14);
  // block prox shrinks block norms
  const auto bmodel = StructureModel::block_sparse(2, 2);
  const Vector bv = vec({3.0, 4.0, 0.1, 0.2});
  const Vector bp = prox_structure_norm(bmodel, bv, 1.0);
  CHECK(bp.segment(0, 2).norm() == Catch::Approx(4.0).margin(1e-12));
  CHECK(bp.segment(2, 2).norm() == 0.0);
}
