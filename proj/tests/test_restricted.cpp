#include <catch2/catch_amalgamated.hpp>

#include "conebounds/bounds.hpp"
#include "conebounds/restricted.hpp"
#include "conebounds/rng.hpp"

using namespace conebounds;

namespace {
SignalDescriptor sparse_anchor(int n, int k, std::uint64_t seed) {
  RngStream rng(seed);
  Vector x0 = Vector::Zero(n);
  for (int i = 0; i < k; ++i) x0[i] = 2.0 + rng.next_unit();
  return SignalDescriptor::analyze(StructureModel::sparse(n), x0);
}
}  // namespace

TEST_CASE("restricted singular value of the identity is 1", "[restricted]") {
  const int n = 12;
  const Matrix a = Matrix::Identity(n, n);
  const auto cone = ConeHandle::tangent(sparse_anchor(n, 2, 3));
  CHECK(restricted_min_singular(a, cone, 5, 17) == Catch::Approx(1.0).epsilon(1e-10));
  CHECK(restricted_min_singular(a, ConeHandle::full_space(n), 5, 17) ==
        Catch::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("full-space restriction recovers the ordinary sigma_min", "[restricted]") {
  RngStream rng(8);
  const Matrix a = rng.gaussian_matrix(8, 5);
  Eigen::JacobiSVD<Matrix> svd(a);
  const double sigma_min = svd.singularValues().minCoeff();
  const double est = restricted_min_singular(a, ConeHandle::full_space(5), 20, 4,
                                             {2000, 1e-14, 100});
  CHECK(est >= sigma_min - 1e-9);  // upper estimate of the true minimum
  CHECK(est <= sigma_min + 1e-5);
}

TEST_CASE("restricted singular value respects the Gordon bound, small sample",
          "[restricted]") {
  // n and m chosen so the bound is positive: omega ~ 3.1, gamma_48 ~ 6.9, t = 2
  const int n = 40, m = 48, k = 1, t = 2;
  const double w = width_closed_form(StructureModel::sparse(n), k);
  const double bound = gordon_lower_bound(m, w, t);
  REQUIRE(bound > 0.0);
  int failures = 0;
  const int trials = 25;
  for (int trial = 0; trial < trials; ++trial) {
    RngStream rng(900 + trial);
    const Matrix a = rng.gaussian_matrix(m, n, 1.0 / std::sqrt(static_cast<double>(m)));
    const auto cone = ConeHandle::tangent(sparse_anchor(n, k, 100 + trial));
    if (restricted_min_singular(a, cone, 20, 55 + trial) < bound) ++failures;
  }
  // e^{-2} + generous slack on 25 trials
  CHECK(failures <= 8);
}

TEST_CASE("restricted singular value clears the Gordon bound at paper scale",
          "[restricted]") {
  // m=100, n=500, k=5: estimate >= (gamma_m - w - t)/sqrt(m) at t = 2
  const int n = 500, m = 100, k = 5;
  const double w = width_closed_form(StructureModel::sparse(n), k);
  const double bound = gordon_lower_bound(m, w, 2.0);
  REQUIRE(bound > 0.0);
  RngStream rng(314);
  const Matrix a = rng.gaussian_matrix(m, n, 1.0 / std::sqrt(static_cast<double>(m)));
  const auto cone = ConeHandle::tangent(sparse_anchor(n, k, 2718));
  const double est = restricted_min_singular(a, cone, 50, 99);
  CHECK(est >= bound);
}

TEST_CASE("full-sphere restriction reduces to the classical sigma_min fact",
          "[restricted]") {
  // omega(full space cap B) = gamma_n; sigma_min(A) >= (gamma_m - gamma_n - t)/sqrt(m)
  const int n = 10, m = 60;
  const double bound = (gamma_d(m) - gamma_d(n) - 2.0) / std::sqrt(static_cast<double>(m));
  REQUIRE(bound > 0.0);
  int failures = 0;
  const int draws = 20;
  for (int trial = 0; trial < draws; ++trial) {
    RngStream rng(4000 + trial);
    const Matrix a = rng.gaussian_matrix(m, n, 1.0 / std::sqrt(static_cast<double>(m)));
    Eigen::JacobiSVD<Matrix> svd(a);
    if (svd.singularValues().minCoeff() < bound) ++failures;
  }
  CHECK(failures <= 2);  // e^{-2} rate plus slack on 20 draws
}

TEST_CASE("cone image projection returns points already in the image", "[restricted]") {
  RngStream rng(10);
  const int m = 9, n = 14;
  const Matrix a = rng.gaussian_matrix(m, n);
  const auto anchor = sparse_anchor(n, 3, 77);
  const auto cone = ConeHandle::tangent(anchor);
  // w = -0.37 x0 is in the tangent cone, so z = A w is in the image
  const Vector z = a * Vector(-0.37 * anchor.x0);
  const auto res = project_cone_image(z, a, cone, 1e-10);
  CHECK(res.converged);
  CHECK((res.point - z).norm() <= 1e-6 * z.norm());
}

TEST_CASE("cone image of the full space is the whole range", "[restricted]") {
  RngStream rng(12);
  const int m = 6, n = 11;
  const Matrix a = rng.gaussian_matrix(m, n);
  const Vector z = rng.gaussian_vector(m);
  const auto res = project_cone_image(z, a, ConeHandle::full_space(n), 1e-10);
  CHECK((res.point - z).norm() <= 1e-6 * z.norm());
}

TEST_CASE("cone image projection matches a brute-force oracle", "[restricted]") {
  RngStream rng(14);
  const int m = 4, n = 6;
  const Matrix a = rng.gaussian_matrix(m, n);
  const auto anchor = sparse_anchor(n, 1, 5);
  const auto cone = ConeHandle::tangent(anchor);
  const Vector z = rng.gaussian_vector(m);
  const auto res = project_cone_image(z, a, cone, 1e-10);
  const double dist = (z - res.point).norm();

  // brute force: random unit cone directions scaled over a radius grid
  double best = z.norm();
  RngStream sampler(15);
  for (int s = 0; s < 20000; ++s) {
    Vector u = cone.project_onto_tangent(sampler.gaussian_vector(n));
    const double nu = u.norm();
    if (nu < 1e-12) continue;
    u /= nu;
    const Vector au = a * u;
    // the optimal radius along this direction has a closed form
    const double c = std::max(z.dot(au), 0.0) / au.squaredNorm();
    best = std::min(best, (z - c * au).norm());
  }
  CHECK(dist <= best + 1e-6);

  // variational inequality at the returned point over sampled directions
  for (int s = 0; s < 200; ++s) {
    Vector u = cone.project_onto_tangent(sampler.gaussian_vector(n));
    const Vector av = a * u;
    CHECK((z - res.point).dot(av - res.point) <= 1e-6 * z.norm() * (1.0 + av.norm()));
  }
}

TEST_CASE("cone image projection on a ray has a closed form", "[restricted]") {
  RngStream rng(16);
  const int m = 7, n = 5;
  const Matrix a = rng.gaussian_matrix(m, n);
  const Vector dir = rng.gaussian_vector(n);
  const auto ray = ConeHandle::ray(dir);
  const Vector z = rng.gaussian_vector(m);
  const auto res = project_cone_image(z, a, ray, 1e-11);
  const Vector au = a * (dir / dir.norm());
  const double c = std::max(z.dot(au), 0.0) / au.squaredNorm();
  CHECK((res.point - c * au).norm() < 1e-6);
}
