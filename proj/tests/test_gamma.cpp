#include <catch2/catch_amalgamated.hpp>

#include "conebounds/gamma.hpp"

using conebounds::gamma_d;

TEST_CASE("gamma_d analytic values", "[gamma]") {
  // Gamma(1) = 1, Gamma(1/2) = sqrt(pi): gamma_1 = sqrt(2/pi)
  CHECK(gamma_d(1) == Catch::Approx(0.79788456080286536).epsilon(1e-13));
  // gamma_2 = sqrt(pi/2)
  CHECK(gamma_d(2) == Catch::Approx(1.2533141373155003).epsilon(1e-13));
  CHECK(gamma_d(3) == Catch::Approx(1.5957691216057307).epsilon(1e-13));
}

TEST_CASE("gamma product identity gamma_{m-1} gamma_m = m-1", "[gamma]") {
  CHECK(gamma_d(2) * gamma_d(3) == Catch::Approx(2.0).epsilon(1e-12));
  for (std::int64_t m : {2, 3, 10, 100, 10000, 123457, 1000000}) {
    const double product = gamma_d(m - 1 == 0 ? 1 : m - 1) * gamma_d(m);
    if (m == 1) continue;
    CHECK(product == Catch::Approx(static_cast<double>(m - 1)).epsilon(1e-9));
  }
}

TEST_CASE("gamma_d bracketed by sqrt(d) and d/sqrt(d+1)", "[gamma]") {
  for (std::int64_t d = 1; d <= 10000; ++d) {
    const double g = gamma_d(d);
    const double dd = static_cast<double>(d);
    REQUIRE(g <= std::sqrt(dd) * (1.0 + 1e-12));
    REQUIRE(g >= dd / std::sqrt(dd + 1.0) * (1.0 - 1e-12));
  }
}

TEST_CASE("gamma_d rejects d = 0", "[gamma]") {
  CHECK_THROWS_AS(gamma_d(0), std::domain_error);
  CHECK_THROWS_AS(gamma_d(-3), std::domain_error);
}
