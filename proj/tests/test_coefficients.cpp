#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "levysim/coefficients.hpp"

using namespace levysim;

TEST_CASE("constant family: zero quotients, exact determinant") {
  const SdeCoefficients c = builtin_coefficients("constant:0.5:2.0", 2);
  const RegularityReport rep = validate_coefficients(c, 10000);
  CHECK(rep.ok());
  CHECK(rep.holder_quotient_max == 0.0);
  CHECK(rep.lipschitz_quotient_max == 0.0);
  CHECK(rep.min_abs_det == Catch::Approx(4.0));
  Vec x(2);
  x[0] = 3.0;
  CHECK(c.drift(x)[0] == 0.5);
  CHECK(c.diffusion(x)(0, 0) == 2.0);
  CHECK(c.diffusion(x)(0, 1) == 0.0);
}

TEST_CASE("identity diffusion has unit determinant everywhere") {
  const SdeCoefficients c = builtin_coefficients("constant:0:1", 1);
  CHECK(validate_coefficients(c, 2000).min_abs_det == Catch::Approx(1.0));
}

TEST_CASE("holder drift: declared constants hold on the sampling grid") {
  const SdeCoefficients c = builtin_coefficients("holder-drift:0.4", 1);
  CHECK(c.beta == Catch::Approx(0.4));
  const RegularityReport rep = validate_coefficients(c, 10000);
  INFO("observed Holder quotient " << rep.holder_quotient_max << " declared " << c.drift_holder);
  CHECK(rep.ok());
  CHECK(rep.holder_quotient_max > 0.5 * c.drift_holder);  // the grid actually probes the cusp
}

TEST_CASE("holder quotient estimate is stable under grid refinement") {
  const SdeCoefficients c = builtin_coefficients("holder-drift:0.4", 1);
  const double q1 = validate_coefficients(c, 10000).holder_quotient_max;
  const double q4 = validate_coefficients(c, 40000).holder_quotient_max;
  CHECK(q4 / q1 < 1.25);
  CHECK(q1 / q4 < 1.25);
}

TEST_CASE("halving a declared constant flags a violation") {
  SdeCoefficients c = builtin_coefficients("holder-drift:0.4", 1);
  c.drift_holder *= 0.5;
  const RegularityReport rep = validate_coefficients(c, 10000);
  CHECK_FALSE(rep.ok());
  REQUIRE_FALSE(rep.violations.empty());
}

TEST_CASE("lipschitz family: nondegenerate on the sampling grid") {
  const SdeCoefficients c = builtin_coefficients("lipschitz", 1);
  const RegularityReport rep = validate_coefficients(c, 10000);
  CHECK(rep.ok());
  REQUIRE(c.nondegeneracy.has_value());
  CHECK(rep.min_abs_det >= *c.nondegeneracy / (1.0 + 1e-6));
  CHECK(rep.drift_sup <= 1.0 + 1e-9);
}

TEST_CASE("degenerate family really loses rank") {
  const SdeCoefficients c = builtin_coefficients("degenerate", 1);
  Vec zero(1);
  CHECK(c.diffusion(zero)(0, 0) == 0.0);
  const RegularityReport rep = validate_coefficients(c, 5000);
  CHECK(rep.ok());  // no nondegeneracy claim, nothing to violate
}

TEST_CASE("every built-in family is total on the validation grid") {
  for (const char* name : {"holder-drift:0.3", "holder-drift:0.8", "lipschitz", "degenerate",
                           "constant:1:0.5"}) {
    const RegularityReport rep = validate_coefficients(builtin_coefficients(name, 1), 2000);
    CHECK(rep.all_finite);
  }
}

TEST_CASE("registry rejects unknown names and bad parameters") {
  CHECK_THROWS_AS(builtin_coefficients("bogus", 1), std::invalid_argument);
  CHECK_THROWS_AS(builtin_coefficients("holder-drift:1.5", 1), std::invalid_argument);
  CHECK_THROWS_AS(builtin_coefficients("constant:1", 1), std::invalid_argument);
  CHECK_THROWS_AS(validate_coefficients(builtin_coefficients("lipschitz", 1), 10),
                  std::invalid_argument);
}

TEST_CASE("coefficient evaluation is reentrant and repeatable") {
  const SdeCoefficients c = builtin_coefficients("lipschitz", 2);
  Vec x(2);
  x[0] = 0.7;
  x[1] = -0.3;
  const Vec b1 = c.drift(x);
  const Vec b2 = c.drift(x);
  CHECK(b1[0] == b2[0]);
  CHECK(b1[1] == b2[1]);
}
