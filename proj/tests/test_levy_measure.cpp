#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "levysim/levy_measure.hpp"
#include "levysim/quadrature.hpp"

using namespace levysim;

TEST_CASE("built-in densities respect their declared bounds and symmetry") {
  check_density_invariants(make_isotropic(1), 10000);
  check_density_invariants(make_isotropic(2), 10000);
  check_density_invariants(make_isotropic(3), 10000);
  check_density_invariants(make_cosine_tilt(0.5), 10000);
  check_density_invariants(make_two_sided(2.0, 1.0), 10000);
}

TEST_CASE("density registry parses names and rejects mismatches") {
  CHECK(density_from_name("isotropic", 2).dimension == 2);
  CHECK(density_from_name("cosine-tilt:0.5", 2).upper_bound == Catch::Approx(1.5));
  CHECK(density_from_name("two-sided:2:1", 1).lower_bound == Catch::Approx(1.0));
  CHECK_THROWS_AS(density_from_name("cosine-tilt:0.5", 1), std::invalid_argument);
  CHECK_THROWS_AS(density_from_name("two-sided:2:1", 2), std::invalid_argument);
  CHECK_THROWS_AS(density_from_name("nope", 1), std::invalid_argument);
  CHECK_THROWS_AS(density_from_name("cosine-tilt:1.5", 2), std::invalid_argument);
}

TEST_CASE("evaluation depends only on direction") {
  const AngularDensity d = make_cosine_tilt(0.3);
  Vec y(2);
  y[0] = 0.6;
  y[1] = -0.8;
  const double v1 = d.evaluate_direction(y);
  const double v2 = d.evaluate_direction(y * 7.25);
  CHECK(v1 == v2);  // normalization makes 0-homogeneity structural
}

TEST_CASE("radius sampler endpoints and frozen inverse-CDF value") {
  CHECK(radius_inverse_cdf(0.0, 1.5, 0.01, 1.0) == Catch::Approx(0.01).epsilon(1e-14));
  CHECK(radius_inverse_cdf(1.0 - 1e-12, 1.5, 0.01, 1.0) == Catch::Approx(1.0).epsilon(1e-9));
  // alpha=1, r in [0.01, 1], U=0.5 -> 1/50.5
  CHECK(radius_inverse_cdf(0.5, 1.0, 0.01, 1.0) ==
        Catch::Approx(0.019801980198019802).epsilon(1e-14));
  RngStream rng(1);
  CHECK_THROWS_AS(sample_radius(rng, 1.5, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(sample_radius(rng, 1.5, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("radius sampler passes Kolmogorov-Smirnov against the analytic CDF") {
  const int n = 100000;
  const double crit = 1.9495 / std::sqrt(static_cast<double>(n));  // significance 1e-3
  for (double alpha : {1.0, 1.5, 1.9}) {
    for (double r_min : {1e-3, 1e-2}) {
      for (double r_max : {1.0, std::numeric_limits<double>::infinity()}) {
        RngStream rng(derive_key(987, static_cast<std::uint64_t>(alpha * 100),
                                 static_cast<std::uint64_t>(r_min * 1e5), std::isinf(r_max)));
        std::vector<double> sample(n);
        for (int i = 0; i < n; ++i) sample[i] = sample_radius(rng, alpha, r_min, r_max);
        std::sort(sample.begin(), sample.end());
        const double a = std::pow(r_min, -alpha);
        const double b = std::isinf(r_max) ? 0.0 : std::pow(r_max, -alpha);
        double dmax = 0.0;
        for (int i = 0; i < n; ++i) {
          const double cdf = (a - std::pow(sample[i], -alpha)) / (a - b);
          dmax = std::max(dmax, std::abs(cdf - (i + 0.5) / n) + 0.5 / n);
        }
        INFO("alpha=" << alpha << " r_min=" << r_min << " r_max=" << r_max << " D=" << dmax);
        CHECK(dmax < crit);
      }
    }
  }
}

TEST_CASE("direction sampler: uniform on the circle for constant density") {
  const AngularDensity iso = make_isotropic(2);
  RngStream rng(20240601);
  const int n = 100000;
  double sc = 0.0, ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec t = sample_direction(rng, iso);
    sc += t[0];
    ss += t[1];
  }
  const double sigma3 = 3.0 * std::sqrt(0.5 / n);  // Var cos = 1/2 on the circle
  CHECK(std::abs(sc / n) < sigma3);
  CHECK(std::abs(ss / n) < sigma3);
}

TEST_CASE("direction sampler: constant density below the bound still uniform") {
  // rho = c0 with K > c0: acceptance probability c0/K, law unchanged
  AngularDensity d = make_isotropic(2, 0.25);
  d.upper_bound = 1.0;
  RngStream rng(5150);
  const int n = 50000;
  double sc = 0.0;
  for (int i = 0; i < n; ++i) sc += sample_direction(rng, d)[0];
  CHECK(std::abs(sc / n) < 3.0 * std::sqrt(0.5 / n));
}

TEST_CASE("direction sampler matches quadrature moments for the tilted density") {
  const AngularDensity d = make_cosine_tilt(0.5);
  // E[cos theta] = int cos rho / int rho, via the library quadrature (and
  // analytically a/2 = 0.25 for rho = 1 + a cos)
  const double mass = d.sphere_mass();
  const double mean_cos =
      sphere_integral(2, [&](const Vec& t) { return t[0] * d.evaluate(t); }) / mass;
  CHECK(mean_cos == Catch::Approx(0.25).epsilon(1e-9));

  RngStream rng(777);
  const int n = 100000;
  double sc = 0.0, sc2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double c = sample_direction(rng, d)[0];
    sc += c;
    sc2 += c * c;
  }
  const double mean = sc / n;
  const double sd = std::sqrt((sc2 / n - mean * mean) / n);
  CHECK(std::abs(mean - mean_cos) < 4.0 * sd);
}

TEST_CASE("direction sampler detects an inconsistent upper bound") {
  // acceptance probability 1e-7: the proposal cap must trip
  AngularDensity d = make_isotropic(2, 1e-7);
  d.upper_bound = 1.0;
  RngStream rng(3);
  CHECK_THROWS_AS(sample_direction(rng, d), std::runtime_error);
}

TEST_CASE("samplers are pure functions of the stream state") {
  const AngularDensity d = make_cosine_tilt(0.4);
  RngStream a(99), b(99);
  for (int i = 0; i < 100; ++i) {
    const Vec va = sample_direction(a, d);
    const Vec vb = sample_direction(b, d);
    CHECK(va[0] == vb[0]);
    CHECK(va[1] == vb[1]);
  }
}

TEST_CASE("jump intensity: closed form against quadrature") {
  const AngularDensity iso1 = make_isotropic(1);
  // d=1, rho=1, alpha=1, eps=0.01, r_max=1: lambda = 2 (100 - 1) / 1 = 198
  CHECK(jump_intensity(iso1, 1.0, 0.01, 1.0) == Catch::Approx(198.0).epsilon(1e-12));
  // quadrature oracle: int_{eps<|y|<=1} |y|^{-2} dy
  const double oracle =
      adaptive_simpson([](double r) { return 2.0 * std::pow(r, -2.0); }, 0.01, 1.0, 1e-10);
  CHECK(jump_intensity(iso1, 1.0, 0.01, 1.0) == Catch::Approx(oracle).epsilon(1e-8));

  CHECK(jump_intensity(iso1, 1.5, 0.1, std::numeric_limits<double>::infinity()) ==
        Catch::Approx(42.163702135578391).epsilon(1e-12));
  CHECK(jump_intensity(iso1, 1.5, 0.5, 0.5) == 0.0);
  CHECK_THROWS_AS(jump_intensity(iso1, 1.5, 0.5, 0.2), std::invalid_argument);
}

TEST_CASE("small jump moments: frozen value, scaling law, isotropy") {
  const AngularDensity iso1 = make_isotropic(1);
  const SmallJumpMoments m = small_jump_moments(iso1, 1.5, 0.1);
  // 2 * 0.1^{1/2} / (1/2)
  CHECK(m.covariance(0, 0) == Catch::Approx(1.2649110640673517).epsilon(1e-12));
  CHECK(m.mass_sphere == Catch::Approx(2.0));

  // covariance scales as eps^{2-alpha}
  for (double alpha : {1.0, 1.3, 1.7}) {
    const double v1 = small_jump_moments(iso1, alpha, 0.05).covariance(0, 0);
    const double v2 = small_jump_moments(iso1, alpha, 0.1).covariance(0, 0);
    CHECK(v2 / v1 == Catch::Approx(std::pow(2.0, 2.0 - alpha)).epsilon(1e-6));
  }

  // vanishing cutoff kills the covariance
  CHECK(small_jump_moments(iso1, 1.5, 1e-10).covariance(0, 0) < 1e-4);

  // isotropic rho in d=2: sigma^2 I
  const SmallJumpMoments m2 = small_jump_moments(make_isotropic(2), 1.5, 0.2);
  CHECK(std::abs(m2.covariance(0, 0) - m2.covariance(1, 1)) <= 1e-12);
  CHECK(std::abs(m2.covariance(0, 1)) <= 1e-12);
}

TEST_CASE("big jump compensator") {
  CHECK(big_jump_compensator(make_isotropic(1), 1.5)[0] == 0.0);  // symmetric: exact zero
  // two-sided 2:1, alpha=1.5: (2-1)/(alpha-1) = 2, cross-checked by quadrature
  const AngularDensity two = make_two_sided(2.0, 1.0);
  const double c = big_jump_compensator(two, 1.5)[0];
  CHECK(c == Catch::Approx(2.0).epsilon(1e-12));
  const double oracle =
      adaptive_simpson([](double r) { return (2.0 - 1.0) * std::pow(r, -1.5); }, 1.0, 1e8, 1e-10) +
      2.0 * std::pow(1e8, -0.5);  // analytic remainder of int_R^inf r^{-3/2}
  CHECK(c == Catch::Approx(oracle).epsilon(1e-6));

  // alpha = 1: only |y| <= 1 is compensated, so the big-jump term vanishes
  CHECK(big_jump_compensator(make_isotropic(1), 1.0)[0] == 0.0);
  CHECK(big_jump_compensator(two, 1.0, true)[0] == 0.0);
  CHECK_THROWS_AS(big_jump_compensator(two, 1.0, false), std::invalid_argument);
}

TEST_CASE("compensators of adjacent radial bands add up") {
  const AngularDensity two = make_two_sided(2.0, 1.0);
  const double alpha = 1.5;
  const double whole =
      compensator_between(two, alpha, 0.05, std::numeric_limits<double>::infinity())[0];
  const double low = compensator_between(two, alpha, 0.05, 1.0)[0];
  const double high = big_jump_compensator(two, alpha)[0];
  CHECK(whole == Catch::Approx(low + high).epsilon(1e-12));
}

TEST_CASE("stable index validation enforces the symmetry condition at alpha = 1") {
  StableIndex idx{1.0, false};
  CHECK_THROWS_AS(validate_index(idx, make_two_sided(2.0, 1.0)), std::invalid_argument);
  CHECK_NOTHROW(validate_index(idx, make_isotropic(1)));
  idx.truncated = true;
  CHECK_NOTHROW(validate_index(idx, make_two_sided(2.0, 1.0)));
  CHECK_THROWS_AS(validate_index({0.9, false}, make_isotropic(1)), std::invalid_argument);
  CHECK_THROWS_AS(validate_index({2.0, false}, make_isotropic(1)), std::invalid_argument);
}
