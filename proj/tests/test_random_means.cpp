#include <doctest.h>

#include <cmath>
#include <vector>

#include "wdiffuse/quad.hpp"
#include "wdiffuse/random_means.hpp"
#include "wdiffuse/rng.hpp"
#include "wdiffuse/stats.hpp"

using namespace wdiffuse;

TEST_CASE("vartheta symmetry, endpoints and normalization") {
  const double beta = 0.3;
  CHECK(random_means::vartheta(0.0, beta) == 0.0);
  CHECK(random_means::vartheta(1.0, beta) == 0.0);
  for (double x : {0.05, 0.2, 0.41}) {
    CHECK(random_means::vartheta(x, beta) ==
          doctest::Approx(random_means::vartheta(1.0 - x, beta))
              .epsilon(1e-10));
  }
  const auto r = quad::integrate_tanh_sinh(
      [&](double x) { return random_means::vartheta(x, beta, 1e-11); }, 0.0,
      1.0, 1e-9);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("vartheta envelope brackets the density") {
  const double beta = 0.5;
  random_means::VarthetaTable tab(beta);
  for (int i = 1; i < 100; ++i) {
    const double x = i / 100.0;
    const auto [lo, hi] = random_means::vartheta_envelope(x, beta);
    const double v = tab(x);
    CHECK(lo <= v * (1 + 1e-10));
    CHECK(v <= hi * (1 + 1e-10));
  }
}

TEST_CASE("table agrees with direct evaluation") {
  const double beta = 0.7;
  random_means::VarthetaTable tab(beta);
  // Interpolation error grows toward the endpoints where the density vanishes
  // like x^beta; allow a looser relative bound there.
  for (double x : {0.03, 0.2, 0.5, 0.77}) {
    CHECK(tab(x) ==
          doctest::Approx(random_means::vartheta(x, beta, 1e-12))
              .epsilon(1e-8));
  }
  for (double x : {1e-4, 0.999}) {
    CHECK(tab(x) ==
          doctest::Approx(random_means::vartheta(x, beta, 1e-12))
              .epsilon(1e-5));
  }
}

TEST_CASE("theta cdf basics and the oscillatory cross-check") {
  const double beta = 0.5;
  CHECK(random_means::theta_cdf(0.5, beta) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(random_means::theta_cdf(0.2, beta) <
        random_means::theta_cdf(0.3, beta));
  for (double x : {0.15, 0.4, 0.65}) {
    const auto osc = random_means::theta_cdf_oscillatory(x, beta);
    CHECK(std::fabs(random_means::theta_cdf(x, beta) - osc.value) <= 1e-6);
  }
}

TEST_CASE("theta approaches the identity as beta -> 0") {
  for (int i = 1; i < 20; ++i) {
    const double x = i / 20.0;
    CHECK(std::fabs(random_means::theta_cdf(x, 0.01) - x) <= 0.05);
  }
}

TEST_CASE("cdf table and rejection sampler are mutually consistent") {
  const double beta = 0.4;
  random_means::ThetaCdfTable cdf(beta);
  for (double x : {0.1, 0.37, 0.5, 0.82}) {
    CHECK(cdf.cdf(x) ==
          doctest::Approx(random_means::theta_cdf(x, beta)).epsilon(1e-6));
  }
  random_means::VarthetaTable tab(beta);
  rng::CounterRng rng(41, 0);
  std::vector<double> xs(5000);
  for (auto& x : xs) x = random_means::sample_random_mean(tab, rng);
  const auto ks = stats::ks_one_sample(xs, [&](double x) { return cdf.cdf(x); });
  CHECK(ks.pass_at_1pct());
}
