#include <doctest.h>

#include <cmath>
#include <vector>

#include "wdiffuse/density.hpp"
#include "wdiffuse/quad.hpp"
#include "wdiffuse/random_means.hpp"
#include "wdiffuse/rng.hpp"

using namespace wdiffuse;

TEST_CASE("k=1 density reduces to vartheta") {
  density::DensityModel m(0.5, 1);
  for (double x : {0.1, 0.33, 0.5, 0.91}) {
    CHECK(m.rho({{x}}).value ==
          doctest::Approx(random_means::vartheta(x, 0.5, 1e-11))
              .epsilon(1e-7));
  }
}

TEST_CASE("rho-tilde at k=1 is the symmetric beta density") {
  const double beta = 0.5;
  const double lb = quad::log_beta(beta / 2, beta / 2);
  for (double x : {0.05, 0.4, 0.7}) {
    const double expect =
        std::exp((beta / 2 - 1) * std::log(x * (1 - x)) - lb);
    CHECK(density::rho_tilde(beta, 1, {{x}}) ==
          doctest::Approx(expect).epsilon(1e-12));
    CHECK(density::log_rho_tilde(beta, 1, {{x}}) ==
          doctest::Approx(std::log(expect)).epsilon(1e-12));
  }
}

TEST_CASE("independent k=2 evaluations agree") {
  density::DensityModel m(0.5, 2);
  for (auto& p : std::vector<std::vector<double>>{
           {0.25, 0.6}, {0.1, 0.9}, {0.45, 0.55}, {0.02, 0.3}}) {
    const double a = m.rho({p}).value;
    const double b = density::rho_expanded_form_k2(0.5, {p}, 1e-9);
    const double c = std::exp(m.log_rho_fast({p}));
    CHECK(b == doctest::Approx(a).epsilon(1e-6));
    CHECK(c == doctest::Approx(a).epsilon(1e-5));
  }
}

TEST_CASE("k=3 quadrature and fast path agree") {
  density::DensityModel m(0.6, 3);
  for (auto& p : std::vector<std::vector<double>>{
           {0.2, 0.5, 0.8}, {0.05, 0.4, 0.95}}) {
    const double a = m.rho({p}).value;
    const double b = std::exp(m.log_rho_fast({p}));
    CHECK(b == doctest::Approx(a).epsilon(1e-3));
  }
}

TEST_CASE("reflection symmetry of the joint density") {
  density::DensityModel m(0.5, 2);
  for (auto& p : std::vector<std::vector<double>>{
           {0.2, 0.6}, {0.01, 0.5}, {1e-6, 0.3}}) {
    const density::SimplexPoint x{p};
    const density::SimplexPoint xr{{1.0 - p[1], 1.0 - p[0]}};
    CHECK(m.log_rho_fast(x) ==
          doctest::Approx(m.log_rho_fast(xr)).epsilon(1e-8));
  }
}

TEST_CASE("gradient is antisymmetric under reflection") {
  density::DensityModel m(0.5, 2);
  const density::SimplexPoint x{{0.3, 0.55}};
  const density::SimplexPoint xr{{0.45, 0.7}};
  const auto g = m.log_rho_grad(x, 1e-5);
  const auto gr = m.log_rho_grad(xr, 1e-5);
  CHECK(g[0] == doctest::Approx(-gr[1]).epsilon(1e-4));
  CHECK(g[1] == doctest::Approx(-gr[0]).epsilon(1e-4));
}

TEST_CASE("finite differences refuse to cross the boundary") {
  density::DensityModel m(0.5, 2);
  CHECK_THROWS_AS((void)m.log_rho_grad({{1e-14, 0.5}}, 1e-4),
                  density::FdBoundaryError);
}

TEST_CASE("monte carlo evaluation (k=4) is deterministic and sane") {
  density::DensityModel m(0.5, 4, 50000);
  const density::SimplexPoint x{{0.2, 0.4, 0.6, 0.8}};
  const auto r1 = m.rho(x);
  const auto r2 = m.rho(x);
  CHECK(r1.value == r2.value);
  CHECK(r1.error_estimate == r2.error_estimate);
  CHECK(r1.value > 0.0);
  CHECK(std::isfinite(r1.value));
  // The estimate should sit within a few sigma of a larger-budget run.
  density::DensityModel big(0.5, 4, 400000);
  const auto rb = big.rho(x);
  CHECK(std::fabs(r1.value - rb.value) <
        5.0 * (r1.error_estimate + rb.error_estimate) + 1e-12);
}

TEST_CASE("upper bound holds at sampled points (k=2)") {
  density::DensityModel m(0.5, 2);
  const double log_c = density::rho_upper_log_constant(0.5, 2);
  rng::CounterRng rng(21, 0);
  for (int t = 0; t < 100; ++t) {
    const double a = rng.uniform(), b = rng.uniform();
    const density::SimplexPoint x{{std::min(a, b), std::max(a, b)}};
    if (!x.interior(1e-12)) continue;
    CHECK(m.log_rho_fast(x) <=
          log_c + std::log(density::rho_upper_shape(0.5, 2, x)) + 1e-9);
  }
}

TEST_CASE("hierarchy identity at low budget") {
  rng::CounterRng rng(22, 0);
  const auto h = density::check_hierarchy(0.4, 1, {{0.5}}, 30000, rng);
  CHECK(h.relative_error <= 0.1);
  CHECK(h.reference > 0.0);
  CHECK(h.stderr_ > 0.0);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS(density::DensityModel(1.2, 1));   // beta/k not in (0,1)
  CHECK_THROWS(density::DensityModel(0.5, 9));   // k capped at 8
  CHECK_THROWS(density::DensityModel(-0.1, 2));
}
