#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "wdiffuse/density.hpp"
#include "wdiffuse/sde.hpp"

using namespace wdiffuse;

TEST_CASE("explicit drift closed form and symmetry") {
  // k=1: d(x) = (beta/2 - 1)(1/x - 1/(1-x)); zero at the symmetric point.
  const auto d0 = sde::drift_explicit(0.5, 1, {{0.5}});
  CHECK(d0[0] == doctest::Approx(0.0));
  const auto d1 = sde::drift_explicit(0.5, 1, {{0.2}});
  CHECK(d1[0] == doctest::Approx((0.25 - 1.0) * (1.0 / 0.2 - 1.0 / 0.8))
                     .epsilon(1e-12));
  CHECK_THROWS((void)sde::drift_explicit(0.5, 2, {{0.3, 0.3 + 1e-15}}));
}

TEST_CASE("explicit drift equals the scaled rho-tilde gradient") {
  const double h = 1e-7;
  for (std::size_t k : {1, 2, 3}) {
    std::vector<double> c(k);
    for (std::size_t i = 0; i < k; ++i) c[i] = (double(i) + 0.7) / (k + 1.0);
    const density::SimplexPoint x{c};
    const auto d = sde::drift_explicit(0.5, k, x);
    for (std::size_t i = 0; i < k; ++i) {
      auto xp = x, xm = x;
      xp.coords[i] += h;
      xm.coords[i] -= h;
      const double fd = double(k) *
                        (density::log_rho_tilde(0.5, k, xp) -
                         density::log_rho_tilde(0.5, k, xm)) /
                        (2 * h);
      CHECK(d[i] == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("monotone drift: symmetry zero and reflection antisymmetry") {
  density::DensityModel m1(0.5, 1);
  CHECK(std::fabs(sde::drift_monotone(m1, {{0.5}}, 1e-5)[0]) < 1e-3);
  density::DensityModel m2(0.5, 2);
  const auto g = sde::drift_monotone(m2, {{0.3, 0.55}}, 1e-5);
  const auto gr = sde::drift_monotone(m2, {{0.45, 0.7}}, 1e-5);
  CHECK(g[0] == doctest::Approx(-gr[1]).epsilon(1e-3));
  CHECK(g[1] == doctest::Approx(-gr[0]).epsilon(1e-3));
}

TEST_CASE("simulation is deterministic given the config") {
  sde::SimConfig cfg;
  cfg.k = 2;
  cfg.beta = 0.5;
  cfg.drift = sde::DriftKind::explicit_;
  cfg.dt = 1e-4;
  cfg.horizon = 0.05;
  cfg.n_traj = 4;
  cfg.seed = 77;
  const auto a = sde::simulate(cfg);
  const auto b = sde::simulate(cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].states.size() == b[i].states.size());
    for (std::size_t s = 0; s < a[i].states.size(); ++s)
      CHECK(a[i].states[s].coords == b[i].states[s].coords);
  }
}

TEST_CASE("ordering preserved along explicit k=4 runs") {
  sde::SimConfig cfg;
  cfg.k = 4;
  cfg.beta = 0.5;
  cfg.drift = sde::DriftKind::explicit_;
  cfg.dt = 1e-5;
  cfg.horizon = 0.01;  // 1000 steps
  cfg.n_traj = 4;
  cfg.seed = 3;
  cfg.record_stride = 10;
  for (const auto& tr : sde::simulate(cfg)) {
    for (const auto& s : tr.states) {
      REQUIRE(s.coords.front() > 0.0);
      REQUIRE(s.coords.back() < 1.0);
      REQUIRE(std::is_sorted(s.coords.begin(), s.coords.end()));
    }
  }
}

TEST_CASE("halving triggers near the boundary") {
  sde::SimConfig cfg;
  cfg.k = 2;
  cfg.beta = 0.5;
  cfg.drift = sde::DriftKind::explicit_;
  cfg.dt = 1e-2;  // huge step: the proposal must overshoot
  cfg.horizon = 1e-2;
  cfg.n_traj = 1;
  cfg.seed = 5;
  const auto trajs = sde::simulate(cfg);
  CHECK(trajs[0].rejected_steps >= 1);
}

TEST_CASE("record stride controls the number of rows") {
  sde::SimConfig cfg;
  cfg.k = 1;
  cfg.beta = 0.5;
  cfg.drift = sde::DriftKind::explicit_;
  cfg.dt = 1e-4;
  cfg.horizon = 0.01;  // 100 steps
  cfg.n_traj = 1;
  cfg.seed = 9;
  cfg.record_stride = 10;
  const auto trajs = sde::simulate(cfg);
  CHECK(trajs[0].times.size() == 11);  // t=0 plus every 10th of 100 steps
  CHECK(trajs[0].times.back() == doctest::Approx(0.01));
}

TEST_CASE("config validation") {
  sde::SimConfig cfg;
  cfg.k = 4;
  cfg.drift = sde::DriftKind::monotone;  // needs the override for k >= 4
  CHECK_THROWS((void)sde::Simulator(cfg));
  cfg.allow_mc_monotone = true;
  cfg.k = 9;
  CHECK_THROWS((void)sde::Simulator(cfg));
}

TEST_CASE("empirical measure of a state") {
  const auto mu = sde::empirical_measure({{0.4, 0.1, 0.7}});
  REQUIRE(mu.atoms.size() == 3);
  CHECK(std::is_sorted(mu.atoms.begin(), mu.atoms.end()));
}
