#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "wdiffuse/density.hpp"
#include "wdiffuse/dirichlet.hpp"
#include "wdiffuse/measures.hpp"
#include "wdiffuse/rng.hpp"

namespace wdiffuse::sde {

enum class DriftKind { monotone, explicit_ };

struct SimConfig {
  std::size_t k = 1;
  double beta = 0.5;
  DriftKind drift = DriftKind::explicit_;
  /// <= 0 picks the default 1e-5 / k.
  double dt = 0.0;
  double horizon = 1.0;
  std::size_t n_traj = 1;
  std::uint64_t seed = 0;
  std::size_t record_stride = 1;
  /// Relative finite-difference step for the monotone drift.
  double fd_h_rel = 1e-4;
  /// Monotone drift for k in 4..8 runs on a Monte Carlo density estimate and
  /// is noise-dominated; it must be opted into.
  bool allow_mc_monotone = false;

  double effective_dt() const { return dt > 0.0 ? dt : 1e-5 / double(k); }
};

struct Trajectory {
  std::vector<double> times;
  std::vector<density::SimplexPoint> states;
  std::size_t rejected_steps = 0;
  std::size_t total_steps = 0;
  double sum_dt_eff = 0.0;
  /// Set when a step exhausted its halvings; times/states stop there.
  bool degenerate = false;
  double degenerate_time = 0.0;

  double acceptance_fraction() const {
    const std::size_t n = total_steps + rejected_steps;
    return n == 0 ? 1.0 : double(total_steps) / double(n);
  }
};

class StepError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// k * finite-difference gradient of log rho_k.
std::vector<double> drift_monotone(const density::DensityModel& model,
                                   const density::SimplexPoint& x, double h_rel);

/// The singular-gap drift of the alternate system, written so that it equals
/// k * grad log rho_tilde (which is what keeps rho_tilde invariant):
///   component i = (beta_{i-1}-k)/(x_i-x_{i-1}) - (beta_i-k)/(x_{i+1}-x_i),
/// x_0 = 0, x_{k+1} = 1, beta_0 = beta_k = beta/2, beta_i = beta otherwise.
/// Any gap < 1e-14 is a boundary error.
std::vector<double> drift_explicit(double beta, std::size_t k,
                                   const density::SimplexPoint& x);

/// One run descriptor bound to its (possibly expensive) density model.
class Simulator {
 public:
  explicit Simulator(SimConfig cfg);

  const SimConfig& config() const { return cfg_; }

  std::vector<double> drift(const density::SimplexPoint& x) const;

  /// Draw from the exact invariant law of the configured system.
  density::SimplexPoint initial(rng::CounterRng& rng) const;

  /// One Euler-Maruyama step: proposal x + drift*dt_eff + sqrt(2k dt_eff)*xi.
  /// A proposal that leaves the open simplex halves dt_eff and redraws the
  /// noise, up to 20 times; each halving counts into *rejected. Throws
  /// StepError when the halvings are exhausted or the drift is unavailable.
  density::SimplexPoint step(const density::SimplexPoint& x,
                             rng::CounterRng& rng, std::size_t* rejected,
                             double* dt_eff_out = nullptr) const;

  /// n_traj independent trajectories from invariant starts, streams derived
  /// from (seed, trajectory index), trajectory-parallel (WDIFFUSE_THREADS
  /// caps the worker count). Deterministic given the config.
  std::vector<Trajectory> run() const;

 private:
  SimConfig cfg_;
  std::shared_ptr<const density::DensityModel> model_;  // monotone only
  std::shared_ptr<const dirichlet::MkSampler> mk_;      // monotone only
  Trajectory run_one(std::size_t index) const;
};

/// Convenience wrapper: Simulator(config).run().
std::vector<Trajectory> simulate(const SimConfig& cfg);

/// mu = (1/k) sum delta_{x_i}.
measures::EmpiricalMeasure empirical_measure(const density::SimplexPoint& x);

/// Worker-thread cap: WDIFFUSE_THREADS if set and positive, else hardware
/// concurrency, else 1.
unsigned thread_budget();

}  // namespace wdiffuse::sde
