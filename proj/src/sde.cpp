#include "wdiffuse/sde.hpp"

#include <algorithm>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <thread>

namespace wdiffuse::sde {

namespace {

void validate(const SimConfig& cfg) {
  if (cfg.k < 1) throw std::invalid_argument("SimConfig: k must be >= 1");
  if (!(cfg.beta > 0.0 && cfg.beta < 1.0))
    throw std::invalid_argument("SimConfig: beta must be in (0,1)");
  if (!(cfg.horizon > 0.0))
    throw std::invalid_argument("SimConfig: horizon must be > 0");
  if (!(cfg.effective_dt() <= cfg.horizon))
    throw std::invalid_argument("SimConfig: need dt <= horizon");
  if (cfg.record_stride < 1)
    throw std::invalid_argument("SimConfig: record_stride must be >= 1");
  if (cfg.drift == DriftKind::monotone) {
    if (!(cfg.beta / double(cfg.k) < 1.0))
      throw std::invalid_argument("SimConfig: monotone drift needs beta/k < 1");
    if (cfg.k > 8)
      throw std::invalid_argument("SimConfig: monotone drift capped at k <= 8");
    if (cfg.k > 3 && !cfg.allow_mc_monotone)
      throw std::invalid_argument(
          "SimConfig: monotone drift for k > 3 rides on a Monte Carlo density "
          "estimate; set allow_mc_monotone to accept the noise");
    if (!(cfg.fd_h_rel > 0.0 && cfg.fd_h_rel < 1.0))
      throw std::invalid_argument("SimConfig: fd_h_rel must be in (0,1)");
  }
}

}  // namespace

std::vector<double> drift_monotone(const density::DensityModel& model,
                                   const density::SimplexPoint& x,
                                   double h_rel) {
  std::vector<double> g = model.log_rho_grad(x, h_rel);
  for (double& v : g) v *= double(model.k());
  return g;
}

std::vector<double> drift_explicit(double beta, std::size_t k,
                                   const density::SimplexPoint& x) {
  if (x.k() != k) throw std::invalid_argument("drift_explicit: wrong dimension");
  const double dk = double(k);
  std::vector<double> d(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double lo = i == 0 ? 0.0 : x.coords[i - 1];
    const double hi = i + 1 == k ? 1.0 : x.coords[i + 1];
    const double gap_l = x.coords[i] - lo;
    const double gap_r = hi - x.coords[i];
    if (!(gap_l >= 1e-14 && gap_r >= 1e-14))
      throw density::FdBoundaryError("drift_explicit: gap below 1e-14");
    const double beta_lo = i == 0 ? 0.5 * beta : beta;
    const double beta_hi = i + 1 == k ? 0.5 * beta : beta;
    d[i] = (beta_lo - dk) / gap_l - (beta_hi - dk) / gap_r;
  }
  return d;
}

Simulator::Simulator(SimConfig cfg) : cfg_(cfg) {
  validate(cfg_);
  if (cfg_.drift == DriftKind::monotone) {
    model_ = std::make_shared<density::DensityModel>(cfg_.beta, cfg_.k);
    mk_ = std::make_shared<dirichlet::MkSampler>(cfg_.beta, cfg_.k);
  }
}

std::vector<double> Simulator::drift(const density::SimplexPoint& x) const {
  if (cfg_.drift == DriftKind::monotone)
    return drift_monotone(*model_, x, cfg_.fd_h_rel);
  return drift_explicit(cfg_.beta, cfg_.k, x);
}

density::SimplexPoint Simulator::initial(rng::CounterRng& rng) const {
  density::SimplexPoint x;
  if (cfg_.drift == DriftKind::monotone)
    x.coords = mk_->sample(rng);
  else
    x.coords = dirichlet::sample_rho_tilde(cfg_.beta, cfg_.k, rng);
  return x;
}

density::SimplexPoint Simulator::step(const density::SimplexPoint& x,
                                      rng::CounterRng& rng,
                                      std::size_t* rejected,
                                      double* dt_eff_out) const {
  std::vector<double> d;
  try {
    d = drift(x);
  } catch (const density::FdBoundaryError& e) {
    throw StepError(std::string("step: drift unavailable: ") + e.what());
  }
  const double noise_scale = 2.0 * double(cfg_.k);
  double dt_eff = cfg_.effective_dt();
  density::SimplexPoint y;
  y.coords.resize(cfg_.k);
  for (int attempt = 0; attempt <= 20; ++attempt) {
    const double sigma = std::sqrt(noise_scale * dt_eff);
    for (std::size_t i = 0; i < cfg_.k; ++i)
      y.coords[i] = x.coords[i] + d[i] * dt_eff + sigma * rng.normal();
    if (y.interior()) {
      if (dt_eff_out) *dt_eff_out = dt_eff;
      return y;
    }
    if (rejected) ++*rejected;
    dt_eff *= 0.5;
  }
  throw StepError("step: 20 halvings exhausted near the boundary");
}

Trajectory Simulator::run_one(std::size_t index) const {
  rng::CounterRng rng(cfg_.seed, index + 1);
  const double dt = cfg_.effective_dt();
  const auto n_steps =
      static_cast<std::size_t>(std::llround(cfg_.horizon / dt));

  Trajectory tr;
  density::SimplexPoint x = initial(rng);
  tr.times.push_back(0.0);
  tr.states.push_back(x);
  for (std::size_t s = 1; s <= n_steps; ++s) {
    double dt_eff = 0.0;
    try {
      x = step(x, rng, &tr.rejected_steps, &dt_eff);
    } catch (const StepError&) {
      // All halvings exhausted: the state is pinned against the boundary for
      // this step. Mark the trajectory, keep the state, and continue; later
      // steps may still be accepted (fresh noise each retry).
      if (!tr.degenerate) {
        tr.degenerate = true;
        tr.degenerate_time = double(s) * dt;
      }
    }
    ++tr.total_steps;
    tr.sum_dt_eff += dt_eff;
    if (s % cfg_.record_stride == 0) {
      tr.times.push_back(double(s) * dt);
      tr.states.push_back(x);
    }
  }
  return tr;
}

std::vector<Trajectory> Simulator::run() const {
  std::vector<Trajectory> out(cfg_.n_traj);
  const unsigned workers =
      std::min<unsigned>(thread_budget(),
                         static_cast<unsigned>(std::max<std::size_t>(cfg_.n_traj, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < cfg_.n_traj; ++i) out[i] = run_one(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cfg_.n_traj || failed.load()) return;
      try {
        out[i] = run_one(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failed.load()) std::rethrow_exception(error);
  return out;
}

std::vector<Trajectory> simulate(const SimConfig& cfg) {
  return Simulator(cfg).run();
}

measures::EmpiricalMeasure empirical_measure(const density::SimplexPoint& x) {
  if (x.coords.empty())
    throw std::invalid_argument("empirical_measure: empty state");
  measures::EmpiricalMeasure mu{x.coords};
  std::sort(mu.atoms.begin(), mu.atoms.end());
  return mu;
}

unsigned thread_budget() {
  if (const char* env = std::getenv("WDIFFUSE_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

}  // namespace wdiffuse::sde
