#pragma once

#include <cstddef>
#include <vector>

#include "wdiffuse/measures.hpp"
#include "wdiffuse/random_means.hpp"
#include "wdiffuse/rng.hpp"

namespace wdiffuse::dirichlet {

/// Dirichlet(params) draw via log-space gamma sampling, so parameters far
/// below 1 (the relevant regime here) do not underflow. Throws if any
/// parameter is < 1e-12: the draw would be a deterministic vertex anyway and
/// the log-gamma sampler loses its accuracy guarantee.
std::vector<double> sample_dirichlet(const std::vector<double>& params,
                                     rng::CounterRng& rng);

/// Marginals of the Dirichlet-Ferguson process with intensity beta*Leb on the
/// uniform grid: returns y_0 = 0 <= y_1 <= ... <= y_k = 1 where the gaps are
/// Dirichlet(beta/k, ..., beta/k).
std::vector<double> sample_grid_marginals(double beta, std::size_t k,
                                          rng::CounterRng& rng);

/// Same, for an arbitrary partition 0 = t_0 < ... < t_m = 1: gap parameters
/// beta * (t_j - t_{j-1}).
std::vector<double> sample_partition_marginals(double beta,
                                               const std::vector<double>& t,
                                               rng::CounterRng& rng);

/// Finite-resolution draw from the entropic measure: the value axis is cut
/// into m uniform cells, the cell masses are Dirichlet(beta/m, ..., beta/m),
/// and the result is the step quantile with the left-point value convention
/// (value (j-1)/m on the j-th mass block; first value 0).
measures::StepQuantile sample_entropic(double beta, std::size_t m,
                                       rng::CounterRng& rng);

/// Exact sampler for the k-point invariant law rho_k: draw the grid marginals
/// y, then x_i = y_{i-1} + (y_i - y_{i-1}) z_i with z_i iid random means of
/// parameter beta/k. The output is strictly ordered.
class MkSampler {
 public:
  MkSampler(double beta, std::size_t k);
  double beta() const { return beta_; }
  std::size_t k() const { return k_; }
  std::vector<double> sample(rng::CounterRng& rng) const;

 private:
  double beta_;
  std::size_t k_;
  random_means::VarthetaTable vtab_;  // parameter beta/k
};

/// Convenience one-shot version (builds the table each call; prefer MkSampler
/// in loops).
std::vector<double> sample_mk(double beta, std::size_t k, rng::CounterRng& rng);

/// Exact sampler for the Dirichlet-type law rho_tilde_k: gaps
/// (x_1, x_2-x_1, ..., 1-x_k) ~ Dirichlet(beta/2k, beta/k, ..., beta/k, beta/2k).
std::vector<double> sample_rho_tilde(double beta, std::size_t k,
                                     rng::CounterRng& rng);

}  // namespace wdiffuse::dirichlet
