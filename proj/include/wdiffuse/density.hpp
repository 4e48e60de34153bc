#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "wdiffuse/random_means.hpp"
#include "wdiffuse/rng.hpp"

namespace wdiffuse::density {

/// Point of the (closed) ordered simplex 0 < x_1 < ... < x_k < 1.
struct SimplexPoint {
  std::vector<double> coords;
  std::size_t k() const { return coords.size(); }
  /// Strict interior ordering with margin eps on every gap (incl. 0 and 1).
  bool interior(double eps = 0.0) const;
};

enum class RhoStrategy { quadrature, monte_carlo };

struct RhoResult {
  double value = 0.0;
  /// Quadrature error estimate, or Monte Carlo standard error.
  double error_estimate = 0.0;
  /// Set when an MC estimate missed its 10% relative-stderr target.
  bool warning = false;
};

class FdBoundaryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluator for the invariant density rho_k on the ordered simplex:
///   rho(x) = Gamma(beta)/Gamma(beta/k)^k *
///            int ... int prod_i vtheta((x_i-y_{i-1})/(y_i-y_{i-1}))
///                            * (y_i-y_{i-1})^(beta/k-2) dy,
/// y_0=0, y_k=1. k=1 needs no integral; k=2,3 use nested deterministic
/// quadrature; 4 <= k <= 8 use importance-sampled Monte Carlo with
/// per-point deterministic streams. Requires beta/k in (0,1).
class DensityModel {
 public:
  DensityModel(double beta, std::size_t k, std::size_t mc_budget = 200000,
               double quad_tol = 1e-7, std::uint64_t mc_seed = 0x9a2b);

  double beta() const { return beta_; }
  std::size_t k() const { return k_; }
  RhoStrategy strategy() const {
    return k_ <= 3 ? RhoStrategy::quadrature : RhoStrategy::monte_carlo;
  }
  const random_means::VarthetaTable& vtheta() const { return vtab_; }

  /// Density value; exactly 0 off the simplex.
  RhoResult rho(const SimplexPoint& x) const;

  /// log rho through a fixed composite rule (k <= 3): cheaper and smooth in
  /// x, which is what finite differencing needs. -inf off the simplex.
  double log_rho_fast(const SimplexPoint& x) const;

  /// Central finite differences of log rho, step h_i = h_rel * min adjacent
  /// gap. Throws FdBoundaryError when a step collapses below 1e-12.
  std::vector<double> log_rho_grad(const SimplexPoint& x, double h_rel) const;

 private:
  double rho_quad_k2(const SimplexPoint& x, double rel_tol, double* err) const;
  double rho_quad_k3(const SimplexPoint& x, double rel_tol, double* err) const;
  RhoResult rho_mc(const SimplexPoint& x, rng::CounterRng rng) const;
  double log_prefactor() const;

  double beta_;
  std::size_t k_;
  std::size_t mc_budget_;
  double quad_tol_;
  std::uint64_t mc_seed_;
  random_means::VarthetaTable vtab_;
};

/// Shape factor of the Prop-4.3(i) upper bound:
/// [x_1(1-x_k)]^(beta/(2k)-1) * prod_{i>=2} (x_i - x_{i-1})^(beta/k-1).
double rho_upper_shape(double beta, std::size_t k, const SimplexPoint& x);

/// log of the explicit proof constant
///   C^k * Gamma(beta)/Gamma(beta/k)^k * [Gamma(beta/2k)^2/Gamma(beta/k)]^(k-1)
///   * 2^(beta-2k),   C = sup vtheta_{beta/k} bound = (1+b/e) e^b.
double rho_upper_log_constant(double beta, std::size_t k);

/// Dirichlet-type density of the alternate projection:
/// rho_tilde = C [x_1(1-x_k)]^(beta/(2k)-1) prod (x_i-x_{i-1})^(beta/k-1),
/// C = Gamma(beta) / (Gamma(beta/2k)^2 Gamma(beta/k)^(k-1)).
double rho_tilde(double beta, std::size_t k, const SimplexPoint& x);
double log_rho_tilde(double beta, std::size_t k, const SimplexPoint& x);

struct HierarchyResult {
  double relative_error = 0.0;
  double estimate = 0.0;
  double reference = 0.0;
  double stderr_ = 0.0;
};

/// Monte Carlo check of the pairing identity
///   rho_k(x) = 2^k int rho_2k(x_1-xi_1, x_1+xi_1, ..., x_k-xi_k, x_k+xi_k) dxi.
HierarchyResult check_hierarchy(double beta, std::size_t k, const SimplexPoint& x,
                                std::size_t mc_budget, rng::CounterRng& rng);

/// Independent re-evaluation of rho_2 from the fully expanded form (explicit
/// inner z-integrals and the e^beta beta^k/[k...]^k prefactor assembly);
/// cross-check only.
double rho_expanded_form_k2(double beta, const SimplexPoint& x, double tol = 1e-9);

}  // namespace wdiffuse::density
