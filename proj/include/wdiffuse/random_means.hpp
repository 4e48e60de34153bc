#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "wdiffuse/quad.hpp"
#include "wdiffuse/rng.hpp"

namespace wdiffuse::random_means {

/// eta'(y) = e^beta * y^(-beta y) * (1-y)^(-beta(1-y))
///           * [cos(pi beta y) - (1/pi) sin(pi beta y) log(y/(1-y))],
/// the smooth factor of the density integrand. y in (0,1), beta in (0,1).
double eta_prime(double y, double beta);

/// [e x (1-x)]^beta, the two-sided envelope shape.
double vartheta_tilde(double x, double beta);

/// Envelope constants: lower c = cos(pi beta / 2), upper C = 4^beta (1 + beta/e).
double envelope_lower_const(double beta);
double envelope_upper_const(double beta);

/// (c*tilde, C*tilde) at x.
std::pair<double, double> vartheta_envelope(double x, double beta);

/// Density of the random mean of the Dirichlet-Ferguson process,
///   vartheta(x) = beta * int_0^x (x-y)^(beta-1) eta'(y) dy,
/// evaluated through the singularity-removing substitution. Symmetric in
/// x <-> 1-x; x > 1/2 is reflected before integrating. Exact 0 at x=0,1.
double vartheta(double x, double beta, double tol = 1e-10);

/// CDF Theta(x) = (e^beta/pi) int_0^x (x-y)^(beta-1) y^(-beta y)
///                (1-y)^(-beta(1-y)) sin(pi beta y) dy,
/// with Theta(x) = 1 - Theta(1-x) used for x > 1/2.
double theta_cdf(double x, double beta, double tol = 1e-10);

struct OscillatoryResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// The alternative representation
///   Theta(x) = 1/2 + (1/pi) int_0^inf exp(-(beta/2) A(t)) sin(beta B(t)) dt/t
/// with A(t) = int_0^1 log[1+t^2(x-y)^2] dy, B(t) = int_0^1 arctan[t(x-y)] dy
/// in closed form. The range (t_split, inf) is mapped through u = t^(-beta),
/// which turns the algebraic t^(-beta) tail into a bounded integrand, so the
/// infinite tail is integrated rather than truncated. Cross-check oracle only.
OscillatoryResult theta_cdf_oscillatory(double x, double beta,
                                        double t_split = 10.0);

/// Tabulated vartheta for one beta: psi(x) = vartheta(x) x^(-beta) is smooth
/// on [0,1/2] and is stored on a uniform grid with cubic interpolation.
/// Evaluation costs a table lookup; accuracy ~1e-9.
class VarthetaTable {
 public:
  explicit VarthetaTable(double beta, std::size_t n = 4097, double tol = 1e-11);
  double beta() const { return beta_; }
  double operator()(double x) const;

 private:
  double beta_;
  double h_;
  std::vector<double> psi_;  // psi at i*h_, i = 0..n-1, on [0, 1/2]
};

/// Exact rejection sampler for vartheta: propose from Beta(beta+1, beta+1)
/// (density proportional to [z(1-z)]^beta) and accept with probability
/// vartheta(z) / (C * vartheta_tilde(z)). Throws after 10^4 straight
/// rejections (broken envelope).
double sample_random_mean(const VarthetaTable& table, rng::CounterRng& rng);
double sample_random_mean(double beta, rng::CounterRng& rng);

/// Monotone CDF table on Chebyshev-spaced nodes with monotone cubic (PCHIP)
/// interpolation; supports inverse-CDF sampling as a faster alternative to
/// rejection.
class ThetaCdfTable {
 public:
  explicit ThetaCdfTable(double beta, std::size_t n = 4096);
  double beta() const { return beta_; }
  double cdf(double x) const;
  double inverse(double p) const;
  double sample(rng::CounterRng& rng) const { return inverse(rng.uniform()); }
  const std::vector<double>& nodes() const { return x_; }
  const std::vector<double>& values() const { return f_; }

 private:
  double beta_;
  std::vector<double> x_, f_, slope_;
};

/// The law m_1^beta: density/CDF evaluation plus samplers, beta in (0,1).
struct RandomMeansLaw {
  explicit RandomMeansLaw(double beta);
  double beta;
  VarthetaTable density;
  double pdf(double x) const { return density(x); }
  double cdf(double x) const { return theta_cdf(x, beta); }
  double sample(rng::CounterRng& rng) const {
    return sample_random_mean(density, rng);
  }
};

}  // namespace wdiffuse::random_means
