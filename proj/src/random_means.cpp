#include "wdiffuse/random_means.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wdiffuse::random_means {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_beta(double beta) {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::invalid_argument("random_means: beta must be in (0,1)");
}

// exp(beta * (1 - y log y - (1-y) log(1-y))) = e^beta y^(-beta y) (1-y)^(-beta(1-y))
double entropy_factor(double y, double beta) {
  double s = 1.0;
  if (y > 0.0) s -= y * std::log(y);
  if (y < 1.0) s -= (1.0 - y) * std::log1p(-y);
  return std::exp(beta * s);
}

// eta'(y) without the domain check; safe for y == 0 (returns the limit).
double eta_prime_raw(double y, double beta) {
  if (y <= 0.0) return std::exp(beta);
  const double bracket =
      std::cos(kPi * beta * y) -
      std::sin(kPi * beta * y) * (std::log(y) - std::log1p(-y)) / kPi;
  return entropy_factor(y, beta) * bracket;
}

}  // namespace

double eta_prime(double y, double beta) {
  check_beta(beta);
  if (!(y > 0.0 && y < 1.0))
    throw std::domain_error("eta_prime: y must be in (0,1)");
  return eta_prime_raw(y, beta);
}

double vartheta_tilde(double x, double beta) {
  const double s = x * (1.0 - x);
  if (s <= 0.0) return 0.0;
  return std::exp(beta * (1.0 + std::log(s)));
}

double envelope_lower_const(double beta) { return std::cos(kPi * beta / 2.0); }

double envelope_upper_const(double beta) {
  return std::pow(4.0, beta) * (1.0 + beta / std::exp(1.0));
}

std::pair<double, double> vartheta_envelope(double x, double beta) {
  check_beta(beta);
  const double t = vartheta_tilde(x, beta);
  return {envelope_lower_const(beta) * t, envelope_upper_const(beta) * t};
}

double vartheta(double x, double beta, double tol) {
  check_beta(beta);
  if (!(x >= 0.0 && x <= 1.0))
    throw std::domain_error("vartheta: x must be in [0,1]");
  if (x == 0.0 || x == 1.0) return 0.0;
  if (x > 0.5) x = 1.0 - x;  // symmetry; avoids the log blow-up near y -> 1
  if (x < 1e-6) return vartheta_tilde(x, beta);  // property-(iv) asymptote
  auto f = [beta](double y) { return eta_prime_raw(y, beta); };
  const quad::QuadResult r = quad::integrate_left_singular(f, x, beta, tol);
  return beta * r.value;
}

double theta_cdf(double x, double beta, double tol) {
  check_beta(beta);
  if (!(x >= 0.0 && x <= 1.0))
    throw std::domain_error("theta_cdf: x must be in [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  if (x > 0.5) return 1.0 - theta_cdf(1.0 - x, beta, tol);
  auto f = [beta](double y) {
    if (y <= 0.0) return 0.0;
    return entropy_factor(y, beta) * std::sin(kPi * beta * y) / kPi;
  };
  const quad::QuadResult r = quad::integrate_left_singular(f, x, beta, tol);
  return r.value;
}

namespace {

// log(1 + (t*u)^2) without overflowing t^2.
double log1p_sq(double t, double u) {
  const double a = std::fabs(t * u);
  if (a > 1e8) return 2.0 * std::log(a) + std::log1p(1.0 / (a * a));
  return std::log1p(a * a);
}

// A(t) = int_0^1 log[1 + t^2 (x-y)^2] dy, closed form.
double inner_log(double t, double x) {
  auto F = [&](double u) {
    return u * log1p_sq(t, u) - 2.0 * u + 2.0 * std::atan(t * u) / t;
  };
  return F(x) - F(x - 1.0);
}

// B(t) = int_0^1 arctan[t (x-y)] dy, closed form.
double inner_atan(double t, double x) {
  auto F = [&](double u) {
    return u * std::atan(t * u) - log1p_sq(t, u) / (2.0 * t);
  };
  return F(x) - F(x - 1.0);
}

}  // namespace

OscillatoryResult theta_cdf_oscillatory(double x, double beta, double t_split) {
  check_beta(beta);
  if (!(x > 0.0 && x < 1.0))
    throw std::domain_error("theta_cdf_oscillatory: x must be in (0,1)");
  if (!(t_split > 0.0))
    throw std::invalid_argument("theta_cdf_oscillatory: t_split must be > 0");

  auto head = [&](double t) {
    return std::exp(-0.5 * beta * inner_log(t, x)) *
           std::sin(beta * inner_atan(t, x)) / t;
  };
  const quad::QuadResult h = quad::integrate_adaptive(head, 0.0, t_split, 1e-10);

  // Tail: u = t^(-beta) maps (t_split, inf) to (0, t_split^(-beta)) and the
  // t^(-beta)/t decay into a bounded integrand with a finite u->0 limit.
  // u->0 limit: e^beta [x^x (1-x)^(1-x)]^(-beta) sin(beta pi (x-1/2)) / beta
  const double limit_val =
      entropy_factor(x, beta) * std::sin(beta * kPi * (x - 0.5)) / beta;
  auto tail = [&](double u) {
    const double t = std::exp(-std::log(u) / beta);
    if (t > 1e280) return limit_val;
    const double damp = std::exp(-0.5 * beta * inner_log(t, x) +
                                 beta * std::log(t));
    return damp * std::sin(beta * inner_atan(t, x)) / beta;
  };
  const double u0 = std::exp(-beta * std::log(t_split));
  const quad::QuadResult q = quad::integrate_adaptive(tail, 0.0, u0, 1e-10);

  OscillatoryResult r;
  r.value = 0.5 + (h.value + q.value) / kPi;
  r.error_estimate = (h.abs_error_estimate + q.abs_error_estimate) / kPi;
  return r;
}

VarthetaTable::VarthetaTable(double beta, std::size_t n, double tol)
    : beta_(beta) {
  check_beta(beta);
  if (n < 16) throw std::invalid_argument("VarthetaTable: n too small");
  h_ = 0.5 / static_cast<double>(n - 1);
  psi_.resize(n);
  // psi(x) = vartheta(x) x^(-beta) = beta int_0^1 (1-t)^(beta-1) eta'(x t) dt,
  // smooth on [0, 1/2] with psi(0) = e^beta.
  psi_[0] = std::exp(beta);
  for (std::size_t i = 1; i < n; ++i) {
    const double x = static_cast<double>(i) * h_;
    auto f = [&](double t) { return eta_prime_raw(x * t, beta); };
    psi_[i] = beta * quad::integrate_left_singular(f, 1.0, beta, tol).value;
  }
}

double VarthetaTable::operator()(double x) const {
  if (!(x >= 0.0 && x <= 1.0))
    throw std::domain_error("VarthetaTable: x must be in [0,1]");
  if (x == 0.0 || x == 1.0) return 0.0;
  if (x > 0.5) x = 1.0 - x;
  const double pos = x / h_;
  const std::size_t n = psi_.size();
  std::size_t i = static_cast<std::size_t>(pos);
  if (i > n - 2) i = n - 2;
  double u = pos - static_cast<double>(i);
  // Catmull-Rom with one-sided stencils at the ends.
  const double p1 = psi_[i], p2 = psi_[i + 1];
  const double p0 = i > 0 ? psi_[i - 1] : 3.0 * p1 - 3.0 * p2 + psi_[i + 2];
  const double p3 = i + 2 < n ? psi_[i + 2] : 3.0 * p2 - 3.0 * p1 + psi_[i - 1];
  const double m1 = 0.5 * (p2 - p0);
  const double m2 = 0.5 * (p3 - p1);
  const double u2 = u * u, u3 = u2 * u;
  const double psi = (2.0 * u3 - 3.0 * u2 + 1.0) * p1 + (u3 - 2.0 * u2 + u) * m1 +
                     (-2.0 * u3 + 3.0 * u2) * p2 + (u3 - u2) * m2;
  return std::exp(beta_ * std::log(x)) * psi;
}

namespace {

template <class Density>
double rejection_sample(double beta, const Density& dens, rng::CounterRng& rng) {
  const double upper = envelope_upper_const(beta);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    const double z = rng.beta(beta + 1.0, beta + 1.0);
    const double u = rng.uniform();
    const double bound = upper * vartheta_tilde(z, beta);
    if (u * bound <= dens(z)) return z;
  }
  throw std::runtime_error(
      "sample_random_mean: 10^4 consecutive rejections; envelope broken");
}

}  // namespace

double sample_random_mean(const VarthetaTable& table, rng::CounterRng& rng) {
  return rejection_sample(table.beta(), [&](double z) { return table(z); }, rng);
}

double sample_random_mean(double beta, rng::CounterRng& rng) {
  check_beta(beta);
  return rejection_sample(
      beta, [&](double z) { return vartheta(z, beta, 1e-9); }, rng);
}

ThetaCdfTable::ThetaCdfTable(double beta, std::size_t n) : beta_(beta) {
  check_beta(beta);
  if (n < 16) throw std::invalid_argument("ThetaCdfTable: n too small");
  x_.resize(n);
  f_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    x_[j] = 0.5 * (1.0 - std::cos(kPi * double(j) / double(n - 1)));
    f_[j] = theta_cdf(x_[j], beta, 1e-9);
  }
  f_.front() = 0.0;
  f_.back() = 1.0;
  // Fritsch-Carlson monotone cubic slopes.
  slope_.assign(n, 0.0);
  std::vector<double> d(n - 1);
  for (std::size_t j = 0; j + 1 < n; ++j)
    d[j] = (f_[j + 1] - f_[j]) / (x_[j + 1] - x_[j]);
  slope_[0] = d[0];
  slope_[n - 1] = d[n - 2];
  for (std::size_t j = 1; j + 1 < n; ++j) {
    if (d[j - 1] * d[j] <= 0.0) {
      slope_[j] = 0.0;
    } else {
      const double w1 = 2.0 * (x_[j + 1] - x_[j]) + (x_[j] - x_[j - 1]);
      const double w2 = (x_[j + 1] - x_[j]) + 2.0 * (x_[j] - x_[j - 1]);
      slope_[j] = (w1 + w2) / (w1 / d[j - 1] + w2 / d[j]);
    }
  }
}

double ThetaCdfTable::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - x_.begin()) - 1;
  const double h = x_[j + 1] - x_[j];
  const double t = (x - x_[j]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2.0 * t3 - 3.0 * t2 + 1.0) * f_[j] +
         (t3 - 2.0 * t2 + t) * h * slope_[j] +
         (-2.0 * t3 + 3.0 * t2) * f_[j + 1] + (t3 - t2) * h * slope_[j + 1];
}

double ThetaCdfTable::inverse(double p) const {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

RandomMeansLaw::RandomMeansLaw(double b) : beta(b), density(b) {}

}  // namespace wdiffuse::random_means
