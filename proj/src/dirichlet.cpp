#include "wdiffuse/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wdiffuse::dirichlet {

namespace {

void check_beta(double beta) {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::invalid_argument("dirichlet: beta must be in (0,1)");
}

// Tiny Dirichlet weights can round a cumulative sum onto a neighbour or onto
// an endpoint (P ~ eps^{a} per draw for shape a < 1). Nudge such draws by the
// minimal representable amount so the output stays strictly ordered in (0,1).
void enforce_strict_interior(std::vector<double>& x) {
  double hi = 1.0;
  for (std::size_t i = x.size(); i-- > 0;) {
    hi = std::nextafter(hi, 0.0);
    if (x[i] >= hi)
      x[i] = hi;
    else
      hi = x[i];
  }
  double lo = 0.0;
  for (double& xi : x) {
    lo = std::nextafter(lo, 1.0);
    if (xi <= lo)
      xi = lo;
    else
      lo = xi;
  }
}

}  // namespace

std::vector<double> sample_dirichlet(const std::vector<double>& params,
                                     rng::CounterRng& rng) {
  if (params.size() < 2)
    throw std::invalid_argument("sample_dirichlet: need >= 2 components");
  const std::size_t n = params.size();
  std::vector<double> lg(n);
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (!(params[i] >= 1e-12))
      throw std::invalid_argument("sample_dirichlet: parameter below 1e-12");
    lg[i] = rng.log_gamma_sample(params[i]);
    m = std::max(m, lg[i]);
  }
  double sum = 0.0;
  for (double v : lg) sum += std::exp(v - m);
  const double log_total = m + std::log(sum);
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = std::exp(lg[i] - log_total);
  return w;
}

std::vector<double> sample_grid_marginals(double beta, std::size_t k,
                                          rng::CounterRng& rng) {
  check_beta(beta);
  if (k < 1) throw std::invalid_argument("sample_grid_marginals: k must be >= 1");
  std::vector<double> y(k + 1);
  y[0] = 0.0;
  y[k] = 1.0;
  if (k == 1) return y;
  const std::vector<double> w =
      sample_dirichlet(std::vector<double>(k, beta / double(k)), rng);
  double acc = 0.0;
  for (std::size_t i = 1; i < k; ++i) {
    acc += w[i - 1];
    y[i] = std::min(acc, 1.0);
  }
  return y;
}

std::vector<double> sample_partition_marginals(double beta,
                                               const std::vector<double>& t,
                                               rng::CounterRng& rng) {
  check_beta(beta);
  if (t.size() < 2 || t.front() != 0.0 || t.back() != 1.0)
    throw std::invalid_argument(
        "sample_partition_marginals: partition must run from 0 to 1");
  std::vector<double> params;
  for (std::size_t j = 1; j < t.size(); ++j) {
    if (!(t[j] > t[j - 1]))
      throw std::invalid_argument(
          "sample_partition_marginals: partition must be strictly increasing");
    params.push_back(beta * (t[j] - t[j - 1]));
  }
  const std::vector<double> w = sample_dirichlet(params, rng);
  std::vector<double> y(t.size());
  y.front() = 0.0;
  y.back() = 1.0;
  double acc = 0.0;
  for (std::size_t j = 1; j + 1 < t.size(); ++j) {
    acc += w[j - 1];
    y[j] = std::min(acc, 1.0);
  }
  return y;
}

measures::StepQuantile sample_entropic(double beta, std::size_t m,
                                       rng::CounterRng& rng) {
  check_beta(beta);
  if (m < 2) throw std::invalid_argument("sample_entropic: need m >= 2");
  const std::vector<double> w =
      sample_dirichlet(std::vector<double>(m, beta / double(m)), rng);
  measures::StepQuantile g;
  double acc = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    g.breakpoints.push_back(std::min(acc, 1.0));
    g.values.push_back(double(j) / double(m));
    acc += w[j];
  }
  return g;
}

MkSampler::MkSampler(double beta, std::size_t k)
    : beta_(beta), k_(k), vtab_((check_beta(beta), beta / double(k))) {
  if (k < 1 || !(beta / double(k) < 1.0))
    throw std::invalid_argument("MkSampler: need k >= 1, beta/k in (0,1)");
}

std::vector<double> MkSampler::sample(rng::CounterRng& rng) const {
  const std::vector<double> y = sample_grid_marginals(beta_, k_, rng);
  std::vector<double> x(k_);
  for (std::size_t i = 0; i < k_; ++i) {
    const double z = random_means::sample_random_mean(vtab_, rng);
    x[i] = y[i] + (y[i + 1] - y[i]) * z;
  }
  enforce_strict_interior(x);
  return x;
}

std::vector<double> sample_mk(double beta, std::size_t k, rng::CounterRng& rng) {
  return MkSampler(beta, k).sample(rng);
}

std::vector<double> sample_rho_tilde(double beta, std::size_t k,
                                     rng::CounterRng& rng) {
  check_beta(beta);
  if (k < 1) throw std::invalid_argument("sample_rho_tilde: k must be >= 1");
  std::vector<double> params(k + 1, beta / double(k));
  params.front() = params.back() = beta / (2.0 * double(k));
  const std::vector<double> w = sample_dirichlet(params, rng);
  std::vector<double> x(k);
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    acc += w[i];
    x[i] = std::min(acc, 1.0);
  }
  enforce_strict_interior(x);
  return x;
}

}  // namespace wdiffuse::dirichlet
