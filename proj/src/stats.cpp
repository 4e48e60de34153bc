#include "wdiffuse/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wdiffuse::stats {

namespace {
constexpr double kC5 = 1.358;
constexpr double kC1 = 1.628;
}  // namespace

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.size() < 30 || b.size() < 30)
    throw std::invalid_argument("ks_two_sample: need at least 30 samples each");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const std::size_t n = a.size(), m = b.size();
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < n && j < m) {
    const double x = std::min(a[i], b[j]);
    while (i < n && a[i] <= x) ++i;
    while (j < m && b[j] <= x) ++j;
    d = std::max(d, std::fabs(double(i) / n - double(j) / m));
  }
  const double scale = std::sqrt(double(n + m) / (double(n) * double(m)));
  return {d, kC5 * scale, kC1 * scale};
}

KsResult ks_one_sample(std::vector<double> a,
                       const std::function<double(double)>& cdf) {
  if (a.size() < 30)
    throw std::invalid_argument("ks_one_sample: need at least 30 samples");
  std::sort(a.begin(), a.end());
  const std::size_t n = a.size();
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = cdf(a[i]);
    d = std::max(d, std::fabs(f - double(i) / n));
    d = std::max(d, std::fabs(double(i + 1) / n - f));
  }
  const double scale = 1.0 / std::sqrt(double(n));
  return {d, kC5 * scale, kC1 * scale};
}

double ecdf(std::vector<double> sample, double x) {
  std::sort(sample.begin(), sample.end());
  const auto it = std::upper_bound(sample.begin(), sample.end(), x);
  return double(it - sample.begin()) / double(sample.size());
}

double chi2_quantile(double p, std::size_t dof) {
  // Wilson-Hilferty: chi2_p ~ dof*(1 - 2/(9 dof) + z_p sqrt(2/(9 dof)))^3
  double z;
  if (p >= 0.99)
    z = 2.3263478740408408;
  else if (p >= 0.95)
    z = 1.6448536269514722;
  else
    throw std::invalid_argument("chi2_quantile: unsupported level");
  const double d = static_cast<double>(dof);
  const double t = 1.0 - 2.0 / (9.0 * d) + z * std::sqrt(2.0 / (9.0 * d));
  return d * t * t * t;
}

Chi2Result chi2_test(const std::vector<std::size_t>& observed,
                     const std::vector<double>& expected_prob) {
  if (observed.size() != expected_prob.size() || observed.size() < 2)
    throw std::invalid_argument("chi2_test: size mismatch");
  double total_p = 0.0;
  std::size_t total_n = 0;
  for (double p : expected_prob) total_p += p;
  for (std::size_t o : observed) total_n += o;
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = double(total_n) * expected_prob[i] / total_p;
    if (e <= 0.0) throw std::invalid_argument("chi2_test: zero expected count");
    const double diff = double(observed[i]) - e;
    stat += diff * diff / e;
  }
  const std::size_t dof = observed.size() - 1;
  return {stat, chi2_quantile(0.99, dof), dof};
}

MeanStderr mean_stderr(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  if (n < 2) throw std::invalid_argument("mean_stderr: need n >= 2");
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= double(n);
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= double(n - 1);
  return {mean, std::sqrt(var / double(n)), n};
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw std::invalid_argument("correlation: size mismatch");
  const std::size_t n = a.size();
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= double(n);
  mb /= double(n);
  double sab = 0.0, sa = 0.0, sb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    sa += (a[i] - ma) * (a[i] - ma);
    sb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(sa * sb);
}

}  // namespace wdiffuse::stats
