#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace wdiffuse::stats {

struct KsResult {
  double statistic = 0.0;
  double critical_5pct = 0.0;
  double critical_1pct = 0.0;
  bool pass_at_5pct() const { return statistic < critical_5pct; }
  bool pass_at_1pct() const { return statistic < critical_1pct; }
};

/// Two-sample Kolmogorov-Smirnov test. Asymptotic critical values
/// c(alpha)*sqrt((n+m)/(n*m)) with c(0.05)=1.358, c(0.01)=1.628.
/// Requires both samples to have at least 30 entries.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// One-sample KS against a cdf given as a callable.
KsResult ks_one_sample(std::vector<double> a,
                       const std::function<double(double)>& cdf);

/// Empirical CDF of `sample` (will be sorted) evaluated at x.
double ecdf(std::vector<double> sample, double x);

struct Chi2Result {
  double statistic = 0.0;
  double critical_1pct = 0.0;
  std::size_t dof = 0;
  bool pass_at_1pct() const { return statistic < critical_1pct; }
};

/// Pearson chi-squared test of observed counts against cell probabilities
/// (probabilities are renormalized to sum to one). dof = cells - 1.
Chi2Result chi2_test(const std::vector<std::size_t>& observed,
                     const std::vector<double>& expected_prob);

/// Upper quantile of chi2 with `dof` degrees of freedom
/// (Wilson-Hilferty approximation; fine for dof >= 10).
double chi2_quantile(double p, std::size_t dof);

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
};

MeanStderr mean_stderr(const std::vector<double>& xs);

/// Pearson correlation of two equal-length samples.
double correlation(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace wdiffuse::stats
