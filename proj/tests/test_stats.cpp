#include <doctest.h>

#include <cmath>
#include <vector>

#include "wdiffuse/rng.hpp"
#include "wdiffuse/stats.hpp"

using namespace wdiffuse;

namespace {
std::vector<double> uniforms(std::uint64_t stream, std::size_t n) {
  rng::CounterRng r(99, stream);
  std::vector<double> xs(n);
  for (auto& x : xs) x = r.uniform();
  return xs;
}
}  // namespace

TEST_CASE("two-sample KS accepts equal laws and rejects shifts") {
  auto a = uniforms(1, 10000);
  auto b = uniforms(2, 10000);
  CHECK(stats::ks_two_sample(a, b).pass_at_1pct());
  for (auto& x : b) x = std::min(1.0, x + 0.05);
  CHECK_FALSE(stats::ks_two_sample(a, b).pass_at_1pct());
}

TEST_CASE("one-sample KS power: uniform vs square law") {
  auto a = uniforms(3, 10000);
  CHECK(stats::ks_one_sample(a, [](double x) { return x; }).pass_at_1pct());
  CHECK_FALSE(
      stats::ks_one_sample(a, [](double x) { return x * x; }).pass_at_1pct());
}

TEST_CASE("chi-squared test on a fair and a loaded die") {
  rng::CounterRng r(100, 0);
  std::vector<std::size_t> counts(6, 0);
  const std::vector<double> fair(6, 1.0 / 6.0);
  for (int i = 0; i < 60000; ++i)
    ++counts[std::size_t(r.uniform() * 6.0) % 6];
  CHECK(stats::chi2_test(counts, fair).pass_at_1pct());
  counts[0] += 600;  // load one face by 1% of the draws
  CHECK_FALSE(stats::chi2_test(counts, fair).pass_at_1pct());
}

TEST_CASE("chi-squared quantile approximation") {
  // Reference values: 0.99 quantiles of chi2 with 1 and 10 dof.
  CHECK(stats::chi2_quantile(0.99, 1) == doctest::Approx(6.635).epsilon(0.03));
  CHECK(stats::chi2_quantile(0.99, 10) == doctest::Approx(23.21).epsilon(0.01));
}

TEST_CASE("mean, stderr and correlation") {
  const std::vector<double> c{2.0, 2.0, 2.0, 2.0};
  const auto ms = stats::mean_stderr(c);
  CHECK(ms.mean == doctest::Approx(2.0));
  CHECK(ms.stderr_ == doctest::Approx(0.0));

  auto a = uniforms(4, 5000);
  CHECK(stats::correlation(a, a) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::fabs(stats::correlation(a, uniforms(5, 5000))) < 0.05);
}

TEST_CASE("ecdf evaluation") {
  const std::vector<double> s{0.1, 0.2, 0.3, 0.4};
  CHECK(stats::ecdf(s, 0.25) == doctest::Approx(0.5));
  CHECK(stats::ecdf(s, 0.0) == doctest::Approx(0.0));
  CHECK(stats::ecdf(s, 1.0) == doctest::Approx(1.0));
}
