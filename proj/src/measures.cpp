#include "wdiffuse/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace wdiffuse::measures {

namespace {

struct Seg {
  double t0, t1, v0, v1;
  double at(double t) const {
    if (t1 == t0) return v0;
    const double u = (t - t0) / (t1 - t0);
    return v0 + u * (v1 - v0);
  }
};

std::vector<Seg> segments(const QuantileFn& q) {
  if (q.t.size() != q.v.size() || q.t.size() < 2)
    throw std::invalid_argument("QuantileFn: malformed polyline");
  std::vector<Seg> s;
  for (std::size_t i = 0; i + 1 < q.t.size(); ++i) {
    if (q.t[i + 1] > q.t[i])
      s.push_back({q.t[i], q.t[i + 1], q.v[i], q.v[i + 1]});
  }
  if (s.empty() || s.front().t0 != 0.0 || s.back().t1 != 1.0)
    throw std::invalid_argument("QuantileFn: must cover [0,1]");
  return s;
}

void check_sorted_unit(const std::vector<double>& xs, const char* what) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] >= 0.0 && xs[i] <= 1.0))
      throw std::invalid_argument(std::string(what) + ": entries must be in [0,1]");
    if (i > 0 && xs[i] < xs[i - 1])
      throw std::invalid_argument(std::string(what) + ": entries must be sorted");
  }
}

}  // namespace

double StepQuantile::operator()(double t) const {
  if (t >= 1.0) return 1.0;
  if (t < 0.0) throw std::domain_error("StepQuantile: t < 0");
  const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - breakpoints.begin());
  if (j == 0) throw std::invalid_argument("StepQuantile: breakpoints must start at 0");
  return values[j - 1];
}

QuantileFn to_quantile(const StepQuantile& g) {
  if (g.breakpoints.size() != g.values.size() || g.breakpoints.empty() ||
      g.breakpoints.front() != 0.0)
    throw std::invalid_argument("StepQuantile: malformed");
  QuantileFn q;
  const std::size_t n = g.breakpoints.size();
  for (std::size_t j = 0; j < n; ++j) {
    const double b0 = g.breakpoints[j];
    const double b1 = j + 1 < n ? g.breakpoints[j + 1] : 1.0;
    q.t.push_back(b0);
    q.v.push_back(g.values[j]);
    q.t.push_back(b1);
    q.v.push_back(g.values[j]);
  }
  return q;
}

QuantileFn to_quantile(const EmpiricalMeasure& mu) {
  return to_quantile(chi_inverse(mu));
}

QuantileFn to_quantile(const AtomicMeasure& mu) {
  return to_quantile(chi_inverse(mu));
}

QuantileFn to_quantile(const GridMeasure& mu) {
  const std::size_t n = mu.mass.size();
  if (n == 0) throw std::invalid_argument("GridMeasure: empty");
  double total = std::accumulate(mu.mass.begin(), mu.mass.end(), 0.0);
  if (!(total > 0.0)) throw std::invalid_argument("GridMeasure: zero mass");
  QuantileFn q;
  q.t.push_back(0.0);
  q.v.push_back(0.0);
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    acc += mu.mass[j] / total;
    q.t.push_back(std::min(acc, 1.0));
    q.v.push_back(double(j + 1) / double(n));
  }
  q.t.back() = 1.0;
  return q;
}

AtomicMeasure chi(const StepQuantile& g) {
  if (g.breakpoints.size() != g.values.size() || g.breakpoints.empty())
    throw std::invalid_argument("StepQuantile: malformed");
  AtomicMeasure mu;
  const std::size_t n = g.breakpoints.size();
  for (std::size_t j = 0; j < n; ++j) {
    const double b1 = j + 1 < n ? g.breakpoints[j + 1] : 1.0;
    const double w = b1 - g.breakpoints[j];
    if (w < 0.0) throw std::invalid_argument("StepQuantile: breakpoints not sorted");
    if (w == 0.0) continue;
    mu.atoms.push_back(g.values[j]);
    mu.weights.push_back(w);
  }
  return mu;
}

StepQuantile chi_inverse(const AtomicMeasure& mu) {
  if (mu.atoms.size() != mu.weights.size() || mu.atoms.empty())
    throw std::invalid_argument("AtomicMeasure: malformed");
  std::vector<std::size_t> idx(mu.atoms.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return mu.atoms[a] < mu.atoms[b]; });
  double total = std::accumulate(mu.weights.begin(), mu.weights.end(), 0.0);
  StepQuantile g;
  double acc = 0.0;
  for (std::size_t r : idx) {
    const double w = mu.weights[r] / total;
    if (w <= 0.0) continue;
    g.breakpoints.push_back(acc);
    g.values.push_back(mu.atoms[r]);
    acc += w;
  }
  return g;
}

StepQuantile chi_inverse(const EmpiricalMeasure& mu) {
  AtomicMeasure m;
  m.atoms = mu.atoms;
  m.weights.assign(mu.atoms.size(), 1.0 / double(mu.atoms.size()));
  return chi_inverse(m);
}

double hat_function(std::size_t i, std::size_t k, double t) {
  if (i < 1 || i > k) throw std::invalid_argument("hat_function: need 1 <= i <= k");
  if (!(t >= 0.0 && t <= 1.0))
    throw std::domain_error("hat_function: t must be in [0,1]");
  const double lo = double(i - 1) / double(k);
  const double hi = double(i) / double(k);
  if (t <= lo) return 1.0;
  if (t >= hi) return 0.0;
  return double(i) - double(k) * t;
}

std::vector<double> project_J(const QuantileFn& g, std::size_t k) {
  if (k == 0) throw std::invalid_argument("project_J: k must be >= 1");
  const auto segs = segments(g);
  std::vector<double> x(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    const double a = double(i) / double(k);
    const double b = double(i + 1) / double(k);
    double integral = 0.0;
    for (const Seg& s : segs) {
      const double lo = std::max(a, s.t0);
      const double hi = std::min(b, s.t1);
      if (hi <= lo) continue;
      integral += 0.5 * (s.at(lo) + s.at(hi)) * (hi - lo);  // exact: linear
    }
    x[i] = double(k) * integral;
  }
  return x;
}

std::vector<double> project_J(const StepQuantile& g, std::size_t k) {
  return project_J(to_quantile(g), k);
}

StepQuantile embed_iota(const std::vector<double>& x) {
  check_sorted_unit(x, "embed_iota");
  if (x.empty()) throw std::invalid_argument("embed_iota: empty");
  StepQuantile g;
  const std::size_t k = x.size();
  for (std::size_t i = 0; i < k; ++i) {
    g.breakpoints.push_back(double(i) / double(k));
    g.values.push_back(x[i]);
  }
  return g;
}

EmpiricalMeasure project_pi_P(const AtomicMeasure& mu, std::size_t k) {
  return {project_J(to_quantile(mu), k)};
}

EmpiricalMeasure project_pi_P(const EmpiricalMeasure& mu, std::size_t k) {
  return {project_J(to_quantile(mu), k)};
}

EmpiricalMeasure project_pi_P(const GridMeasure& mu, std::size_t k) {
  return {project_J(to_quantile(mu), k)};
}

double wasserstein_distance(const QuantileFn& a, const QuantileFn& b) {
  const auto sa = segments(a);
  const auto sb = segments(b);
  std::size_t ia = 0, ib = 0;
  double t = 0.0, sum = 0.0;
  while (ia < sa.size() && ib < sb.size()) {
    const double hi = std::min(sa[ia].t1, sb[ib].t1);
    if (hi > t) {
      const double mid = 0.5 * (t + hi);
      const double d0 = sa[ia].at(t) - sb[ib].at(t);
      const double dm = sa[ia].at(mid) - sb[ib].at(mid);
      const double d1 = sa[ia].at(hi) - sb[ib].at(hi);
      // Simpson is exact for the square of a linear difference.
      sum += (hi - t) * (d0 * d0 + 4.0 * dm * dm + d1 * d1) / 6.0;
      t = hi;
    }
    if (sa[ia].t1 <= t) ++ia;
    if (ib < sb.size() && sb[ib].t1 <= t) ++ib;
  }
  return std::sqrt(sum);
}

double wasserstein_distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
  return wasserstein_distance(to_quantile(a), to_quantile(b));
}

double wasserstein_distance(const AtomicMeasure& a, const AtomicMeasure& b) {
  return wasserstein_distance(to_quantile(a), to_quantile(b));
}

}  // namespace wdiffuse::measures
