#include "wdiffuse/quad.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <vector>

namespace wdiffuse::quad {

namespace {

constexpr int kMaxDepth = 60;
constexpr int kMaxPanels = 4000;

struct Panel {
  double a, b, value, error;
  int depth;
  bool operator<(const Panel& o) const { return error < o.error; }
};

struct CountedFn {
  const Integrand& f;
  long* evals;
  double operator()(double x) const {
    ++*evals;
    const double v = f(x);
    if (std::isnan(v)) {
      throw QuadratureError("integrand returned NaN at x=" + std::to_string(x),
                            QuadResult{0.0, std::numeric_limits<double>::infinity(),
                                       *evals});
    }
    return v;
  }
};

}  // namespace

QuadResult integrate_adaptive(const Integrand& f, double a, double b, double tol) {
  if (!(a < b)) throw std::invalid_argument("integrate_adaptive: need a < b");
  if (!(tol > 0.0)) throw std::invalid_argument("integrate_adaptive: need tol > 0");

  long evals = 0;
  CountedFn cf{f, &evals};

  std::priority_queue<Panel> heap;
  double err0;
  const double v0 = detail::gk15_panel(cf, a, b, err0);
  heap.push({a, b, v0, err0, 0});
  double total_value = v0;
  double total_error = err0;
  int n_panels = 1;

  while (total_error > tol && n_panels < kMaxPanels) {
    Panel p = heap.top();
    if (p.depth >= kMaxDepth || p.error <= 0.0) break;
    heap.pop();
    const double mid = 0.5 * (p.a + p.b);
    double el, er;
    const double vl = detail::gk15_panel(cf, p.a, mid, el);
    const double vr = detail::gk15_panel(cf, mid, p.b, er);
    total_value += vl + vr - p.value;
    total_error += el + er - p.error;
    heap.push({p.a, mid, vl, el, p.depth + 1});
    heap.push({mid, p.b, vr, er, p.depth + 1});
    ++n_panels;
  }

  QuadResult r{total_value, total_error, evals};
  if (total_error > tol) {
    throw QuadratureError("integrate_adaptive: failed to reach tol=" +
                              std::to_string(tol) + " (error " +
                              std::to_string(total_error) + ")",
                          r);
  }
  return r;
}

QuadResult integrate_tanh_sinh(const Integrand& f, double a, double b, double tol,
                               double rel_tol) {
  if (!(a < b)) throw std::invalid_argument("integrate_tanh_sinh: need a < b");
  if (!(tol > 0.0)) throw std::invalid_argument("integrate_tanh_sinh: need tol > 0");

  long evals = 0;
  CountedFn cf{f, &evals};

  const double c = 0.5 * (a + b);
  const double r = 0.5 * (b - a);
  const double t_max = 6.1;  // weights are ~1e-280 here, past any power law
  constexpr double half_pi = 1.5707963267948966;

  // f mapped through x = c + r*tanh((pi/2) sinh t); returns weight*f(x).
  auto node = [&](double t) -> double {
    const double u = half_pi * std::sinh(t);
    const double s = std::tanh(u);
    const double w = half_pi * std::cosh(t) / (std::cosh(u) * std::cosh(u));
    const double x = c + r * s;
    if (x <= a || x >= b) return 0.0;  // cannot be resolved in double
    return w * cf(x);
  };

  double h = 1.0;
  double sum = node(0.0);
  for (double t = h; t <= t_max; t += h) sum += node(t) + node(-t);
  double integral = r * h * sum;
  double prev = integral;
  double err = std::numeric_limits<double>::infinity();

  for (int level = 1; level <= 12; ++level) {
    h *= 0.5;
    for (double t = h; t <= t_max; t += 2.0 * h) sum += node(t) + node(-t);
    integral = r * h * sum;
    err = std::fabs(integral - prev);
    prev = integral;
    const double bound = std::max(tol, rel_tol * std::fabs(integral));
    if (level >= 3 && err <= bound) return {integral, err, evals};
  }
  QuadResult best{integral, err, evals};
  if (err > std::max(tol, rel_tol * std::fabs(integral)))
    throw QuadratureError("integrate_tanh_sinh: failed to reach tol", best);
  return best;
}

QuadResult integrate_left_singular(const Integrand& f_smooth, double x, double p,
                                   double tol) {
  if (!(p > 0.0) || p > 1.0)
    throw std::invalid_argument("integrate_left_singular: need p in (0,1]");
  if (!(x > 0.0))
    throw std::invalid_argument("integrate_left_singular: need x > 0");
  if (p == 1.0) {
    QuadResult r = integrate_adaptive(f_smooth, 0.0, x, tol);
    return r;
  }
  const double inv_p = 1.0 / p;
  const double upper = std::pow(x, p);
  auto g = [&](double u) -> double {
    double y = x - std::exp(inv_p * std::log(u));
    if (y < 0.0) y = 0.0;
    if (y >= x) y = x;
    return f_smooth(y);
  };
  QuadResult r = integrate_adaptive(g, 0.0, upper, tol * p);
  r.value *= inv_p;
  r.abs_error_estimate *= inv_p;
  return r;
}

double log_gamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("log_gamma: need x > 0");
  return std::lgamma(x);
}

double log_beta(double a, double b) {
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

namespace {

// Continued fraction for the incomplete beta (Lentz's method).
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double eps = 3e-15;
  constexpr double fpmin = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::domain_error("incomplete_beta: need a,b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double lnfront =
      a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
  if (x < (a + 1.0) / (a + b + 2.0))
    return std::exp(lnfront) * betacf(a, b, x) / a;
  return 1.0 - std::exp(b * std::log1p(-x) + a * std::log(x) - log_beta(b, a)) *
                   betacf(b, a, 1.0 - x) / b;
}

}  // namespace wdiffuse::quad
