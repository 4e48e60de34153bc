#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace wdiffuse::quad {

struct QuadResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  long evaluations = 0;
};

/// Thrown on non-convergence or on a NaN from the integrand; carries the
/// best estimate obtained so far.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, QuadResult best)
      : std::runtime_error(what), best_estimate(best) {}
  QuadResult best_estimate;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive Gauss-Kronrod 7/15 over [a,b], absolute tolerance.
/// Worst panel is bisected first; per-panel depth is capped at 60.
QuadResult integrate_adaptive(const Integrand& f, double a, double b, double tol);

/// Double-exponential (tanh-sinh) rule over (a,b). Robust against power-law
/// endpoint singularities; the integrand is never evaluated at a or b.
/// Converged when the level-to-level difference is below
/// max(tol, rel_tol*|I|).
QuadResult integrate_tanh_sinh(const Integrand& f, double a, double b, double tol,
                               double rel_tol = 0.0);

/// Computes  int_0^x (x-y)^(p-1) f_smooth(y) dy  for p in (0,1], x in (0,1],
/// after removing the endpoint singularity with the substitution u=(x-y)^p:
///   value = (1/p) int_0^{x^p} f_smooth(x - u^{1/p}) du.
QuadResult integrate_left_singular(const Integrand& f_smooth, double x, double p,
                                   double tol);

/// log Gamma(x), x > 0.
double log_gamma(double x);

/// log B(a,b) = log Gamma(a) + log Gamma(b) - log Gamma(a+b).
double log_beta(double a, double b);

/// Regularized incomplete beta function I_x(a,b), continued-fraction form.
double incomplete_beta(double a, double b, double x);

namespace detail {

// Nodes/weights of the 7-point Gauss, 15-point Kronrod pair on [-1,1].
// Column layout: abscissa, Gauss weight (0 for Kronrod-only nodes), Kronrod
// weight. Node 0 is the centre, the rest come in +/- pairs.
inline constexpr double gk15[8][3] = {
    {0.000000000000000, 0.417959183673469, 0.209482141084728},
    {0.405845151377397, 0.381830050505119, 0.190350578064785},
    {0.741531185599394, 0.279705391489277, 0.140653259715525},
    {0.949107912342759, 0.129484966168870, 0.063092092629979},
    {0.207784955007898, 0.0,               0.204432940075298},
    {0.586087235467691, 0.0,               0.169004726639267},
    {0.864864423359769, 0.0,               0.104790010322250},
    {0.991455371120813, 0.0,               0.022935322010529},
};

template <class Func>
double gk15_panel(const Func& f, double a, double b, double& err) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double y0 = f(c);
  double g7 = gk15[0][1] * y0;
  double k15 = gk15[0][2] * y0;
  for (int i = 1; i < 8; ++i) {
    const double dx = h * gk15[i][0];
    const double yi = f(c + dx) + f(c - dx);
    g7 += gk15[i][1] * yi;
    k15 += gk15[i][2] * yi;
  }
  g7 *= h;
  k15 *= h;
  err = std::fabs(k15 - g7);
  return k15;
}

}  // namespace detail

}  // namespace wdiffuse::quad
