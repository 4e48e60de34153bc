#include "wdiffuse/density.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "wdiffuse/quad.hpp"

namespace wdiffuse::density {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double clamp01(double z) { return std::min(1.0, std::max(0.0, z)); }

void check_params(double beta, std::size_t k) {
  if (k < 1 || k > 8)
    throw std::invalid_argument("DensityModel: k must be in 1..8");
  const double b = beta / static_cast<double>(k);
  if (!(b > 0.0 && b < 1.0))
    throw std::invalid_argument("DensityModel: beta/k must be in (0,1)");
}

std::uint64_t hash_coords(const std::vector<double>& xs) {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a over raw doubles
  for (double x : xs) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof(bits));
    for (int s = 0; s < 64; s += 8) {
      h ^= (bits >> s) & 0xff;
      h *= 1099511628211ull;
    }
  }
  return h;
}

// Panel depth needed to resolve a boundary layer of absolute width `scale`
// inside an interval of length `len`: grade until the first panel sits well
// below scale/len. Capped at 2^-48; deeper layers contribute below the rule's
// own accuracy.
int graded_depth(double scale, double len) {
  const double frac = scale / len;
  int p = 10;
  while (p < 48 && std::ldexp(1.0, -(p - 8)) > frac) p += 2;
  return p;
}

// Composite GK15 on (a,b) over panels graded geometrically toward both ends
// (factor-4 steps down to 2^-p_left / 2^-p_right of the interval). The depths
// vary with the evaluation point, but the induced discontinuities are of the
// size of the discarded tail panels (~1e-12 relative), far below what finite
// differencing of the result can see.
template <class Func>
double composite_gk15(const Func& f, double a, double b, int p_left,
                      int p_right) {
  const double len = b - a;
  double sum = 0.0, err;
  double lo = 0.0;
  for (int p = p_left; p >= 2; p -= 2) {
    const double hi = std::ldexp(1.0, -p);
    sum += quad::detail::gk15_panel(f, a + len * lo, a + len * hi, err);
    lo = hi;
  }
  sum += quad::detail::gk15_panel(f, a + len * lo, a + len * 0.5, err);
  double hi = 0.0;
  for (int p = p_right; p >= 2; p -= 2) {
    const double lo2 = std::ldexp(1.0, -p);
    sum += quad::detail::gk15_panel(f, b - len * lo2, b - len * hi, err);
    hi = lo2;
  }
  sum += quad::detail::gk15_panel(f, b - len * 0.5, b - len * hi, err);
  return sum;
}

}  // namespace

bool SimplexPoint::interior(double eps) const {
  if (coords.empty()) return false;
  double prev = 0.0;
  for (double c : coords) {
    if (!(c - prev > eps)) return false;
    prev = c;
  }
  return 1.0 - prev > eps;
}

DensityModel::DensityModel(double beta, std::size_t k, std::size_t mc_budget,
                           double quad_tol, std::uint64_t mc_seed)
    : beta_(beta),
      k_(k),
      mc_budget_(mc_budget),
      quad_tol_(quad_tol),
      mc_seed_(mc_seed),
      vtab_((check_params(beta, k), beta / static_cast<double>(k))) {}

double DensityModel::log_prefactor() const {
  const double b = beta_ / static_cast<double>(k_);
  return quad::log_gamma(beta_) - static_cast<double>(k_) * quad::log_gamma(b);
}

RhoResult DensityModel::rho(const SimplexPoint& x) const {
  if (x.k() != k_) throw std::invalid_argument("rho: wrong dimension");
  if (!x.interior()) return {0.0, 0.0, false};
  switch (k_) {
    case 1:
      return {random_means::vartheta(x.coords[0], beta_, quad_tol_ * 1e-2),
              quad_tol_, false};
    case 2: {
      double err;
      const double v = rho_quad_k2(x, quad_tol_, &err);
      return {v, err, false};
    }
    case 3: {
      // The nested rule cannot certify much below 1e-6 relative.
      double err;
      const double v = rho_quad_k3(x, std::max(quad_tol_, 1e-6), &err);
      return {v, err, false};
    }
    default:
      return rho_mc(x, rng::CounterRng(mc_seed_, hash_coords(x.coords)));
  }
}

double DensityModel::rho_quad_k2(const SimplexPoint& x, double rel_tol,
                                 double* err) const {
  const double b = 0.5 * beta_;
  const double x1 = x.coords[0], x2 = x.coords[1];
  // The integrand is supported on y in (x1, x2): outside, one of the vartheta
  // arguments leaves [0,1].
  auto f = [&](double y) {
    return vtab_(clamp01(x1 / y)) * std::pow(y, b - 2.0) *
           vtab_(clamp01((x2 - y) / (1.0 - y))) * std::pow(1.0 - y, b - 2.0);
  };
  const quad::QuadResult r =
      quad::integrate_tanh_sinh(f, x1, x2, 1e-280, rel_tol);
  const double pref = std::exp(log_prefactor());
  if (err) *err = pref * r.abs_error_estimate;
  return pref * r.value;
}

// For k=3 the naive inner integrand blows up like (y2-y1)^(b-2) in the
// corner y1, y2 -> x2 (outer quadrature nodes get within 1e-150 of x2).
// Writing s = (x2-y1)/(y2-y1) and pulling the constant (x2-y1)^(b-2) out of
// the inner integral leaves s^(2-b) vtab(s), which is bounded by 1.
double DensityModel::rho_quad_k3(const SimplexPoint& x, double rel_tol,
                                 double* err) const {
  const double b = beta_ / 3.0;
  const double x1 = x.coords[0], x2 = x.coords[1], x3 = x.coords[2];
  // The inner integrand is a cut-off power spike spanning scales from x2-y1
  // (which outer nodes push to ~1e-150) up to x3-x2; integrating in
  // v = log(y2-y1) turns it into a plain exponential decay.
  auto inner = [&](double y1) {
    const double delta = x2 - y1;
    auto g = [&](double v) {
      const double d = std::exp(v);  // y2 - y1
      const double y2 = y1 + d;
      if (!(y2 < x3)) return 0.0;
      const double s = clamp01(delta / d);
      return std::pow(s, 2.0 - b) * vtab_(s) *
             vtab_(clamp01((x3 - y2) / (1.0 - y2))) *
             std::pow(1.0 - y2, b - 2.0) * d;
    };
    return quad::integrate_tanh_sinh(g, std::log(delta), std::log(x3 - y1),
                                     1e-280, rel_tol * 0.1)
        .value;
  };
  auto f = [&](double y1) {
    if (y1 >= x2) return 0.0;
    return vtab_(clamp01(x1 / y1)) * std::pow(y1, b - 2.0) *
           std::pow(x2 - y1, b - 2.0) * inner(y1);
  };
  const quad::QuadResult r =
      quad::integrate_tanh_sinh(f, x1, x2, 1e-280, rel_tol);
  const double pref = std::exp(log_prefactor());
  if (err) *err = pref * r.abs_error_estimate;
  return pref * r.value;
}

RhoResult DensityModel::rho_mc(const SimplexPoint& x, rng::CounterRng rng) const {
  const std::size_t k = k_;
  const double b = beta_ / static_cast<double>(k);
  const double log_bprop = quad::log_beta(b + 1.0, b + 1.0);
  const std::size_t n = mc_budget_;

  // Importance sampling over y_i in (x_i, x_{i+1}), i = 1..k-1. The integrand
  // vanishes like dist^b at both faces of each interval, so a scaled
  // Beta(b+1, b+1) proposal matches the shape.
  std::vector<double> y(k + 1), lw(n, kNegInf);
  y[0] = 0.0;
  y[k] = 1.0;
  double m = kNegInf;
  for (std::size_t s = 0; s < n; ++s) {
    double log_prop = 0.0;
    for (std::size_t i = 1; i < k; ++i) {
      const double gap = x.coords[i] - x.coords[i - 1];
      const double u = rng.beta(b + 1.0, b + 1.0);
      y[i] = x.coords[i - 1] + gap * u;
      log_prop += b * (std::log(u) + std::log1p(-u)) - log_bprop - std::log(gap);
    }
    double logq = 0.0;
    for (std::size_t i = 1; i <= k; ++i) {
      const double cell = y[i] - y[i - 1];
      const double v = vtab_(clamp01((x.coords[i - 1] - y[i - 1]) / cell));
      if (!(v > 0.0)) {
        logq = kNegInf;
        break;
      }
      logq += std::log(v) + (b - 2.0) * std::log(cell);
    }
    lw[s] = logq - log_prop;
    m = std::max(m, lw[s]);
  }
  if (m == kNegInf) return {0.0, 0.0, true};

  double s1 = 0.0, s2 = 0.0;
  for (double w : lw) {
    const double e = std::exp(w - m);
    s1 += e;
    s2 += e * e;
  }
  const double dn = static_cast<double>(n);
  const double mean = s1 / dn;
  const double var = std::max(0.0, s2 / dn - mean * mean);
  const double scale = std::exp(log_prefactor() + m);
  RhoResult r;
  r.value = scale * mean;
  r.error_estimate = scale * std::sqrt(var / dn);
  r.warning = !(r.error_estimate <= 0.1 * r.value);
  return r;
}

double DensityModel::log_rho_fast(const SimplexPoint& x) const {
  if (x.k() != k_) throw std::invalid_argument("log_rho_fast: wrong dimension");
  if (!x.interior()) return kNegInf;
  switch (k_) {
    case 1:
      return std::log(vtab_(x.coords[0]));
    case 2: {
      const double b = 0.5 * beta_;
      const double x1 = x.coords[0], x2 = x.coords[1];
      // vtab(x1/y) varies on the scale y - x1 ~ x1; the right factor on the
      // scale x2 - y ~ 1 - x2.
      const double gap = x2 - x1;
      const int pl = graded_depth(x1, gap);
      const int pr = graded_depth(1.0 - x2, gap);
      auto f = [&](double y) {
        return vtab_(clamp01(x1 / y)) * std::pow(y, b - 2.0) *
               vtab_(clamp01((x2 - y) / (1.0 - y))) *
               std::pow(1.0 - y, b - 2.0);
      };
      return log_prefactor() + std::log(composite_gk15(f, x1, x2, pl, pr));
    }
    case 3: {
      // Same corner-safe factorization as rho_quad_k3.
      const double b = beta_ / 3.0;
      const double x1 = x.coords[0], x2 = x.coords[1], x3 = x.coords[2];
      const int qr = graded_depth(1.0 - x3, x3 - x2);
      auto f = [&](double y1) {
        if (y1 >= x2) return 0.0;
        const int ql = graded_depth(x2 - y1, x3 - x2);
        auto g = [&](double y2) {
          if (y2 <= y1) return 0.0;
          const double s = clamp01((x2 - y1) / (y2 - y1));
          return std::pow(s, 2.0 - b) * vtab_(s) *
                 vtab_(clamp01((x3 - y2) / (1.0 - y2))) *
                 std::pow(1.0 - y2, b - 2.0);
        };
        return vtab_(clamp01(x1 / y1)) * std::pow(y1, b - 2.0) *
               std::pow(x2 - y1, b - 2.0) * composite_gk15(g, x2, x3, ql, qr);
      };
      const int pl = graded_depth(x1, x2 - x1);
      return log_prefactor() + std::log(composite_gk15(f, x1, x2, pl, 48));
    }
    default: {
      // Fixed stream independent of x: common random numbers, so finite
      // differences of this function see correlated noise that cancels.
      const RhoResult r = rho_mc(x, rng::CounterRng(mc_seed_, 1));
      return r.value > 0.0 ? std::log(r.value) : kNegInf;
    }
  }
}

std::vector<double> DensityModel::log_rho_grad(const SimplexPoint& x,
                                               double h_rel) const {
  if (x.k() != k_) throw std::invalid_argument("log_rho_grad: wrong dimension");
  if (!(h_rel > 0.0 && h_rel < 1.0))
    throw std::invalid_argument("log_rho_grad: need h_rel in (0,1)");
  std::vector<double> grad(k_);
  SimplexPoint xp = x, xm = x;
  for (std::size_t i = 0; i < k_; ++i) {
    const double lo = i == 0 ? 0.0 : x.coords[i - 1];
    const double hi = i + 1 == k_ ? 1.0 : x.coords[i + 1];
    const double h = h_rel * std::min(x.coords[i] - lo, hi - x.coords[i]);
    if (!(h > 1e-12))
      throw FdBoundaryError("log_rho_grad: finite-difference step collapsed "
                            "against a simplex face");
    xp.coords[i] = x.coords[i] + h;
    xm.coords[i] = x.coords[i] - h;
    const double fp = log_rho_fast(xp);
    const double fm = log_rho_fast(xm);
    xp.coords[i] = x.coords[i];
    xm.coords[i] = x.coords[i];
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw FdBoundaryError("log_rho_grad: stencil point left the simplex");
    grad[i] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

double rho_upper_shape(double beta, std::size_t k, const SimplexPoint& x) {
  check_params(beta, k);
  if (x.k() != k) throw std::invalid_argument("rho_upper_shape: wrong dimension");
  if (!x.interior()) return 0.0;
  const double b = beta / static_cast<double>(k);
  double lg = (0.5 * b - 1.0) *
              (std::log(x.coords[0]) + std::log1p(-x.coords[k - 1]));
  for (std::size_t i = 1; i < k; ++i)
    lg += (b - 1.0) * std::log(x.coords[i] - x.coords[i - 1]);
  return std::exp(lg);
}

double rho_upper_log_constant(double beta, std::size_t k) {
  check_params(beta, k);
  const double dk = static_cast<double>(k);
  const double b = beta / dk;
  const double log_csup = std::log1p(b / std::exp(1.0)) + b;
  return dk * log_csup + quad::log_gamma(beta) - dk * quad::log_gamma(b) +
         (dk - 1.0) * (2.0 * quad::log_gamma(0.5 * b) - quad::log_gamma(b)) +
         (beta - 2.0 * dk) * std::log(2.0);
}

double log_rho_tilde(double beta, std::size_t k, const SimplexPoint& x) {
  check_params(beta, k);
  if (x.k() != k) throw std::invalid_argument("rho_tilde: wrong dimension");
  if (!x.interior()) return kNegInf;
  const double dk = static_cast<double>(k);
  const double b = beta / dk;
  const double log_c = quad::log_gamma(beta) - 2.0 * quad::log_gamma(0.5 * b) -
                       (dk - 1.0) * quad::log_gamma(b);
  double lg = log_c + (0.5 * b - 1.0) * (std::log(x.coords[0]) +
                                         std::log1p(-x.coords[k - 1]));
  for (std::size_t i = 1; i < k; ++i)
    lg += (b - 1.0) * std::log(x.coords[i] - x.coords[i - 1]);
  return lg;
}

double rho_tilde(double beta, std::size_t k, const SimplexPoint& x) {
  const double lg = log_rho_tilde(beta, k, x);
  return std::isfinite(lg) ? std::exp(lg) : 0.0;
}

HierarchyResult check_hierarchy(double beta, std::size_t k, const SimplexPoint& x,
                                std::size_t mc_budget, rng::CounterRng& rng) {
  check_params(beta, k);
  if (2 * k > 8)
    throw std::invalid_argument("check_hierarchy: need 2k <= 8");
  if (!x.interior())
    throw std::invalid_argument("check_hierarchy: x must be interior");

  DensityModel ref(beta, k);
  // The doubled model sits inside the Monte Carlo loop; when it is itself
  // Monte Carlo (2k >= 4), keep its per-call budget small — the outer average
  // stays unbiased and the extra noise shows up honestly in the stderr.
  const std::size_t inner_budget = 2 * k <= 3 ? 0 : 500;
  DensityModel big(beta, 2 * k, std::max<std::size_t>(inner_budget, 1));

  const double reference = ref.rho(x).value;
  const double a = beta / (2.0 * static_cast<double>(k));

  // Proposal for the half-offsets xi_i: the integrand behaves like
  // xi_i^(a-1) near xi_i = 0 (the doubled pair closes a gap of width 2 xi_i).
  // For k = 1 the upper end xi -> min(x, 1-x) drives a coordinate into a
  // boundary with exponent a/2 - 1, so a Beta(a, a/2) proposal covers both.
  // For k >= 2 use Beta(a, 1) on a box that strictly contains the support;
  // ordering violations get weight zero through rho_2k = 0.
  std::vector<double> m(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double lo = i == 0 ? 0.0 : x.coords[i - 1];
    const double hi = i + 1 == k ? 1.0 : x.coords[i + 1];
    m[i] = std::min(x.coords[i] - lo, hi - x.coords[i]);
  }
  const double shape2 = k == 1 ? 0.5 * a : 1.0;
  const double log_bprop = quad::log_beta(a, shape2);

  std::vector<double> lw(mc_budget, kNegInf);
  SimplexPoint z;
  z.coords.resize(2 * k);
  double mx = kNegInf;
  for (std::size_t s = 0; s < mc_budget; ++s) {
    double log_prop = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double u = rng.beta(a, shape2);
      const double xi = m[i] * u;
      z.coords[2 * i] = x.coords[i] - xi;
      z.coords[2 * i + 1] = x.coords[i] + xi;
      log_prop += (a - 1.0) * std::log(u) + (shape2 - 1.0) * std::log1p(-u) -
                  log_bprop - std::log(m[i]);
    }
    const double lr = big.log_rho_fast(z);
    if (lr == kNegInf) continue;
    lw[s] = static_cast<double>(k) * std::log(2.0) + lr - log_prop;
    mx = std::max(mx, lw[s]);
  }

  HierarchyResult out;
  out.reference = reference;
  if (mx == kNegInf) {
    out.relative_error = 1.0;
    return out;
  }
  double s1 = 0.0, s2 = 0.0;
  for (double w : lw) {
    if (w == kNegInf) continue;
    const double e = std::exp(w - mx);
    s1 += e;
    s2 += e * e;
  }
  const double dn = static_cast<double>(mc_budget);
  const double mean = s1 / dn;
  const double var = std::max(0.0, s2 / dn - mean * mean);
  out.estimate = std::exp(mx) * mean;
  out.stderr_ = std::exp(mx) * std::sqrt(var / dn);
  out.relative_error = std::fabs(out.estimate - reference) / reference;
  return out;
}

double rho_expanded_form_k2(double beta, const SimplexPoint& x, double tol) {
  check_params(beta, 2);
  if (x.k() != 2) throw std::invalid_argument("rho_expanded_form_k2: need k=2");
  if (!x.interior()) return 0.0;
  const double b = 0.5 * beta;
  const double x1 = x.coords[0], x2 = x.coords[1];
  // Fully expanded assembly, independent of the tabulated evaluator:
  //   rho_2 = Gamma(beta) e^beta b^2 / Gamma(b)^2
  //           * int q(x1/y) y^(b-2) q((x2-y)/(1-y)) (1-y)^(b-2) dy,
  // q(z) = int_0^z (z-u)^(b-1) eta'(u) e^(-b) du.
  auto q = [&](double z) -> double {
    z = clamp01(z);
    if (z <= 0.0 || z >= 1.0) return 0.0;
    const bool flip = z > 0.5;
    if (flip) z = 1.0 - z;
    auto g = [&](double u) {
      return random_means::eta_prime(std::min(1.0 - 1e-15, std::max(1e-300, u)),
                                     b) *
             std::exp(-b);
    };
    return quad::integrate_left_singular(g, z, b, tol * 0.1).value;
  };
  auto f = [&](double y) {
    return q(x1 / y) * std::pow(y, b - 2.0) * q((x2 - y) / (1.0 - y)) *
           std::pow(1.0 - y, b - 2.0);
  };
  const quad::QuadResult r = quad::integrate_tanh_sinh(f, x1, x2, 1e-280, tol);
  const double log_pref = quad::log_gamma(beta) + beta + 2.0 * std::log(b) -
                          2.0 * quad::log_gamma(b);
  return std::exp(log_pref) * r.value;
}

}  // namespace wdiffuse::density
