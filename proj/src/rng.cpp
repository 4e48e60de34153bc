#include "wdiffuse/rng.hpp"

namespace wdiffuse::rng {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

}  // namespace

CounterRng::CounterRng(StreamKey key)
    : key_(mix64(key.seed ^ mix64(key.stream_id * kGolden + 1))) {}

CounterRng::result_type CounterRng::word(std::uint64_t i) const {
  return mix64(mix64(key_ + i * kGolden));
}

double CounterRng::uniform() {
  // 53 random bits; +0.5 ulp offset keeps the value strictly inside (0,1).
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(6.283185307179586476925287 * u2);
}

double CounterRng::gamma_ge1(double shape) {
  if (!(shape >= 1.0)) throw std::invalid_argument("gamma_ge1: shape < 1");
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double CounterRng::log_gamma_sample(double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("log_gamma_sample: shape <= 0");
  if (shape >= 1.0) return std::log(gamma_ge1(shape));
  // Boost trick: G(a) =d= G(a+1) * U^(1/a), computed in log space.
  return std::log(gamma_ge1(shape + 1.0)) + std::log(uniform()) / shape;
}

double CounterRng::beta(double a, double b) {
  const double lx = log_gamma_sample(a);
  const double ly = log_gamma_sample(b);
  const double m = lx > ly ? lx : ly;
  const double sx = std::exp(lx - m), sy = std::exp(ly - m);
  return sx / (sx + sy);
}

}  // namespace wdiffuse::rng
