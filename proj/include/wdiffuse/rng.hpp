#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace wdiffuse::rng {

struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

/// Counter-based generator: output i is a pure function of (key, i), so a
/// stream can be replayed or split without carrying generator state across
/// threads. The word function is two rounds of the splitmix64 finalizer.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(StreamKey key);
  CounterRng(std::uint64_t seed, std::uint64_t stream_id)
      : CounterRng(StreamKey{seed, stream_id}) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~std::uint64_t{0}; }
  result_type operator()() { return word(counter_++); }

  /// Uniform on (0,1).
  double uniform();
  /// Standard normal (Box-Muller, no cached spare).
  double normal();
  /// Gamma(shape,1) for shape >= 1 (Marsaglia-Tsang).
  double gamma_ge1(double shape);
  /// log of a Gamma(shape,1) draw, valid for any shape > 0. Works in log
  /// space so that tiny shapes do not underflow to zero.
  double log_gamma_sample(double shape);
  /// Beta(a,b) via two log-gamma draws.
  double beta(double a, double b);

  std::uint64_t counter() const { return counter_; }

 private:
  result_type word(std::uint64_t i) const;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

inline CounterRng derive_stream(StreamKey key) { return CounterRng(key); }

}  // namespace wdiffuse::rng
