#pragma once

#include <cstdint>
#include <random>

namespace causal_tradeoff {

// Reproducible normal sampler: std::mt19937_64 (algorithm fixed by the C++
// standard) driving a Box-Muller transform implemented here, so the draw
// sequence is a documented function of the seed rather than of the standard
// library's unspecified normal_distribution.
//
// Per-replication seeds are derived as seed XOR replication index; retry
// seeds after a numerical failure mix in a golden-ratio multiple of the
// attempt count.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : engine_(seed) {}

  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open_closed();
    const double u2 = uniform_open_closed();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  static std::uint64_t replication_seed(std::uint64_t base, std::uint64_t replication) {
    return base ^ replication;
  }

  static std::uint64_t retry_seed(std::uint64_t base, std::uint64_t replication,
                                  std::uint64_t attempt) {
    return (base ^ replication) ^ (0x9e3779b97f4a7c15ULL * attempt);
  }

 private:
  double uniform_open_closed() {
    // 53-bit mantissa mapped to (0, 1]; never zero so log() is safe.
    const std::uint64_t bits = engine_();
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
  }

  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace causal_tradeoff
