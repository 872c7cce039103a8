#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace qqdes {

/// Derives a stream seed from a base seed and a stream index so that
/// restarts, prior samples and similar substreams get decorrelated engines.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream);

/// mt19937_64 with hand-rolled variate generation.  The raw engine output is
/// pinned by the standard, while the std distribution adapters are not, so
/// drawing directly keeps every seeded result identical across platforms.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t bits() { return eng_(); }

  /// Uniform in [0,1) with 53-bit resolution.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Unbiased integer in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n);

  int index(std::size_t n) { return static_cast<int>(below(n)); }

  /// Index i with probability weights[i] / sum(weights).  Weights must be
  /// non-negative with a positive, finite sum.
  int weighted(std::span<const double> weights);

  /// Standard normal (Marsaglia polar).
  double normal();

  /// In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::size_t j = below(i);
      std::swap(values[i - 1], values[j]);
    }
  }

private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace qqdes
