#include "qqdes/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace qqdes {

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
  // splitmix64 finalizer over the combined words.
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
  // Rejection sampling on the top of the range keeps the draw unbiased.
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    std::uint64_t x = eng_();
    if (x >= threshold) return x % n;
  }
}

int Rng::weighted(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("Rng::weighted: negative or NaN weight");
    total += w;
  }
  if (!(total > 0.0) || !std::isfinite(total))
    throw std::invalid_argument("Rng::weighted: weights must have a positive finite sum");
  double u = uniform() * total;
  double acc = 0.0;
  int last_positive = -1;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] > 0.0) last_positive = static_cast<int>(i);
    acc += weights[i];
    if (u < acc) return weights[i] > 0.0 ? static_cast<int>(i) : last_positive;
  }
  return last_positive;  // u landed on the accumulated rounding tail
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  for (;;) {
    double u = 2.0 * uniform() - 1.0;
    double v = 2.0 * uniform() - 1.0;
    double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) {
      double k = std::sqrt(-2.0 * std::log(s) / s);
      spare_ = v * k;
      have_spare_ = true;
      return u * k;
    }
  }
}

}  // namespace qqdes
