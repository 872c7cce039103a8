#include "qqdes/run_bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace qqdes {

namespace {

// ceil with a small backoff so ratios that are integers up to float noise do
// not round up an extra step.
long long safe_ceil(double x) {
  return static_cast<long long>(std::ceil(x - 1e-9));
}

void check_pi(double pi) {
  if (!(pi > 0.0 && pi < 1.0))
    throw std::domain_error("success probabilities must lie strictly in (0, 1)");
}

}  // namespace

ReplicationBounds replication_bounds(std::span<const double> pi, double kappa) {
  if (!(kappa > 0.0 && kappa < 1.0))
    throw std::domain_error("kappa must lie strictly in (0, 1)");
  ReplicationBounds out;
  out.sufficient.reserve(pi.size());
  out.necessary.reserve(pi.size());
  const double log_tail = std::log1p(-kappa);        // log(1 - kappa)
  const double log_half_tail = std::log((1.0 - kappa) / 2.0);
  for (double p : pi) {
    check_pi(p);
    const double pmax = std::max(p, 1.0 - p);
    out.sufficient.push_back(1 + safe_ceil(log_tail / std::log(pmax)));
    out.necessary.push_back(
        safe_ceil(2.0 * log_half_tail / (std::log(p) + std::log1p(-p))));
  }
  return out;
}

SupportBounds support_bounds(long long m, long long q, double pi_min,
                             double pi_max) {
  if (q < 1) throw std::domain_error("q must be positive");
  if (m <= q) throw std::domain_error("support bounds require m > q");
  check_pi(pi_min);
  check_pi(pi_max);
  if (pi_min > pi_max) throw std::domain_error("pi_min must not exceed pi_max");

  const double tail = std::log1p(-static_cast<double>(q) / static_cast<double>(m));
  auto n0 = [&](double lo, double hi) {
    double a = tail / std::log1p(-lo);  // failures to observe a success
    double b = tail / std::log(hi);     // successes to observe a failure
    return safe_ceil(std::max({1.0, a, b}));
  };

  SupportBounds out;
  out.n0_sufficient = n0(pi_min, pi_max);
  out.n0_necessary = n0(pi_max, pi_min);
  out.n_sufficient = m * out.n0_sufficient;
  out.n_necessary = m * out.n0_necessary;
  return out;
}

}  // namespace qqdes
