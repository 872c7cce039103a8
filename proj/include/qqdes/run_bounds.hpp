#pragma once

#include <span>
#include <vector>

namespace qqdes {

/// Per-point replication bounds so that, with confidence kappa, a point
/// contributes both a success and a failure (both responses observable).
/// sufficient[i] = 1 + ceil(log(1-kappa) / log(max(pi_i, 1-pi_i)))
/// necessary[i]  = ceil(2 log((1-kappa)/2) / (log pi_i + log(1-pi_i)))
struct ReplicationBounds {
  std::vector<long long> sufficient;
  std::vector<long long> necessary;
};
ReplicationBounds replication_bounds(std::span<const double> pi, double kappa);

/// Run-size bounds for an m-point design (m > q) so that at least q support
/// points yield both outcomes with probability at least 1 - q/m-style
/// coverage: the per-point replicate count n0 satisfies
///   sufficient: n0 = ceil(max(1, log(1-q/m)/log(1-pi_min), log(1-q/m)/log(pi_max)))
///   necessary:  same expression with pi_min and pi_max swapped,
/// and the total bound is n = m * n0.
struct SupportBounds {
  long long n0_sufficient = 0;
  long long n_sufficient = 0;
  long long n0_necessary = 0;
  long long n_necessary = 0;
};
SupportBounds support_bounds(long long m, long long q, double pi_min,
                             double pi_max);

}  // namespace qqdes
