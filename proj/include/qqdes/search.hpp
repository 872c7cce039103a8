#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

#include "qqdes/criterion.hpp"
#include "qqdes/factors.hpp"
#include "qqdes/rng.hpp"

namespace qqdes {

struct SearchConfig {
  int n = 0;                         // run size (required, n >= q)
  int restarts = 10;
  long long max_iterations = 0;      // 0 -> 200 * n
  long long no_improve_window = 0;   // 0 -> 5 * n
  double filter_lo = 0.15;           // candidate filter on pi
  double filter_hi = 0.85;
  double kappa_init = 0.5;           // confidence for initial replication draws
  std::uint64_t seed = 1;

  long long effective_max_iterations() const {
    return max_iterations > 0 ? max_iterations : 200LL * n;
  }
  long long effective_window() const {
    return no_improve_window > 0 ? no_improve_window : 5LL * n;
  }
};

/// Candidate indices whose success probability falls in [lo, hi]; the full
/// index list when fewer than q survive.
std::vector<int> filter_candidates(const CandidateSet& cands,
                                   const Eigen::VectorXd& eta, Link link,
                                   double lo, double hi, int q);

/// Starting design: every allowed point once, greedily reduced by removing
/// the run with the smallest deletion value (indispensable runs are
/// protected) until q remain, then n - q replicates drawn with probability
/// proportional to the per-point sufficient replication bound at kappa.
/// Throws InfeasibleModel when the allowed set admits no nonsingular design.
Design initial_design(const CandidateSet& cands, std::span<const int> allowed,
                      int n, const Eigen::VectorXd& eta,
                      const CriterionConfig& cfg, double kappa, Rng& rng);

struct LocalResult {
  Design design;
  double q_value = 0.0;
  long long iterations = 0;
  long long exchanges = 0;
};

/// Multi-start point-exchange maximization of Q for a fixed eta.  Each
/// iteration drops one run drawn with probability proportional to the inverse
/// deletion value and replaces it by the candidate with the largest exchange
/// gain, if positive.  A restart stops after the no-improvement window or the
/// iteration cap; the best refreshed Q across restarts wins.
LocalResult local_search(const CandidateSet& cands, const Eigen::VectorXd& eta,
                         const CriterionConfig& cfg, const SearchConfig& scfg);

/// Baseline criteria: LinearD maximizes logdet(F'F); GlmLocalD maximizes
/// logdet(F'W0F) at the given eta.  Same exchange scheme on a single matrix,
/// no candidate filter.
enum class BaselineKind { LinearD, GlmLocalD };
Design baseline_design(BaselineKind kind, const CandidateSet& cands, int n,
                       const Eigen::VectorXd& eta, Link link,
                       const SearchConfig& scfg);

/// GlmLocalD of size n_glm concatenated with LinearD of size n_lin.
Design combined_design(const CandidateSet& cands, int n_glm, int n_lin,
                       const Eigen::VectorXd& eta, Link link,
                       const SearchConfig& scfg);

struct GlobalResult {
  Eigen::VectorXd freq;        // accumulated selection frequencies
  std::vector<double> eta_q;   // per-eta best Q (NaN for failed samples)
  int failures = 0;
};

/// Accumulates local searches over the rows of etas into selection
/// frequencies.  Every sample runs with its own derived sub-seed, so the
/// result does not depend on thread count or completion order.  Throws
/// InfeasibleModel when more than 10% of the samples fail.
GlobalResult global_design(const CandidateSet& cands,
                           const Eigen::MatrixXd& etas,
                           const CriterionConfig& cfg,
                           const SearchConfig& scfg, int threads = 1);

/// n independent draws from a frequency design.  No singularity guarantee;
/// callers needing a measurable design validate and redraw.
Design sample_discrete(const Eigen::VectorXd& freq, int n, std::uint64_t seed);

}  // namespace qqdes
