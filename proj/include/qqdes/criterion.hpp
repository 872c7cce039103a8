#pragma once

#include <Eigen/Dense>

#include <limits>
#include <span>

#include "qqdes/errors.hpp"
#include "qqdes/factors.hpp"

namespace qqdes {

/// Configuration of the design criterion
///   Q(X) = logdet(F'W0F [+ rho0*R0inv])
///        + 1/2 logdet(F'W1F + rho*R1inv)
///        + 1/2 logdet(F'W2F + rho*R2inv)
/// where W1 = diag(pi), W2 = diag(1-pi) and W0 holds the joint weights.
/// rho > 0 requires the two q x q inverse prior correlation matrices; the
/// optional rho0/R0inv ridge covers a proper normal prior on the GLM
/// coefficients themselves.
struct CriterionConfig {
  Link link = Link::Logit;
  double rho = 0.0;
  Eigen::MatrixXd r1_inv, r2_inv;
  double rho0 = 0.0;
  Eigen::MatrixXd r0_inv;
};

/// Q(X) computed from scratch.  Throws SingularDesign if any of the three
/// information matrices is indefinite or has pivot ratio below 1e-10.
double q_value(const CandidateSet& cands, const Design& design,
               const Eigen::VectorXd& eta, const CriterionConfig& cfg);

/// Criterion for a continuous (frequency) design of nominal size n: the same
/// three log-determinants with each candidate weighted by n*freq and the
/// ridges added unscaled, so a frequency vector that matches the empirical
/// frequencies of an n-run discrete design reproduces its Q exactly.
double continuous_q(const CandidateSet& cands, const Eigen::VectorXd& freq,
                    int n, const Eigen::VectorXd& eta,
                    const CriterionConfig& cfg);

/// Relative efficiency exp((qa - qb) / q) of design a over design b.
double efficiency(double qa, double qb, int q);
double efficiency(const CandidateSet& cands, const Design& a, const Design& b,
                  const Eigen::VectorXd& eta, const CriterionConfig& cfg);

/// Incremental evaluation engine for point-exchange search.  Maintains the
/// inverses M_j of the three information matrices and their log-determinants
/// under rank-one point updates, with a periodic from-scratch refresh to keep
/// float drift bounded.
class CriterionState {
public:
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  CriterionState(const CandidateSet& cands, Design design,
                 const Eigen::VectorXd& eta, const CriterionConfig& cfg);

  double q() const { return logdet_[0] + 0.5 * (logdet_[1] + logdet_[2]); }
  int runs() const { return static_cast<int>(design_.size()); }
  const Design& design() const { return design_; }

  /// Loss of Q from dropping run i: with v_j = f_i'M_j f_i,
  ///   d(i) = -( log(1 - w0 v0) + 1/2 log(1 - w1 v1) + 1/2 log(1 - w2 v2) ),
  /// +inf when a bracket is non-positive (the run is indispensable).
  double deletion_value(int run) const;
  Eigen::VectorXd deletion_values() const;

  /// Gain in Q from replacing run i by candidate x:
  ///   delta_j = (1 + a_j(x) v_j(x)) (1 - a_j(i) v_j(i)) + a_j(x) a_j(i) v_j(x,i)^2
  /// combined as log delta_0 + 1/2 (log delta_1 + log delta_2); -inf when any
  /// delta_j is non-positive.
  double exchange_delta(int cand, int run) const;

  struct BestExchange {
    int cand = -1;
    double delta = -kInf;
  };
  /// Best candidate over the allowed list (ties keep the earliest entry).
  BestExchange best_exchange(int run, std::span<const int> allowed) const;

  /// Replace run i by candidate x via a rank-one update plus downdate of each
  /// M_j.  A downdate that destroys positive definiteness triggers an
  /// immediate from-scratch rebuild.
  void apply_exchange(int cand, int run);

  /// Drop run i (Sherman-Morrison downdate of each M_j).  Throws
  /// SingularDesign if the run is indispensable.
  void remove_point(int run);

  /// Rebuild all matrices from the current design.
  void refresh();

  const Eigen::MatrixXd& m(int j) const { return m_[j]; }
  double logdet(int j) const { return logdet_[j]; }
  /// Weight of candidate point c in matrix j (a_j in the update formulas).
  double point_weight(int j, int cand) const { return w_[j][cand]; }
  const Eigen::VectorXd& pi() const { return w_[1]; }
  const CandidateSet& candidates() const { return *cands_; }

private:
  const CandidateSet* cands_;
  CriterionConfig cfg_;
  Eigen::VectorXd w_[3];  // per candidate: w0, pi, 1-pi
  Design design_;
  Eigen::MatrixXd m_[3];
  double logdet_[3] = {0, 0, 0};
  int since_refresh_ = 0;
  static constexpr int kRefreshEvery = 32;
};

}  // namespace qqdes
