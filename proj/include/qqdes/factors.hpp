#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qqdes {

enum class FactorKind { TwoLevel, ThreeLevelCategorical, ThreeLevelQuantitative };

struct FactorSpec {
  std::string name;
  FactorKind kind = FactorKind::TwoLevel;

  int levels() const { return kind == FactorKind::TwoLevel ? 2 : 3; }
  int main_columns() const { return kind == FactorKind::TwoLevel ? 1 : 2; }
};

/// Value of one orthogonally coded factor column at a level label.
/// Two-level factors use labels {-1,+1} coded as themselves.  Three-level
/// factors use labels {-1,0,+1}; column 0 is the linear / first comparison
/// (-sqrt(3/2), 0, +sqrt(3/2)) and column 1 the curvature / second comparison
/// (+sqrt(1/2), -sqrt(2), +sqrt(1/2)).  Columns of the full three-level basis
/// are mutually orthogonal with squared norm 3.
double code_level(FactorKind kind, int level, int comp);

/// Reference to one coded main-effect column of a factor.
struct ColumnRef {
  int factor = -1;
  int comp = 0;
  friend bool operator==(const ColumnRef&, const ColumnRef&) = default;
};

/// One model effect: a column of f(x).
struct Effect {
  enum class Kind { Intercept, Main, Interaction, Quadratic };
  Kind kind = Kind::Intercept;
  ColumnRef a, b;  // Main/Quadratic use a; Interaction uses a and b

  static Effect intercept() { return {}; }
  static Effect main(int factor, int comp = 0) {
    return {Kind::Main, {factor, comp}, {}};
  }
  static Effect interaction(int fa, int ca, int fb, int cb) {
    return {Kind::Interaction, {fa, ca}, {fb, cb}};
  }
  static Effect interaction(int fa, int fb) { return interaction(fa, 0, fb, 0); }
  static Effect quadratic(int factor) {
    return {Kind::Quadratic, {factor, 1}, {}};
  }

  friend bool operator==(const Effect&, const Effect&) = default;
};

/// Factor list plus ordered effect list; defines f(x) and q = #effects.
class ModelSpec {
public:
  ModelSpec(std::vector<FactorSpec> factors, std::vector<Effect> effects);

  /// Intercept, every main-effect column in factor order, every cross-factor
  /// product of linear/comparison columns, then quadratic columns of
  /// three-level quantitative factors.
  static ModelSpec full_quadratic(std::vector<FactorSpec> factors);

  int p() const { return static_cast<int>(factors_.size()); }
  int q() const { return static_cast<int>(effects_.size()); }
  const std::vector<FactorSpec>& factors() const { return factors_; }
  const std::vector<Effect>& effects() const { return effects_; }

  std::string effect_label(int j) const;
  std::vector<std::string> effect_labels() const;

  /// f(x) for one point given as level labels, one per factor.
  Eigen::VectorXd expand(const Eigen::VectorXi& point) const;

  void validate_point(const Eigen::VectorXi& point) const;

private:
  std::vector<FactorSpec> factors_;
  std::vector<Effect> effects_;
  std::string column_label(const ColumnRef& ref) const;
};

/// All candidate points of a model with their expanded model matrix.
struct CandidateSet {
  ModelSpec model;
  Eigen::MatrixXi levels;  // N x p level labels
  Eigen::MatrixXd f;       // N x q expanded rows

  int size() const { return static_cast<int>(levels.rows()); }
  int q() const { return static_cast<int>(f.cols()); }
};

/// Full factorial candidate set.  The first declared factor cycles fastest,
/// levels in ascending label order, so two two-level factors enumerate as
/// (-1,-1),(1,-1),(-1,1),(1,1).
CandidateSet full_factorial(const ModelSpec& model);

/// A design is an ordered list of candidate indices; replicates allowed.
using Design = std::vector<int>;

Eigen::VectorXd design_frequencies(const Design& design, int num_candidates);
std::vector<int> distinct_points(const Design& design);

enum class Link { Logit, Probit };

/// Success probability at linear predictor t, clamped to
/// [1e-12, 1 - 1e-12] so logs and weight ratios stay finite.
double link_prob(double t, Link link);

/// Per-point GLM weights: w1 = pi, w2 = 1 - pi, and the joint weight
/// w0 = pi(1-pi) for logit or phi(t)^2 / (pi(1-pi)) for probit.
struct GlmWeights {
  double w0, w1, w2;
};
GlmWeights glm_weights(double t, Link link);

/// pi and w0 for every candidate point at a fixed coefficient vector.
struct CandidateWeights {
  Eigen::VectorXd pi;
  Eigen::VectorXd w0;
};
CandidateWeights candidate_weights(const CandidateSet& cands,
                                   const Eigen::VectorXd& eta, Link link);

}  // namespace qqdes
