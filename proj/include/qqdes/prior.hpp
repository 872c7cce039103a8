#pragma once

#include <Eigen/Dense>

#include <cstdint>

#include "qqdes/factors.hpp"

namespace qqdes {

/// Prior correlation matrix R of the model effects for correlation parameter
/// r in (0, 1].  Built from the Kronecker product over factors of
/// Fj^-1 Psi_j Fj^-T, where Fj is the factor's coded basis and Psi_j the
/// within-factor level correlation (zeta = (1-r)/(1+r) off-diagonal for
/// categorical levels, powers of zeta by squared level distance for
/// quantitative ones), normalized so R[intercept, intercept] = 1, then
/// restricted to the rows/columns matching the model's effects.
Eigen::MatrixXd correlation_matrix(const ModelSpec& model, double r);

/// Prior on the GLM coefficient vector.
struct EtaPrior {
  enum class Kind { UniformBox, NormalDiag };
  Kind kind = Kind::UniformBox;
  // UniformBox: per-effect bounds; lower == upper pins a coordinate.
  Eigen::VectorXd lower, upper;
  // NormalDiag: eta_j ~ N(0, tau0_sq * r0_diag_j), independent coordinates.
  double tau0_sq = 1.0;
  Eigen::VectorXd r0_diag;

  int dim() const {
    return static_cast<int>(kind == Kind::UniformBox ? lower.size() : r0_diag.size());
  }
};

enum class EtaSampling { IidUniform, MaximinLhs };

/// B draws of eta (rows).  Latin hypercube draws stratify every coordinate
/// into B cells; the maximin variant additionally hill-climbs coordinate
/// swaps over seeded restarts to push up the minimum pairwise distance in the
/// unit cube.  Normal priors are reached through the quantile transform so
/// stratification carries over.  Deterministic for a fixed seed.
Eigen::MatrixXd sample_eta(const EtaPrior& prior, int B, EtaSampling strategy,
                           std::uint64_t seed, int lhs_restarts = 20);

/// Unit-cube Latin hypercube sample (B x dim in [0,1)).
Eigen::MatrixXd lhs_unit(int B, int dim, std::uint64_t seed);

/// Minimum pairwise Euclidean distance between rows.
double min_pairwise_distance(const Eigen::MatrixXd& pts);

}  // namespace qqdes
