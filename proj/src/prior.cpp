#include "qqdes/prior.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "qqdes/rng.hpp"

namespace qqdes {

namespace {

// Coded basis of one factor, rows = levels in ascending label order,
// columns = (intercept, main columns...).
Eigen::MatrixXd coded_basis(const FactorSpec& f) {
  Eigen::MatrixXd b(f.levels(), 1 + f.main_columns());
  for (int li = 0; li < f.levels(); ++li) {
    int level = f.levels() == 2 ? (li == 0 ? -1 : 1) : li - 1;
    b(li, 0) = 1.0;
    for (int c = 0; c < f.main_columns(); ++c)
      b(li, c + 1) = code_level(f.kind, level, c);
  }
  return b;
}

Eigen::MatrixXd level_correlation(const FactorSpec& f, double zeta) {
  int s = f.levels();
  Eigen::MatrixXd psi = Eigen::MatrixXd::Identity(s, s);
  if (s == 2) {
    psi(0, 1) = psi(1, 0) = zeta;
  } else if (f.kind == FactorKind::ThreeLevelCategorical) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j) psi(i, j) = zeta;
  } else {
    // Quantitative levels decay with squared distance: zeta^((i-j)^2).
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j) psi(i, j) = std::pow(zeta, (i - j) * (i - j));
  }
  return psi;
}

// Digit vector of an effect in the per-factor Kronecker basis:
// 0 = intercept slot, 1 + comp = coded column of that factor.
std::vector<int> effect_digits(const ModelSpec& model, const Effect& e) {
  std::vector<int> dig(model.p(), 0);
  switch (e.kind) {
    case Effect::Kind::Intercept:
      break;
    case Effect::Kind::Main:
    case Effect::Kind::Quadratic:
      dig[e.a.factor] = 1 + e.a.comp;
      break;
    case Effect::Kind::Interaction:
      dig[e.a.factor] = 1 + e.a.comp;
      dig[e.b.factor] = 1 + e.b.comp;
      break;
  }
  return dig;
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("quantile needs p in (0,1)");
  // Acklam's rational approximation followed by one Halley refinement.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    double u = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
        ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
  } else if (p <= 1.0 - plow) {
    double u = p - 0.5, t = u * u;
    x = (((((a[0] * t + a[1]) * t + a[2]) * t + a[3]) * t + a[4]) * t + a[5]) * u /
        (((((b[0] * t + b[1]) * t + b[2]) * t + b[3]) * t + b[4]) * t + 1.0);
  } else {
    double u = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
        ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
  }
  double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  double g = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  return x - g / (1.0 + 0.5 * x * g);
}

// Hill-climbs column swaps to raise the minimum pairwise distance.
void maximin_improve(Eigen::MatrixXd& u, Rng& rng) {
  const int B = static_cast<int>(u.rows());
  const int d = static_cast<int>(u.cols());
  if (B < 3) return;

  Eigen::MatrixXd dist2(B, B);
  for (int i = 0; i < B; ++i) {
    dist2(i, i) = std::numeric_limits<double>::infinity();
    for (int j = i + 1; j < B; ++j)
      dist2(i, j) = dist2(j, i) = (u.row(i) - u.row(j)).squaredNorm();
  }
  auto global_min = [&](int& r1, int& r2) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < B; ++i)
      for (int j = i + 1; j < B; ++j)
        if (dist2(i, j) < best) {
          best = dist2(i, j);
          r1 = i;
          r2 = j;
        }
    return best;
  };
  auto recompute_row = [&](int r) {
    for (int j = 0; j < B; ++j)
      if (j != r) dist2(r, j) = dist2(j, r) = (u.row(r) - u.row(j)).squaredNorm();
  };

  int c1 = 0, c2 = 1;
  double current = global_min(c1, c2);
  const long long budget = std::max(200LL, 30LL * B);
  long long stale = 0;
  for (long long move = 0; move < budget && stale < 120; ++move) {
    // Swap one coordinate between a row of the critical pair and another row.
    int ra = rng.uniform() < 0.5 ? c1 : c2;
    int rb = rng.index(B);
    if (rb == ra) {
      ++stale;
      continue;
    }
    int col = rng.index(d);
    std::swap(u(ra, col), u(rb, col));
    recompute_row(ra);
    recompute_row(rb);
    int n1 = c1, n2 = c2;
    double next = global_min(n1, n2);
    if (next > current) {
      current = next;
      c1 = n1;
      c2 = n2;
      stale = 0;
    } else {
      std::swap(u(ra, col), u(rb, col));
      recompute_row(ra);
      recompute_row(rb);
      ++stale;
    }
  }
}

}  // namespace

Eigen::MatrixXd correlation_matrix(const ModelSpec& model, double r) {
  if (!(r > 0.0 && r <= 1.0))
    throw std::domain_error("prior correlation parameter r must lie in (0, 1]");
  const double zeta = (1.0 - r) / (1.0 + r);
  const int p = model.p();
  const int q = model.q();

  // Per-factor blocks C_j = Fj^-1 Psi_j Fj^-T; an entry of the Kronecker
  // product is the product of per-factor entries, so the full exponential
  // matrix never needs to be materialized.
  std::vector<Eigen::MatrixXd> block(p);
  double normalizer = 1.0;
  for (int j = 0; j < p; ++j) {
    const FactorSpec& f = model.factors()[j];
    Eigen::MatrixXd basis = coded_basis(f);
    Eigen::MatrixXd inv = basis.inverse();
    block[j] = inv * level_correlation(f, zeta) * inv.transpose();
    normalizer *= block[j](0, 0);
  }

  std::vector<std::vector<int>> digits(q);
  for (int e = 0; e < q; ++e) digits[e] = effect_digits(model, model.effects()[e]);

  Eigen::MatrixXd rmat(q, q);
  for (int a = 0; a < q; ++a) {
    for (int b = a; b < q; ++b) {
      double prod = 1.0;
      for (int j = 0; j < p; ++j) prod *= block[j](digits[a][j], digits[b][j]);
      rmat(a, b) = rmat(b, a) = prod / normalizer;
    }
  }
  return rmat;
}

Eigen::MatrixXd lhs_unit(int B, int dim, std::uint64_t seed) {
  if (B < 1 || dim < 1) throw std::domain_error("lhs_unit needs B >= 1, dim >= 1");
  Rng rng(seed);
  Eigen::MatrixXd u(B, dim);
  std::vector<int> perm(B);
  for (int c = 0; c < dim; ++c) {
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(std::span<int>(perm));
    for (int i = 0; i < B; ++i)
      u(i, c) = (perm[i] + rng.uniform()) / static_cast<double>(B);
  }
  return u;
}

double min_pairwise_distance(const Eigen::MatrixXd& pts) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < pts.rows(); ++i)
    for (int j = i + 1; j < pts.rows(); ++j)
      best = std::min(best, (pts.row(i) - pts.row(j)).norm());
  return best;
}

Eigen::MatrixXd sample_eta(const EtaPrior& prior, int B, EtaSampling strategy,
                           std::uint64_t seed, int lhs_restarts) {
  const int dim = prior.dim();
  if (B < 1) throw std::domain_error("need at least one eta draw");
  if (dim < 1) throw std::domain_error("eta prior has no coordinates");
  if (prior.kind == EtaPrior::Kind::UniformBox) {
    if (prior.upper.size() != dim)
      throw std::domain_error("box bounds have mismatched lengths");
    for (int j = 0; j < dim; ++j) {
      if (!std::isfinite(prior.lower[j]) || !std::isfinite(prior.upper[j]))
        throw std::domain_error("box bounds must be finite");
      if (prior.lower[j] > prior.upper[j])
        throw std::domain_error("box lower bound exceeds upper bound");
    }
  } else {
    if (!(prior.tau0_sq > 0.0)) throw std::domain_error("tau0_sq must be positive");
    if ((prior.r0_diag.array() <= 0.0).any())
      throw std::domain_error("normal prior variances must be positive");
  }

  Eigen::MatrixXd u;
  if (strategy == EtaSampling::IidUniform) {
    Rng rng(seed);
    u.resize(B, dim);
    for (int i = 0; i < B; ++i)
      for (int j = 0; j < dim; ++j) u(i, j) = rng.uniform();
  } else {
    double best_score = -1.0;
    for (int restart = 0; restart < std::max(1, lhs_restarts); ++restart) {
      Eigen::MatrixXd trial = lhs_unit(B, dim, mix_seed(seed, restart));
      if (B > 2) {
        Rng rng(mix_seed(seed, 1000003ULL + restart));
        maximin_improve(trial, rng);
      }
      double score = B > 1 ? min_pairwise_distance(trial) : 1.0;
      if (score > best_score) {
        best_score = score;
        u = trial;
      }
    }
  }

  Eigen::MatrixXd etas(B, dim);
  for (int i = 0; i < B; ++i) {
    for (int j = 0; j < dim; ++j) {
      if (prior.kind == EtaPrior::Kind::UniformBox) {
        etas(i, j) = prior.lower[j] + (prior.upper[j] - prior.lower[j]) * u(i, j);
      } else {
        double p = std::clamp(u(i, j), 1e-15, 1.0 - 1e-15);
        etas(i, j) = std::sqrt(prior.tau0_sq * prior.r0_diag[j]) * normal_quantile(p);
      }
    }
  }
  return etas;
}

}  // namespace qqdes
