#include "qqdes/criterion.hpp"

#include <array>
#include <cmath>
#include <string>

namespace qqdes {

namespace {

constexpr double kPivotRatio = 1e-10;
const char* kMatrixName[3] = {"joint", "success", "failure"};

void check_config(const CriterionConfig& cfg, int q) {
  if (cfg.rho < 0.0 || !std::isfinite(cfg.rho))
    throw std::domain_error("rho must be finite and non-negative");
  if (cfg.rho > 0.0 &&
      (cfg.r1_inv.rows() != q || cfg.r1_inv.cols() != q ||
       cfg.r2_inv.rows() != q || cfg.r2_inv.cols() != q))
    throw std::domain_error("rho > 0 requires q x q inverse correlation matrices");
  if (cfg.rho0 < 0.0 || !std::isfinite(cfg.rho0))
    throw std::domain_error("rho0 must be finite and non-negative");
  if (cfg.rho0 > 0.0 && (cfg.r0_inv.rows() != q || cfg.r0_inv.cols() != q))
    throw std::domain_error("rho0 > 0 requires a q x q inverse correlation matrix");
}

/// logdet of a symmetric positive definite matrix via pivoted LDL'.
/// Throws SingularDesign(which) when indefinite or numerically singular.
double spd_logdet(const Eigen::MatrixXd& a, int which) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
  if (ldlt.info() != Eigen::Success)
    throw SingularDesign(which, std::string(kMatrixName[which]) +
                                    " information matrix failed to factorize");
  const Eigen::VectorXd d = ldlt.vectorD();
  double dmin = d.minCoeff(), dmax = d.maxCoeff();
  if (!(dmin > 0.0) || dmin <= kPivotRatio * dmax)
    throw SingularDesign(which, std::string(kMatrixName[which]) +
                                    " information matrix is singular or indefinite");
  return d.array().log().sum();
}

/// The three information matrices for an explicit run list.
std::array<Eigen::MatrixXd, 3> info_matrices(const CandidateSet& cands,
                                             const Design& design,
                                             const Eigen::VectorXd& eta,
                                             const CriterionConfig& cfg) {
  const int q = cands.q();
  check_config(cfg, q);
  if (design.empty()) throw std::domain_error("design must contain at least one run");

  Eigen::MatrixXd fd(design.size(), q);
  Eigen::VectorXd w0(design.size()), pi(design.size());
  for (std::size_t i = 0; i < design.size(); ++i) {
    int c = design[i];
    if (c < 0 || c >= cands.size())
      throw std::out_of_range("design index outside candidate set");
    fd.row(i) = cands.f.row(c);
    GlmWeights w = glm_weights(cands.f.row(c).dot(eta), cfg.link);
    w0[i] = w.w0;
    pi[i] = w.w1;
  }

  std::array<Eigen::MatrixXd, 3> a;
  a[0] = fd.transpose() * w0.asDiagonal() * fd;
  a[1] = fd.transpose() * pi.asDiagonal() * fd;
  a[2] = fd.transpose() * (1.0 - pi.array()).matrix().asDiagonal() * fd;
  if (cfg.rho0 > 0.0) a[0] += cfg.rho0 * cfg.r0_inv;
  if (cfg.rho > 0.0) {
    a[1] += cfg.rho * cfg.r1_inv;
    a[2] += cfg.rho * cfg.r2_inv;
  }
  return a;
}

}  // namespace

double q_value(const CandidateSet& cands, const Design& design,
               const Eigen::VectorXd& eta, const CriterionConfig& cfg) {
  if (eta.size() != cands.q())
    throw std::domain_error("eta length does not match model size");
  auto a = info_matrices(cands, design, eta, cfg);
  return spd_logdet(a[0], 0) + 0.5 * (spd_logdet(a[1], 1) + spd_logdet(a[2], 2));
}

double continuous_q(const CandidateSet& cands, const Eigen::VectorXd& freq,
                    int n, const Eigen::VectorXd& eta,
                    const CriterionConfig& cfg) {
  const int q = cands.q();
  check_config(cfg, q);
  if (eta.size() != q) throw std::domain_error("eta length does not match model size");
  if (freq.size() != cands.size())
    throw std::domain_error("frequency vector length does not match candidate set");
  if (n < 1) throw std::domain_error("nominal run size must be positive");
  if (freq.minCoeff() < 0.0 || std::abs(freq.sum() - 1.0) > 1e-9)
    throw std::domain_error("frequencies must be non-negative and sum to one");

  CandidateWeights cw = candidate_weights(cands, eta, cfg.link);
  Eigen::ArrayXd base = n * freq.array();
  Eigen::MatrixXd a0 =
      cands.f.transpose() * (base * cw.w0.array()).matrix().asDiagonal() * cands.f;
  Eigen::MatrixXd a1 =
      cands.f.transpose() * (base * cw.pi.array()).matrix().asDiagonal() * cands.f;
  Eigen::MatrixXd a2 =
      cands.f.transpose() * (base * (1.0 - cw.pi.array())).matrix().asDiagonal() *
      cands.f;
  if (cfg.rho0 > 0.0) a0 += cfg.rho0 * cfg.r0_inv;
  if (cfg.rho > 0.0) {
    a1 += cfg.rho * cfg.r1_inv;
    a2 += cfg.rho * cfg.r2_inv;
  }
  return spd_logdet(a0, 0) + 0.5 * (spd_logdet(a1, 1) + spd_logdet(a2, 2));
}

double efficiency(double qa, double qb, int q) {
  if (q < 1) throw std::domain_error("q must be positive");
  return std::exp((qa - qb) / static_cast<double>(q));
}

double efficiency(const CandidateSet& cands, const Design& a, const Design& b,
                  const Eigen::VectorXd& eta, const CriterionConfig& cfg) {
  return efficiency(q_value(cands, a, eta, cfg), q_value(cands, b, eta, cfg),
                    cands.q());
}

CriterionState::CriterionState(const CandidateSet& cands, Design design,
                               const Eigen::VectorXd& eta,
                               const CriterionConfig& cfg)
    : cands_(&cands), cfg_(cfg), design_(std::move(design)) {
  check_config(cfg_, cands.q());
  if (eta.size() != cands.q())
    throw std::domain_error("eta length does not match model size");
  CandidateWeights cw = candidate_weights(cands, eta, cfg_.link);
  w_[0] = cw.w0;
  w_[1] = cw.pi;
  w_[2] = (1.0 - cw.pi.array()).matrix();
  refresh();
}

void CriterionState::refresh() {
  Eigen::MatrixXd fd(design_.size(), cands_->q());
  Eigen::VectorXd wc[3];
  for (int j = 0; j < 3; ++j) wc[j].resize(design_.size());
  for (std::size_t i = 0; i < design_.size(); ++i) {
    int c = design_[i];
    if (c < 0 || c >= cands_->size())
      throw std::out_of_range("design index outside candidate set");
    fd.row(i) = cands_->f.row(c);
    for (int j = 0; j < 3; ++j) wc[j][i] = w_[j][c];
  }
  for (int j = 0; j < 3; ++j) {
    Eigen::MatrixXd a = fd.transpose() * wc[j].asDiagonal() * fd;
    if (j == 0 && cfg_.rho0 > 0.0) a += cfg_.rho0 * cfg_.r0_inv;
    if (j > 0 && cfg_.rho > 0.0)
      a += cfg_.rho * (j == 1 ? cfg_.r1_inv : cfg_.r2_inv);
    logdet_[j] = spd_logdet(a, j);
    m_[j] = a.ldlt().solve(Eigen::MatrixXd::Identity(a.rows(), a.cols()));
  }
  since_refresh_ = 0;
}

double CriterionState::deletion_value(int run) const {
  const int c = design_.at(run);
  const auto f = cands_->f.row(c);
  double d = 0.0;
  for (int j = 0; j < 3; ++j) {
    double v = f * (m_[j] * f.transpose());
    double bracket = 1.0 - w_[j][c] * v;
    if (!(bracket > 0.0)) return kInf;
    d -= (j == 0 ? 1.0 : 0.5) * std::log(bracket);
  }
  return d;
}

Eigen::VectorXd CriterionState::deletion_values() const {
  const int n = runs();
  Eigen::MatrixXd fd(n, cands_->q());
  for (int i = 0; i < n; ++i) fd.row(i) = cands_->f.row(design_[i]);

  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  Eigen::ArrayXd v(n);
  for (int j = 0; j < 3; ++j) {
    v = ((fd * m_[j]).array() * fd.array()).rowwise().sum();
    for (int i = 0; i < n; ++i) {
      if (out[i] == kInf) continue;
      double bracket = 1.0 - w_[j][design_[i]] * v[i];
      if (!(bracket > 0.0))
        out[i] = kInf;
      else
        out[i] -= (j == 0 ? 1.0 : 0.5) * std::log(bracket);
    }
  }
  return out;
}

double CriterionState::exchange_delta(int cand, int run) const {
  const int ci = design_.at(run);
  if (cand == ci) return 0.0;  // identity exchange leaves the design as-is
  const auto fx = cands_->f.row(cand);
  const auto fi = cands_->f.row(ci);
  double total = 0.0;
  for (int j = 0; j < 3; ++j) {
    const double ax = w_[j][cand], ai = w_[j][ci];
    const Eigen::VectorXd u = m_[j] * fi.transpose();
    const double vi = fi * u;
    const double vx = fx * (m_[j] * fx.transpose());
    const double vxi = fx * u;
    const double delta = (1.0 + ax * vx) * (1.0 - ai * vi) + ax * ai * vxi * vxi;
    if (!(delta > 0.0)) return -kInf;
    total += (j == 0 ? 1.0 : 0.5) * std::log(delta);
  }
  return total;
}

CriterionState::BestExchange CriterionState::best_exchange(
    int run, std::span<const int> allowed) const {
  const int ci = design_.at(run);
  const auto fi = cands_->f.row(ci);
  const int na = static_cast<int>(allowed.size());

  Eigen::MatrixXd fa(na, cands_->q());
  for (int k = 0; k < na; ++k) fa.row(k) = cands_->f.row(allowed[k]);

  // vx[j](k) = f_k' M_j f_k and vxi[j](k) = f_k' M_j f_i for every allowed k.
  Eigen::ArrayXd vx[3], vxi[3];
  double ai[3], vi[3];
  for (int j = 0; j < 3; ++j) {
    Eigen::MatrixXd p = fa * m_[j];
    vx[j] = (p.array() * fa.array()).rowwise().sum();
    Eigen::VectorXd u = m_[j] * fi.transpose();
    vxi[j] = fa * u;
    ai[j] = w_[j][ci];
    vi[j] = fi * u;
  }

  BestExchange best;
  for (int k = 0; k < na; ++k) {
    const int c = allowed[k];
    double total = 0.0;
    for (int j = 0; j < 3; ++j) {
      const double ax = w_[j][c];
      const double delta =
          (1.0 + ax * vx[j][k]) * (1.0 - ai[j] * vi[j]) + ax * ai[j] * vxi[j][k] * vxi[j][k];
      if (!(delta > 0.0)) {
        total = -kInf;
        break;
      }
      total += (j == 0 ? 1.0 : 0.5) * std::log(delta);
    }
    if (total > best.delta) {
      best.delta = total;
      best.cand = c;
    }
  }
  return best;
}

void CriterionState::apply_exchange(int cand, int run) {
  const int ci = design_.at(run);
  if (cand < 0 || cand >= cands_->size())
    throw std::out_of_range("candidate index outside candidate set");
  const auto fx = cands_->f.row(cand);
  const auto fi = cands_->f.row(ci);

  bool rebuild = false;
  for (int j = 0; j < 3 && !rebuild; ++j) {
    const double ax = w_[j][cand], ai = w_[j][ci];
    // Add the incoming point first: the intermediate matrix stays positive
    // definite, and the later downdate denominator is delta_j / (1 + ax vx).
    Eigen::VectorXd u = m_[j] * fx.transpose();
    const double vx = fx.dot(u);
    m_[j].noalias() -= (ax / (1.0 + ax * vx)) * u * u.transpose();
    logdet_[j] += std::log1p(ax * vx);

    Eigen::VectorXd ui = m_[j] * fi.transpose();
    const double denom = 1.0 - ai * fi.dot(ui);
    if (!(denom > 1e-14)) {
      rebuild = true;
      break;
    }
    m_[j].noalias() += (ai / denom) * ui * ui.transpose();
    logdet_[j] += std::log(denom);
  }

  design_[run] = cand;
  if (rebuild || ++since_refresh_ >= kRefreshEvery) refresh();
}

void CriterionState::remove_point(int run) {
  const int ci = design_.at(run);
  if (runs() <= 1) throw std::domain_error("cannot remove the last run");
  const auto fi = cands_->f.row(ci);

  // Validate all three downdates before mutating anything.
  Eigen::VectorXd u[3];
  double denom[3];
  for (int j = 0; j < 3; ++j) {
    u[j] = m_[j] * fi.transpose();
    denom[j] = 1.0 - w_[j][ci] * fi.dot(u[j]);
    if (!(denom[j] > 0.0))
      throw SingularDesign(j, "removing an indispensable run");
  }
  for (int j = 0; j < 3; ++j) {
    m_[j].noalias() += (w_[j][ci] / denom[j]) * u[j] * u[j].transpose();
    logdet_[j] += std::log(denom[j]);
  }
  design_.erase(design_.begin() + run);
  if (++since_refresh_ >= kRefreshEvery) refresh();
}

}  // namespace qqdes
