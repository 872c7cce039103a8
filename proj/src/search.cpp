#include "qqdes/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <thread>

#include "qqdes/run_bounds.hpp"

namespace qqdes {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDeletionFloor = 1e-9;

std::vector<int> all_indices(int n) {
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  return idx;
}

// Removal weights: proportional to 1/d with d clamped below, zero for
// indispensable runs.
Eigen::VectorXd removal_weights(const Eigen::VectorXd& deletion) {
  Eigen::VectorXd w(deletion.size());
  for (int i = 0; i < deletion.size(); ++i)
    w[i] = deletion[i] == kInf ? 0.0 : 1.0 / std::max(deletion[i], kDeletionFloor);
  return w;
}

}  // namespace

std::vector<int> filter_candidates(const CandidateSet& cands,
                                   const Eigen::VectorXd& eta, Link link,
                                   double lo, double hi, int q) {
  if (!(lo <= hi)) throw std::domain_error("filter bounds must satisfy lo <= hi");
  Eigen::VectorXd t = cands.f * eta;
  std::vector<int> keep;
  keep.reserve(cands.size());
  for (int i = 0; i < cands.size(); ++i) {
    double pi = link_prob(t[i], link);
    if (pi >= lo && pi <= hi) keep.push_back(i);
  }
  if (static_cast<int>(keep.size()) < q) return all_indices(cands.size());
  return keep;
}

Design initial_design(const CandidateSet& cands, std::span<const int> allowed,
                      int n, const Eigen::VectorXd& eta,
                      const CriterionConfig& cfg, double kappa, Rng& rng) {
  const int q = cands.q();
  if (n < q) throw std::domain_error("run size must be at least the number of effects");
  if (static_cast<int>(allowed.size()) < q)
    throw InfeasibleModel("candidate set smaller than the number of effects");

  Design start(allowed.begin(), allowed.end());
  std::optional<CriterionState> state;
  try {
    state.emplace(cands, start, eta, cfg);
  } catch (const SingularDesign&) {
    throw InfeasibleModel("allowed candidate set admits no nonsingular design");
  }

  // Greedy reduction: drop the cheapest deletion until q runs remain.
  while (state->runs() > q) {
    Eigen::VectorXd d = state->deletion_values();
    int pick = -1;
    for (int i = 0; i < d.size(); ++i)
      if (d[i] < kInf && (pick < 0 || d[i] < d[pick])) pick = i;
    if (pick < 0)
      throw InfeasibleModel("every remaining run is indispensable before reaching q");
    state->remove_point(pick);
  }

  Design design = state->design();

  // Replicate the survivors: draw the remaining n - q runs with probability
  // proportional to the sufficient per-point replication bound.
  std::vector<double> pis(design.size());
  for (std::size_t i = 0; i < design.size(); ++i) pis[i] = state->pi()[design[i]];
  ReplicationBounds rb = replication_bounds(pis, kappa);
  std::vector<double> weights(rb.sufficient.begin(), rb.sufficient.end());
  for (int extra = n - q; extra > 0; --extra)
    design.push_back(design[rng.weighted(weights)]);
  return design;
}

LocalResult local_search(const CandidateSet& cands, const Eigen::VectorXd& eta,
                         const CriterionConfig& cfg, const SearchConfig& scfg) {
  const int q = cands.q();
  if (scfg.n < q) throw std::domain_error("run size must be at least the number of effects");
  if (scfg.restarts < 1) throw std::domain_error("need at least one restart");

  std::vector<int> allowed = filter_candidates(cands, eta, cfg.link,
                                               scfg.filter_lo, scfg.filter_hi, q);
  const long long max_iter = scfg.effective_max_iterations();
  const long long window = scfg.effective_window();

  LocalResult best;
  bool have_best = false;

  for (int restart = 0; restart < scfg.restarts; ++restart) {
    Rng rng(mix_seed(scfg.seed, restart));

    Design start;
    try {
      start = initial_design(cands, allowed, scfg.n, eta, cfg, scfg.kappa_init, rng);
    } catch (const InfeasibleModel&) {
      if (static_cast<int>(allowed.size()) == cands.size()) throw;
      // The filtered set cannot support the model; restore the full set.
      allowed = all_indices(cands.size());
      start = initial_design(cands, allowed, scfg.n, eta, cfg, scfg.kappa_init, rng);
    }
    CriterionState state(cands, start, eta, cfg);

    long long iters = 0, exchanges = 0, no_improve = 0;
    while (iters < max_iter && no_improve < window) {
      ++iters;
      Eigen::VectorXd w = removal_weights(state.deletion_values());
      if (w.sum() <= 0.0) {
        ++no_improve;  // every run indispensable; nothing to exchange
        continue;
      }
      int run = rng.weighted(std::span<const double>(w.data(), w.size()));
      auto pick = state.best_exchange(run, allowed);
      if (pick.cand >= 0 && pick.delta > 0.0) {
        state.apply_exchange(pick.cand, run);
        ++exchanges;
        no_improve = 0;
      } else {
        ++no_improve;
      }
    }

    state.refresh();  // exact Q for the cross-restart comparison
    if (!have_best || state.q() > best.q_value) {
      best.design = state.design();
      best.q_value = state.q();
      have_best = true;
    }
    best.iterations += iters;
    best.exchanges += exchanges;
  }
  return best;
}

namespace {

// Point exchange for a single-matrix criterion logdet(sum_i a(x_i) f f').
// Shares the structure of the main search with scalar weights per candidate.
Design dopt_single_matrix(const CandidateSet& cands,
                          const Eigen::VectorXd& weights, int n,
                          const SearchConfig& scfg) {
  const int q = cands.q();
  const int nc = cands.size();
  if (n < q) throw std::domain_error("run size must be at least the number of effects");

  const long long max_iter = scfg.effective_max_iterations();
  const long long window = scfg.effective_window();

  auto build = [&](const Design& d, Eigen::MatrixXd& minv, double& logdet) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(q, q);
    for (int c : d) a.noalias() += weights[c] * cands.f.row(c).transpose() * cands.f.row(c);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
    Eigen::VectorXd piv = ldlt.vectorD();
    if (ldlt.info() != Eigen::Success || !(piv.minCoeff() > 0.0) ||
        piv.minCoeff() <= 1e-10 * piv.maxCoeff())
      throw SingularDesign(0, "baseline information matrix is singular");
    logdet = piv.array().log().sum();
    minv = ldlt.solve(Eigen::MatrixXd::Identity(q, q));
  };

  Design best;
  double best_logdet = -kInf;

  for (int restart = 0; restart < std::max(1, scfg.restarts); ++restart) {
    Rng rng(mix_seed(scfg.seed ^ 0x5baa61e4c9b2d3a5ULL, restart));

    // Reduce the full candidate list to q points by cheapest deletion.
    Design design = all_indices(nc);
    Eigen::MatrixXd minv;
    double logdet;
    try {
      build(design, minv, logdet);
    } catch (const SingularDesign&) {
      throw InfeasibleModel("candidate set admits no nonsingular design");
    }
    while (static_cast<int>(design.size()) > q) {
      int pick = -1;
      double dmin = kInf;
      for (std::size_t i = 0; i < design.size(); ++i) {
        const auto f = cands.f.row(design[i]);
        double denom = 1.0 - weights[design[i]] * f.dot(minv * f.transpose());
        if (denom > 0.0) {
          double d = -std::log(denom);
          if (d < dmin) {
            dmin = d;
            pick = static_cast<int>(i);
          }
        }
      }
      if (pick < 0) throw InfeasibleModel("every remaining run is indispensable");
      const auto f = cands.f.row(design[pick]);
      Eigen::VectorXd u = minv * f.transpose();
      double denom = 1.0 - weights[design[pick]] * f.dot(u);
      minv.noalias() += (weights[design[pick]] / denom) * u * u.transpose();
      logdet += std::log(denom);
      design.erase(design.begin() + pick);
    }
    for (int extra = n - q; extra > 0; --extra) {
      int run = design[rng.index(q)];
      const auto f = cands.f.row(run);
      Eigen::VectorXd u = minv * f.transpose();
      double grow = 1.0 + weights[run] * f.dot(u);
      minv.noalias() -= (weights[run] / grow) * u * u.transpose();
      logdet += std::log(grow);
      design.push_back(run);
    }

    long long no_improve = 0;
    int since_refresh = 0;
    for (long long iter = 0; iter < max_iter && no_improve < window; ++iter) {
      // Removal draw proportional to inverse deletion value.
      Eigen::VectorXd del(design.size());
      for (std::size_t i = 0; i < design.size(); ++i) {
        const auto f = cands.f.row(design[i]);
        double denom = 1.0 - weights[design[i]] * f.dot(minv * f.transpose());
        del[i] = denom > 0.0 ? -std::log(denom) : kInf;
      }
      Eigen::VectorXd w = removal_weights(del);
      // Saturated blocks have every deletion at +inf; the pairwise swap can
      // still improve, so fall back to a uniform removal draw.
      int run = w.sum() > 0.0
                    ? rng.weighted(std::span<const double>(w.data(), w.size()))
                    : rng.index(design.size());
      const auto fi = cands.f.row(design[run]);
      const double ai = weights[design[run]];
      Eigen::VectorXd ui = minv * fi.transpose();
      const double vi = fi.dot(ui);

      Eigen::MatrixXd p = cands.f * minv;
      Eigen::ArrayXd vx = (p.array() * cands.f.array()).rowwise().sum();
      Eigen::ArrayXd vxi = cands.f * ui;

      int bc = -1;
      double bdelta = -kInf;
      for (int c = 0; c < nc; ++c) {
        double delta = (1.0 + weights[c] * vx[c]) * (1.0 - ai * vi) +
                       weights[c] * ai * vxi[c] * vxi[c];
        double ld = delta > 0.0 ? std::log(delta) : -kInf;
        if (ld > bdelta) {
          bdelta = ld;
          bc = c;
        }
      }
      if (bc >= 0 && bdelta > 0.0) {
        const auto fx = cands.f.row(bc);
        Eigen::VectorXd u = minv * fx.transpose();
        double grow = 1.0 + weights[bc] * fx.dot(u);
        minv.noalias() -= (weights[bc] / grow) * u * u.transpose();
        Eigen::VectorXd u2 = minv * fi.transpose();
        double denom = 1.0 - ai * fi.dot(u2);
        design[run] = bc;
        if (denom > 1e-14) {
          minv.noalias() += (ai / denom) * u2 * u2.transpose();
          logdet += std::log(grow) + std::log(denom);
        } else {
          build(design, minv, logdet);
          since_refresh = 0;
        }
        no_improve = 0;
        if (++since_refresh >= 32) {
          build(design, minv, logdet);
          since_refresh = 0;
        }
      } else {
        ++no_improve;
      }
    }

    build(design, minv, logdet);
    if (logdet > best_logdet) {
      best_logdet = logdet;
      best = design;
    }
  }
  return best;
}

}  // namespace

Design baseline_design(BaselineKind kind, const CandidateSet& cands, int n,
                       const Eigen::VectorXd& eta, Link link,
                       const SearchConfig& scfg) {
  Eigen::VectorXd weights;
  if (kind == BaselineKind::LinearD) {
    weights = Eigen::VectorXd::Ones(cands.size());
  } else {
    weights = candidate_weights(cands, eta, link).w0;
  }
  return dopt_single_matrix(cands, weights, n, scfg);
}

Design combined_design(const CandidateSet& cands, int n_glm, int n_lin,
                       const Eigen::VectorXd& eta, Link link,
                       const SearchConfig& scfg) {
  if (n_glm < cands.q() || n_lin < cands.q())
    throw std::domain_error("both blocks of a combined design need at least q runs");
  SearchConfig glm_cfg = scfg;
  glm_cfg.n = n_glm;
  SearchConfig lin_cfg = scfg;
  lin_cfg.n = n_lin;
  lin_cfg.seed = mix_seed(scfg.seed, 0x10b5);
  Design d = baseline_design(BaselineKind::GlmLocalD, cands, n_glm, eta, link, glm_cfg);
  Design dl = baseline_design(BaselineKind::LinearD, cands, n_lin, eta, link, lin_cfg);
  d.insert(d.end(), dl.begin(), dl.end());
  return d;
}

GlobalResult global_design(const CandidateSet& cands,
                           const Eigen::MatrixXd& etas,
                           const CriterionConfig& cfg,
                           const SearchConfig& scfg, int threads) {
  const int B = static_cast<int>(etas.rows());
  if (B < 1) throw std::domain_error("global design needs at least one eta sample");
  if (etas.cols() != cands.q())
    throw std::domain_error("eta sample width does not match model size");

  std::vector<std::optional<Design>> designs(B);
  std::vector<double> qs(B, std::numeric_limits<double>::quiet_NaN());

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      int j = next.fetch_add(1);
      if (j >= B) return;
      SearchConfig sub = scfg;
      sub.seed = mix_seed(scfg.seed, 0x9e3779b9ULL + j);
      try {
        LocalResult r = local_search(cands, etas.row(j).transpose(), cfg, sub);
        designs[j] = std::move(r.design);
        qs[j] = r.q_value;
      } catch (const SingularDesign&) {
      } catch (const InfeasibleModel&) {
      }
    }
  };

  int nt = std::clamp(threads, 1, B);
  if (nt == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // Merge in sample order so the accumulation is schedule-independent.
  GlobalResult out;
  out.freq = Eigen::VectorXd::Zero(cands.size());
  out.eta_q = std::move(qs);
  long long total = 0;
  for (int j = 0; j < B; ++j) {
    if (!designs[j]) {
      ++out.failures;
      continue;
    }
    for (int c : *designs[j]) {
      out.freq[c] += 1.0;
      ++total;
    }
  }
  if (10LL * out.failures > B)
    throw InfeasibleModel("more than 10% of the eta samples failed local search");
  if (total > 0) out.freq /= static_cast<double>(total);
  return out;
}

Design sample_discrete(const Eigen::VectorXd& freq, int n, std::uint64_t seed) {
  if (n < 1) throw std::domain_error("sample size must be positive");
  if (freq.size() == 0 || freq.minCoeff() < 0.0)
    throw std::domain_error("frequencies must be non-negative");
  if (std::abs(freq.sum() - 1.0) > 1e-6)
    throw std::domain_error("frequencies must sum to one");
  Rng rng(seed);
  Design out;
  out.reserve(n);
  std::span<const double> w(freq.data(), static_cast<std::size_t>(freq.size()));
  for (int i = 0; i < n; ++i) out.push_back(rng.weighted(w));
  return out;
}

}  // namespace qqdes
