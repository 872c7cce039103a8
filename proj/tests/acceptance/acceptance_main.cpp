// End-to-end acceptance gate.  Ten numbered checks, each printing one
// [PASS]/[FAIL] line with its runtime; the exit status is the number of
// failed checks.  Tolerances are pinned inside the check bodies; supporting
// numbers are printed indented above the verdict line.

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "qqdes/criterion.hpp"
#include "qqdes/errors.hpp"
#include "qqdes/experiment.hpp"
#include "qqdes/factors.hpp"
#include "qqdes/prior.hpp"
#include "qqdes/rng.hpp"
#include "qqdes/run_bounds.hpp"
#include "qqdes/search.hpp"
#include "../test_support.hpp"

using namespace qqdes;

namespace {

int g_failures = 0;

void run_check(int id, const char* label,
               const std::function<bool(std::string&)>& fn) {
  auto t0 = std::chrono::steady_clock::now();
  std::string detail;
  bool ok = false;
  try {
    ok = fn(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::string suffix = detail.empty() ? "" : "  [" + detail + "]";
  std::printf("[%s] %2d %s (%.2f s)%s\n", ok ? "PASS" : "FAIL", id, label, secs,
              suffix.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// information matrix F'WF + ridge assembled the slow, obvious way
Eigen::MatrixXd info_matrix(const CandidateSet& cands, const Design& design,
                            const Eigen::VectorXd& eta, int which,
                            const CriterionConfig& cfg) {
  int q = cands.q();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(q, q);
  for (int run : design) {
    double t = cands.f.row(run).dot(eta);
    GlmWeights w = glm_weights(t, cfg.link);
    double wi = which == 0 ? w.w0 : (which == 1 ? w.w1 : w.w2);
    a += wi * cands.f.row(run).transpose() * cands.f.row(run);
  }
  if (which == 0 && cfg.rho0 > 0) a += cfg.rho0 * cfg.r0_inv;
  if (which == 1 && cfg.rho > 0) a += cfg.rho * cfg.r1_inv;
  if (which == 2 && cfg.rho > 0) a += cfg.rho * cfg.r2_inv;
  return a;
}

struct DemoSetup {
  ModelSpec model;
  CandidateSet cands;
  Eigen::VectorXd eta;
  CriterionConfig c0;  // no ridge
  CriterionConfig c3;  // rho = 0.3 with the hierarchy prior at r = 1/3
};

DemoSetup demo_setup() {
  ModelSpec model = testsupport::demo_model();
  CandidateSet cands = full_factorial(model);
  DemoSetup s{std::move(model), std::move(cands), testsupport::demo_eta(), {}, {}};
  Eigen::MatrixXd r_inv = correlation_matrix(s.model, 1.0 / 3).inverse();
  s.c3.rho = 0.3;
  s.c3.r1_inv = r_inv;
  s.c3.r2_inv = r_inv;
  return s;
}

// random problem generator for the incremental-vs-scratch sweep; the last
// pool entry is the five-factor demo model so the sweep reaches q=22, N=72
struct Problem {
  ModelSpec model;
  CandidateSet cands;
  Eigen::VectorXd eta;
  Design design;
  CriterionConfig cfg;
};

Problem random_problem(Rng& rng) {
  static const std::vector<std::vector<FactorSpec>> pools = {
      {{"a", FactorKind::TwoLevel}, {"b", FactorKind::TwoLevel}},
      {{"a", FactorKind::ThreeLevelQuantitative}},
      {{"a", FactorKind::TwoLevel}, {"b", FactorKind::ThreeLevelCategorical}},
      {{"a", FactorKind::ThreeLevelQuantitative}, {"b", FactorKind::TwoLevel}},
      {{"a", FactorKind::ThreeLevelCategorical},
       {"b", FactorKind::ThreeLevelQuantitative}},
      {{"x1", FactorKind::TwoLevel},
       {"x2", FactorKind::TwoLevel},
       {"x3", FactorKind::TwoLevel},
       {"x4", FactorKind::ThreeLevelCategorical},
       {"x5", FactorKind::ThreeLevelQuantitative}},
  };
  ModelSpec model = ModelSpec::full_quadratic(pools[rng.index(pools.size())]);
  CandidateSet cands = full_factorial(model);
  Problem p{std::move(model), std::move(cands), {}, {}, {}};
  const int q = p.model.q();

  p.eta.resize(q);
  for (int j = 0; j < q; ++j) p.eta[j] = rng.uniform(-0.9, 0.9);

  if (rng.uniform() < 0.5) {
    p.cfg.rho = 0.05 + 0.5 * rng.uniform();
    Eigen::MatrixXd r = correlation_matrix(p.model, 1.0 / 3);
    p.cfg.r1_inv = r.inverse();
    p.cfg.r2_inv = r.inverse();
  }

  const int n = q + 1 + rng.index(8);
  for (int attempt = 0; attempt < 60; ++attempt) {
    p.design.clear();
    for (int i = 0; i < n; ++i) p.design.push_back(rng.index(p.cands.size()));
    try {
      q_value(p.cands, p.design, p.eta, p.cfg);
      return p;
    } catch (const SingularDesign&) {
    }
  }
  p.design.clear();
  for (int i = 0; i < p.cands.size(); ++i) p.design.push_back(i);
  return p;
}

// ---- the ten checks ------------------------------------------------------

bool check_replication_bounds(std::string& detail) {
  // line model f = (1, x) with unit coefficients: predictors 0, 1, 2
  std::vector<double> pi;
  for (double t : {0.0, 1.0, 2.0}) pi.push_back(link_prob(t, Link::Logit));

  ReplicationBounds half = replication_bounds(pi, 0.5);
  ReplicationBounds ninety = replication_bounds(pi, 0.9);
  bool ok = half.sufficient == std::vector<long long>{2, 4, 7} &&
            ninety.sufficient == std::vector<long long>{5, 9, 20};
  detail = fmt("kappa 0.5 -> (%g, %g, %g)", double(half.sufficient[0]),
               double(half.sufficient[1]), double(half.sufficient[2]));
  return ok;
}

bool check_support_bounds(std::string& detail) {
  DemoSetup s = demo_setup();
  Design ref = testsupport::load_reference_design(s.cands, "d_qq_rho0");
  std::vector<int> pts = distinct_points(ref);

  std::vector<double> pi(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    pi[i] = link_prob(s.cands.f.row(pts[i]).dot(s.eta), Link::Logit);
  auto [lo, hi] = std::minmax_element(pi.begin(), pi.end());
  SupportBounds sb = support_bounds(static_cast<long long>(pts.size()),
                                    s.model.q(), *lo, *hi);

  detail = fmt("m=%g: n0 sufficient %g, necessary %g", double(pts.size()),
               double(sb.n0_sufficient), double(sb.n0_necessary));
  return sb.n0_sufficient == 7 && sb.n0_necessary == 1;
}

bool check_failure_probability(std::string& detail) {
  // line model at its high point with unit coefficients
  double miss = 1.0 - link_prob(2.0, Link::Logit);
  detail = fmt("1 - pi = %.4f", miss);
  return std::abs(miss - 0.12) < 0.005;
}

bool check_efficiency_table(std::string& detail) {
  DemoSetup s = demo_setup();
  SearchConfig scfg;
  scfg.n = 66;
  scfg.restarts = 10;
  scfg.filter_lo = 0.0;  // the reference designs use the full candidate list
  scfg.filter_hi = 1.0;
  scfg.seed = 20240501;

  Design qq0 = local_search(s.cands, s.eta, s.c0, scfg).design;
  Design qq3 = local_search(s.cands, s.eta, s.c3, scfg).design;
  Design dl = baseline_design(BaselineKind::LinearD, s.cands, 66, s.eta,
                              Link::Logit, scfg);
  Design dg = baseline_design(BaselineKind::GlmLocalD, s.cands, 66, s.eta,
                              Link::Logit, scfg);
  Design dc = combined_design(s.cands, 44, 22, s.eta, Link::Logit, scfg);

  const Design* alts[3] = {&dl, &dg, &dc};
  double e0[3], e3[3];
  for (int k = 0; k < 3; ++k) {
    e0[k] = efficiency(s.cands, qq0, *alts[k], s.eta, s.c0);
    e3[k] = efficiency(s.cands, qq3, *alts[k], s.eta, s.c3);
  }
  const double want0[3] = {1.08, 1.11, 1.05};
  const double want3[3] = {1.10, 1.14, 1.07};

  bool within = true, above = true;
  double worst = 0;
  for (int k = 0; k < 3; ++k) {
    worst = std::max({worst, std::abs(e0[k] - want0[k]), std::abs(e3[k] - want3[k])});
    within = within && std::abs(e0[k] - want0[k]) <= 0.05 &&
             std::abs(e3[k] - want3[k]) <= 0.05;
    above = above && e0[k] > 1.0 && e3[k] > 1.0;
  }
  std::printf("        rho 0.0 efficiencies vs (linear, logistic, combined): "
              "%.3f %.3f %.3f, reference (1.08, 1.11, 1.05)\n", e0[0], e0[1], e0[2]);
  std::printf("        rho 0.3 efficiencies vs (linear, logistic, combined): "
              "%.3f %.3f %.3f, reference (1.10, 1.14, 1.07)\n", e3[0], e3[1], e3[2]);

  // supplementary: the same comparison evaluated on the bundled designs;
  // the reference rows match them only with the first two columns swapped,
  // so both readings are printed
  Design bq0 = testsupport::load_reference_design(s.cands, "d_qq_rho0");
  Design bq3 = testsupport::load_reference_design(s.cands, "d_qq_rho03");
  Design bl = testsupport::load_reference_design(s.cands, "d_l");
  Design bg = testsupport::load_reference_design(s.cands, "d_g");
  Design bc = testsupport::load_reference_design(s.cands, "d_c");
  const Design* balts[3] = {&bl, &bg, &bc};
  double direct = 0, swapped = 0;
  for (int k = 0; k < 3; ++k) {
    double b0 = efficiency(s.cands, bq0, *balts[k], s.eta, s.c0);
    double b3 = efficiency(s.cands, bq3, *balts[k], s.eta, s.c3);
    int ks = k == 2 ? 2 : 1 - k;  // swap the first two columns
    direct = std::max({direct, std::abs(b0 - want0[k]), std::abs(b3 - want3[k])});
    swapped = std::max({swapped, std::abs(b0 - want0[ks]), std::abs(b3 - want3[ks])});
  }
  std::printf("        bundled-design efficiencies: max |diff| %.3f as printed, "
              "%.3f with the first two columns swapped\n", direct, swapped);

  detail = fmt("max |diff| %.3f (tol 0.05)", worst) +
           std::string(above ? ", all six above 1" : ", NOT all above 1");
  return within && above;
}

bool check_incremental_updates(std::string& detail) {
  Rng rng(20240815);
  const double tol = 1e-8;
  double worst = 0;
  int n_ex = 0, n_del = 0, n_rem = 0;
  bool edges_agree = true;

  while (n_ex < 1000 || n_del < 1000 || n_rem < 1000) {
    Problem p = random_problem(rng);
    CriterionState st(p.cands, p.design, p.eta, p.cfg);
    const double base = st.q();

    for (int rep = 0; rep < 4; ++rep) {
      int run = rng.index(p.design.size());
      int cand = rng.index(p.cands.size());
      double delta = st.exchange_delta(cand, run);
      Design swapped = p.design;
      swapped[run] = cand;
      ++n_ex;
      try {
        double scratch = q_value(p.cands, swapped, p.eta, p.cfg);
        if (delta == -CriterionState::kInf)
          edges_agree = edges_agree && scratch < base - 1.0;
        else
          worst = std::max(worst,
                           std::abs(delta - (scratch - base)) / (1 + std::abs(base)));
      } catch (const SingularDesign&) {
        edges_agree = edges_agree && delta < -20.0;
      }
    }

    for (int rep = 0; rep < 2; ++rep) {
      int run = rng.index(p.design.size());
      double d = st.deletion_value(run);
      Design reduced = p.design;
      reduced.erase(reduced.begin() + run);
      ++n_del;
      try {
        double scratch = q_value(p.cands, reduced, p.eta, p.cfg);
        if (d == CriterionState::kInf) {
          edges_agree = false;  // scratch says removable, state says not
        } else {
          worst = std::max(worst,
                           std::abs(d - (base - scratch)) / (1 + std::abs(base)));
        }
      } catch (const SingularDesign&) {
        edges_agree = edges_agree && d > 20.0;
      }
    }

    {  // remove_point mutates the state, so it goes last
      int run = rng.index(p.design.size());
      double d = st.deletion_value(run);
      if (std::isfinite(d) && d < 20.0) {
        Design reduced = p.design;
        reduced.erase(reduced.begin() + run);
        double scratch = q_value(p.cands, reduced, p.eta, p.cfg);
        st.remove_point(run);
        worst = std::max(worst,
                         std::abs(st.q() - scratch) / (1 + std::abs(scratch)));
        ++n_rem;
      }
    }
  }

  // long exchange walk on the demo model: the tracked inverses must stay
  // glued to direct inversion through a thousand rank-one update pairs
  DemoSetup s = demo_setup();
  Rng walk(20240509);
  Design d;
  for (int i = 0; i < s.cands.size(); ++i) d.push_back(i);
  CriterionState st(s.cands, d, s.eta, s.c3);
  double drift = 0;
  int applied = 0;
  while (applied < 1000) {
    int run = walk.index(st.design().size());
    int cand = walk.index(s.cands.size());
    double delta = st.exchange_delta(cand, run);
    if (delta == -CriterionState::kInf || delta < -4.0) continue;
    st.apply_exchange(cand, run);
    if (++applied % 250 == 0) {
      for (int j = 0; j < 3; ++j) {
        Eigen::MatrixXd direct =
            info_matrix(s.cands, st.design(), s.eta, j, s.c3).inverse();
        drift = std::max(drift, (st.m(j) - direct).cwiseAbs().maxCoeff());
      }
    }
  }

  detail = fmt("worst scaled error %.2e over %g comparisons", worst,
               double(n_ex + n_del + n_rem)) +
           fmt(", walk drift %.2e", drift);
  return worst <= tol && edges_agree && drift <= 1e-6;
}

bool check_bruteforce_optimum(std::string& detail) {
  ModelSpec m({{"x", FactorKind::ThreeLevelQuantitative}},
              {Effect::intercept(), Effect::main(0)});
  CandidateSet cands = full_factorial(m);
  CriterionConfig cfg;
  Rng rng(606060);

  // all size-n multisets over the three candidates
  auto enumerate = [&](int n, const Eigen::VectorXd& eta) {
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a <= n; ++a)
      for (int b = 0; a + b <= n; ++b) {
        Design d;
        d.insert(d.end(), a, 0);
        d.insert(d.end(), b, 1);
        d.insert(d.end(), n - a - b, 2);
        try {
          best = std::max(best, q_value(cands, d, eta, cfg));
        } catch (const SingularDesign&) {
        }
      }
    return best;
  };

  double worst = 0;
  for (int n : {3, 4, 5}) {
    for (int rep = 0; rep < 20; ++rep) {
      Eigen::VectorXd eta(2);
      eta << rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0);
      double best = enumerate(n, eta);

      SearchConfig scfg;
      scfg.n = n;
      scfg.restarts = 8;
      scfg.filter_lo = 0.0;
      scfg.filter_hi = 1.0;
      scfg.seed = 7000 + n * 100 + rep;
      LocalResult res = local_search(cands, eta, cfg, scfg);
      worst = std::max(worst, std::abs(res.q_value - best) / (1 + std::abs(best)));
    }
  }
  detail = fmt("worst gap %.2e over 60 searches", worst);
  return worst <= 1e-10;
}

bool check_outcome_bound(std::string& detail) {
  // MC average of logdet(F'VF + ridge) with V = diag(z) or diag(1-z),
  // z ~ Bernoulli(pi), must not exceed the logdet at V's expectation.
  // Models have more candidates than effects so that at rho = 0 the
  // conditional mean (given a nonsingular draw) is actually estimable.
  const std::vector<ModelSpec> models = {
      ModelSpec({{"a", FactorKind::ThreeLevelQuantitative}},
                {Effect::intercept(), Effect::main(0)}),
      ModelSpec({{"a", FactorKind::TwoLevel}, {"b", FactorKind::TwoLevel}},
                {Effect::intercept(), Effect::main(0), Effect::main(1)}),
      ModelSpec({{"a", FactorKind::TwoLevel},
                 {"b", FactorKind::TwoLevel},
                 {"c", FactorKind::TwoLevel}},
                {Effect::intercept(), Effect::main(0), Effect::main(1),
                 Effect::main(2)}),
  };
  Rng rng(91);
  double worst_excess = -1e9;
  for (int trial = 0; trial < 5; ++trial) {
    const ModelSpec& model = models[rng.index(models.size())];
    CandidateSet cands = full_factorial(model);
    const int q = model.q();
    Eigen::VectorXd eta(q);
    Design d;
    CandidateWeights cw;

    // accept a (design, eta) pair once a pilot shows the conditioned rho = 0
    // case keeps most draws; the bound holds for every design, but a design
    // that is singular on most draws cannot be measured
    bool found = false;
    for (int attempt = 0; attempt < 40 && !found; ++attempt) {
      for (int j = 0; j < q; ++j) eta[j] = rng.uniform(-0.5, 0.5);
      const int lo = std::max(2 * q, 8);
      int n = lo + rng.index(12 - lo + 1);
      // full coverage once, then random fill: losing a whole factor level to
      // the z-thinning would otherwise dominate the singular-draw rate
      d.clear();
      for (int i = 0; i < cands.size() && static_cast<int>(d.size()) < n; ++i)
        d.push_back(i);
      while (static_cast<int>(d.size()) < n) d.push_back(rng.index(cands.size()));
      try {
        q_value(cands, d, eta, CriterionConfig{});
      } catch (const SingularDesign&) {
        continue;
      }
      cw = candidate_weights(cands, eta, Link::Logit);
      // the main run conditions each block separately, so the pilot does too
      int survived[2] = {0, 0};
      const int pilot = 400;
      for (int rep = 0; rep < pilot; ++rep) {
        for (int which : {1, 2}) {
          Eigen::MatrixXd a = Eigen::MatrixXd::Zero(q, q);
          for (int run : d) {
            bool z = rng.uniform() < cw.pi[run];
            if (which == 1 ? z : !z)
              a += cands.f.row(run).transpose() * cands.f.row(run);
          }
          if (Eigen::LLT<Eigen::MatrixXd>(a).info() == Eigen::Success)
            ++survived[which - 1];
        }
      }
      found = std::min(survived[0], survived[1]) >= pilot * 13 / 20;
    }
    if (!found) {
      detail = "no measurable design found";
      return false;
    }
    Eigen::MatrixXd r_inv = correlation_matrix(model, 1.0 / 3).inverse();

    for (double rho : {0.0, 0.3}) {
      CriterionConfig cfg;
      cfg.rho = rho;
      cfg.r1_inv = r_inv;
      cfg.r2_inv = r_inv;
      const int draws = 10000;
      for (int which : {1, 2}) {
        double bound = std::log(info_matrix(cands, d, eta, which, cfg).determinant());
        double sum = 0, sumsq = 0;
        int kept = 0;
        for (int rep = 0; rep < draws; ++rep) {
          Eigen::MatrixXd a = Eigen::MatrixXd::Zero(q, q);
          if (rho > 0) a += rho * r_inv;
          for (int run : d) {
            bool z = rng.uniform() < cw.pi[run];
            if (which == 1 ? z : !z)
              a += cands.f.row(run).transpose() * cands.f.row(run);
          }
          Eigen::LLT<Eigen::MatrixXd> llt(a);
          if (llt.info() != Eigen::Success) continue;  // rho = 0 singular draw
          double ld = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
          sum += ld;
          sumsq += ld * ld;
          ++kept;
        }
        if (kept <= draws / 2) {
          detail = "conditioning lost too many draws";
          return false;
        }
        double mean = sum / kept;
        double var = (sumsq - kept * mean * mean) / (kept - 1);
        double se = std::sqrt(var / kept);
        worst_excess = std::max(worst_excess, (mean - bound) / se);
        if (mean > bound + 3 * se) {
          detail = fmt("violated: mean - bound = %.3f, se = %.3f", mean - bound, se);
          return false;
        }
      }
    }
  }
  detail = fmt("largest (mean - bound)/se = %.2f (limit 3)", worst_excess);
  return true;
}

bool check_prior_structure(std::string& detail) {
  ModelSpec two({{"a", FactorKind::TwoLevel}, {"b", FactorKind::TwoLevel}},
                {Effect::intercept(), Effect::main(0), Effect::main(1),
                 Effect::interaction(0, 1)});
  Eigen::MatrixXd r = correlation_matrix(two, 1.0 / 3);
  Eigen::Vector4d want(1.0, 1.0 / 3, 1.0 / 3, 1.0 / 9);
  if ((r - want.asDiagonal().toDenseMatrix()).cwiseAbs().maxCoeff() > 1e-12)
    return false;

  static const std::vector<std::vector<FactorSpec>> pools = {
      {{"a", FactorKind::TwoLevel}, {"b", FactorKind::TwoLevel}},
      {{"a", FactorKind::ThreeLevelQuantitative}},
      {{"a", FactorKind::TwoLevel}, {"b", FactorKind::ThreeLevelCategorical}},
      {{"a", FactorKind::ThreeLevelCategorical},
       {"b", FactorKind::ThreeLevelQuantitative}},
  };
  Rng rng(4711);
  for (int trial = 0; trial < 100; ++trial) {
    ModelSpec model = ModelSpec::full_quadratic(pools[rng.index(pools.size())]);
    double rr = 0.01 + 0.99 * rng.uniform();
    Eigen::MatrixXd rm = correlation_matrix(model, rr);
    if (rm(0, 0) != 1.0) return false;
    Eigen::LLT<Eigen::MatrixXd> llt(rm);
    if (llt.info() != Eigen::Success) return false;
  }

  // r = 1 means no decay at all: identity for models on two-level factors
  ModelSpec flat = ModelSpec::full_quadratic(
      {{"a", FactorKind::TwoLevel}, {"b", FactorKind::TwoLevel}});
  Eigen::MatrixXd id = correlation_matrix(flat, 1.0);
  detail = "pinned diagonal, 100 random PD, no-decay identity";
  return (id - Eigen::MatrixXd::Identity(id.rows(), id.cols()))
             .cwiseAbs()
             .maxCoeff() <= 1e-12;
}

bool check_global_pattern(std::string& detail) {
  ExperimentConfig cfg = load_experiment(testsupport::data_path("artificial.json"));
  CandidateSet cands = full_factorial(cfg.model);
  Eigen::MatrixXd etas = sample_eta(cfg.eta_prior, 50, cfg.sampling,
                                    mix_seed(cfg.search.seed, 0xe7a5),
                                    cfg.lhs_restarts);
  GlobalResult res = global_design(cands, etas, cfg.criterion(), cfg.search, 1);

  auto mean_freq = [&](int factor, bool center) {
    double sum = 0;
    int count = 0;
    for (int i = 0; i < cands.size(); ++i) {
      bool is_center = cands.levels(i, factor) == 0;
      if (is_center == center) {
        sum += res.freq[i];
        ++count;
      }
    }
    return sum / count;
  };
  double quant_center = mean_freq(4, true), quant_edge = mean_freq(4, false);
  double cat_center = mean_freq(3, true), cat_edge = mean_freq(3, false);
  double quant_gap = quant_edge - quant_center;
  double cat_gap = std::abs(cat_edge - cat_center);

  std::printf("        mean frequency by level of the quantitative factor: "
              "center %.5f, edges %.5f\n", quant_center, quant_edge);
  std::printf("        mean frequency by level of the categorical factor:  "
              "center %.5f, edges %.5f\n", cat_center, cat_edge);
  detail = fmt("quantitative gap %.5f, categorical gap %.5f", quant_gap, cat_gap) +
           fmt(", %g failed samples", double(res.failures));
  return quant_center < quant_edge && cat_gap <= quant_gap / 3.0;
}

bool check_prior_dominance(std::string& detail) {
  // at every draw BOTH designs are rebuilt for that draw, then compared
  // there; the 5% slack absorbs occasional local-search misses
  DemoSetup s = demo_setup();
  ExperimentConfig cfg = load_experiment(testsupport::data_path("artificial.json"));
  Eigen::MatrixXd etas = sample_eta(cfg.eta_prior, 20, EtaSampling::MaximinLhs,
                                    mix_seed(20240501, 0xd00d), 20);
  SearchConfig scfg;
  scfg.n = 66;
  scfg.restarts = 10;
  scfg.filter_lo = 0.0;
  scfg.filter_hi = 1.0;

  int above = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < etas.rows(); ++i) {
    Eigen::VectorXd eta = etas.row(i).transpose();
    scfg.seed = mix_seed(20240501, 100 + i);
    Design qq = local_search(s.cands, eta, s.c0, scfg).design;
    Design dc = combined_design(s.cands, 44, 22, eta, Link::Logit, scfg);
    double e = efficiency(s.cands, qq, dc, eta, s.c0);
    above += e > 1.0;
    worst = std::min(worst, e);
  }
  detail = fmt("%g of 20 draws above 1, worst %.4f", double(above), worst);
  return above >= 19;
}

}  // namespace

int main() {
  run_check(1, "per-point replication bounds match the pinned values",
            check_replication_bounds);
  run_check(2, "support run-size bounds on the bundled design give (7, 1)",
            check_support_bounds);
  run_check(3, "high-point failure probability is 0.12 to two decimals",
            check_failure_probability);
  run_check(4, "desk-scale efficiency table within +/-0.05 of the reference",
            check_efficiency_table);
  run_check(5, "incremental updates agree with scratch recomputation",
            check_incremental_updates);
  run_check(6, "exchange search attains the brute-force optimum",
            check_bruteforce_optimum);
  run_check(7, "simulated-outcome information stays below the weight bound",
            check_outcome_bound);
  run_check(8, "prior correlation: pinned diagonal, PD, no-decay identity",
            check_prior_structure);
  run_check(9, "global design concentrates on quantitative extremes",
            check_global_pattern);
  run_check(10, "local design beats the combined baseline across the prior",
            check_prior_dominance);

  if (g_failures == 0)
    std::printf("all 10 acceptance checks passed\n");
  else
    std::printf("%d of 10 acceptance checks FAILED\n", g_failures);
  return g_failures;
}
