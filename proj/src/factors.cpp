#include "qqdes/factors.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace qqdes {

namespace {

constexpr double kProbClamp = 1e-12;

void check_level(FactorKind kind, int level) {
  bool ok = (kind == FactorKind::TwoLevel) ? (level == -1 || level == 1)
                                           : (level >= -1 && level <= 1);
  if (!ok) throw std::domain_error("invalid level label " + std::to_string(level));
}

}  // namespace

double code_level(FactorKind kind, int level, int comp) {
  check_level(kind, level);
  if (kind == FactorKind::TwoLevel) {
    if (comp != 0) throw std::domain_error("two-level factors have a single column");
    return static_cast<double>(level);
  }
  if (comp == 0) return level * std::sqrt(1.5);
  if (comp == 1) return level == 0 ? -std::sqrt(2.0) : std::sqrt(0.5);
  throw std::domain_error("three-level factors have two columns");
}

ModelSpec::ModelSpec(std::vector<FactorSpec> factors, std::vector<Effect> effects)
    : factors_(std::move(factors)), effects_(std::move(effects)) {
  if (factors_.empty()) throw std::domain_error("model needs at least one factor");
  if (effects_.empty()) throw std::domain_error("model needs at least one effect");
  std::set<std::string> names;
  for (const auto& f : factors_) {
    if (f.name.empty()) throw std::domain_error("factor name must be non-empty");
    if (!names.insert(f.name).second)
      throw std::domain_error("duplicate factor name " + f.name);
  }

  auto check_column = [&](const ColumnRef& ref) {
    if (ref.factor < 0 || ref.factor >= p())
      throw std::domain_error("effect references unknown factor");
    const FactorSpec& fs = factors_[ref.factor];
    if (ref.comp < 0 || ref.comp >= fs.main_columns())
      throw std::domain_error("effect references invalid column of " + fs.name);
  };

  for (auto& e : effects_) {
    switch (e.kind) {
      case Effect::Kind::Intercept:
        break;
      case Effect::Kind::Main:
        check_column(e.a);
        if (factors_[e.a.factor].kind == FactorKind::ThreeLevelQuantitative &&
            e.a.comp == 1)
          throw std::domain_error(
              "curvature of a quantitative factor is a quadratic effect, not a main effect");
        break;
      case Effect::Kind::Quadratic:
        if (e.a.factor < 0 || e.a.factor >= p() ||
            factors_[e.a.factor].kind != FactorKind::ThreeLevelQuantitative)
          throw std::domain_error("quadratic effect requires a three-level quantitative factor");
        e.a.comp = 1;
        break;
      case Effect::Kind::Interaction:
        check_column(e.a);
        check_column(e.b);
        if (e.a.factor == e.b.factor)
          throw std::domain_error("interaction must combine two distinct factors");
        for (const ColumnRef* ref : {&e.a, &e.b})
          if (factors_[ref->factor].kind == FactorKind::ThreeLevelQuantitative &&
              ref->comp != 0)
            throw std::domain_error("interactions use the linear column of quantitative factors");
        if (std::tie(e.b.factor, e.b.comp) < std::tie(e.a.factor, e.a.comp))
          std::swap(e.a, e.b);  // canonical order so a*b and b*a collide
        break;
    }
  }

  for (std::size_t i = 0; i < effects_.size(); ++i)
    for (std::size_t j = i + 1; j < effects_.size(); ++j)
      if (effects_[i] == effects_[j])
        throw std::domain_error("duplicate effect " + effect_label(static_cast<int>(i)));
}

ModelSpec ModelSpec::full_quadratic(std::vector<FactorSpec> factors) {
  std::vector<Effect> effects;
  effects.push_back(Effect::intercept());

  // Main-effect columns in factor order; quantitative factors contribute only
  // their linear column here, the curvature column is appended at the end.
  std::vector<ColumnRef> mains;
  for (int fi = 0; fi < static_cast<int>(factors.size()); ++fi) {
    const FactorSpec& f = factors[fi];
    int cols = f.kind == FactorKind::ThreeLevelCategorical ? 2 : 1;
    for (int c = 0; c < cols; ++c) mains.push_back({fi, c});
  }
  for (const auto& m : mains) effects.push_back(Effect::main(m.factor, m.comp));
  for (std::size_t i = 0; i < mains.size(); ++i)
    for (std::size_t j = i + 1; j < mains.size(); ++j)
      if (mains[i].factor != mains[j].factor)
        effects.push_back(Effect::interaction(mains[i].factor, mains[i].comp,
                                              mains[j].factor, mains[j].comp));
  for (int fi = 0; fi < static_cast<int>(factors.size()); ++fi)
    if (factors[fi].kind == FactorKind::ThreeLevelQuantitative)
      effects.push_back(Effect::quadratic(fi));

  return ModelSpec(std::move(factors), std::move(effects));
}

std::string ModelSpec::column_label(const ColumnRef& ref) const {
  const FactorSpec& f = factors_[ref.factor];
  if (f.kind == FactorKind::TwoLevel) return f.name;
  if (f.kind == FactorKind::ThreeLevelCategorical)
    return f.name + "." + std::to_string(ref.comp + 1);
  return ref.comp == 0 ? f.name + ".l" : f.name + ".q";
}

std::string ModelSpec::effect_label(int j) const {
  const Effect& e = effects_.at(j);
  switch (e.kind) {
    case Effect::Kind::Intercept:
      return "intercept";
    case Effect::Kind::Main:
      return column_label(e.a);
    case Effect::Kind::Quadratic:
      return column_label(e.a);
    case Effect::Kind::Interaction:
      return column_label(e.a) + "*" + column_label(e.b);
  }
  return {};
}

std::vector<std::string> ModelSpec::effect_labels() const {
  std::vector<std::string> out(effects_.size());
  for (int j = 0; j < q(); ++j) out[j] = effect_label(j);
  return out;
}

void ModelSpec::validate_point(const Eigen::VectorXi& point) const {
  if (point.size() != p())
    throw std::domain_error("point has wrong number of factor levels");
  for (int j = 0; j < p(); ++j) check_level(factors_[j].kind, point[j]);
}

Eigen::VectorXd ModelSpec::expand(const Eigen::VectorXi& point) const {
  validate_point(point);
  Eigen::VectorXd fx(q());
  for (int j = 0; j < q(); ++j) {
    const Effect& e = effects_[j];
    switch (e.kind) {
      case Effect::Kind::Intercept:
        fx[j] = 1.0;
        break;
      case Effect::Kind::Main:
      case Effect::Kind::Quadratic:
        fx[j] = code_level(factors_[e.a.factor].kind, point[e.a.factor], e.a.comp);
        break;
      case Effect::Kind::Interaction:
        fx[j] = code_level(factors_[e.a.factor].kind, point[e.a.factor], e.a.comp) *
                code_level(factors_[e.b.factor].kind, point[e.b.factor], e.b.comp);
        break;
    }
  }
  return fx;
}

CandidateSet full_factorial(const ModelSpec& model) {
  const auto& factors = model.factors();
  long long total = 1;
  for (const auto& f : factors) {
    total *= f.levels();
    if (total > (1LL << 20))
      throw std::domain_error("full factorial candidate set exceeds 2^20 points");
  }
  const int n = static_cast<int>(total);
  const int p = model.p();

  CandidateSet cs{model, Eigen::MatrixXi(n, p), Eigen::MatrixXd(n, model.q())};
  for (int i = 0; i < n; ++i) {
    int rem = i;
    for (int j = 0; j < p; ++j) {
      int s = factors[j].levels();
      int li = rem % s;
      rem /= s;
      cs.levels(i, j) = (s == 2) ? (li == 0 ? -1 : 1) : (li - 1);
    }
    cs.f.row(i) = model.expand(cs.levels.row(i)).transpose();
  }
  return cs;
}

Eigen::VectorXd design_frequencies(const Design& design, int num_candidates) {
  Eigen::VectorXd freq = Eigen::VectorXd::Zero(num_candidates);
  for (int idx : design) {
    if (idx < 0 || idx >= num_candidates)
      throw std::out_of_range("design index outside candidate set");
    freq[idx] += 1.0;
  }
  if (!design.empty()) freq /= static_cast<double>(design.size());
  return freq;
}

std::vector<int> distinct_points(const Design& design) {
  std::vector<int> out(design);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double link_prob(double t, Link link) {
  double pi;
  if (link == Link::Logit) {
    // Evaluate through exp(-|t|) so neither branch overflows.
    pi = t >= 0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
  } else {
    pi = 0.5 * std::erfc(-t / std::sqrt(2.0));
  }
  return std::clamp(pi, kProbClamp, 1.0 - kProbClamp);
}

GlmWeights glm_weights(double t, Link link) {
  double pi = link_prob(t, link);
  GlmWeights w{0.0, pi, 1.0 - pi};
  if (link == Link::Logit) {
    w.w0 = pi * (1.0 - pi);
  } else {
    double phi = std::exp(-0.5 * t * t) / std::sqrt(2.0 * M_PI);
    w.w0 = phi * phi / (pi * (1.0 - pi));
  }
  return w;
}

CandidateWeights candidate_weights(const CandidateSet& cands,
                                   const Eigen::VectorXd& eta, Link link) {
  if (eta.size() != cands.q())
    throw std::domain_error("eta length does not match model size");
  Eigen::VectorXd t = cands.f * eta;
  CandidateWeights cw{Eigen::VectorXd(cands.size()), Eigen::VectorXd(cands.size())};
  for (int i = 0; i < cands.size(); ++i) {
    GlmWeights w = glm_weights(t[i], link);
    cw.pi[i] = w.w1;
    cw.w0[i] = w.w0;
  }
  return cw;
}

}  // namespace qqdes
