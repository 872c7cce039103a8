#include "qqdes/experiment.hpp"

#include <fstream>
#include <map>

#include <json.hpp>

namespace qqdes {

using nlohmann::json;

namespace {

FactorKind parse_kind(const std::string& s) {
  if (s == "two_level") return FactorKind::TwoLevel;
  if (s == "three_level_categorical") return FactorKind::ThreeLevelCategorical;
  if (s == "three_level_quantitative") return FactorKind::ThreeLevelQuantitative;
  throw std::domain_error("unknown factor type '" + s + "'");
}

Link parse_link(const std::string& s) {
  if (s == "logit") return Link::Logit;
  if (s == "probit") return Link::Probit;
  throw std::domain_error("unknown link '" + s + "'");
}

int factor_index(const std::map<std::string, int>& by_name, const json& j,
                 const char* key) {
  std::string name = j.at(key).get<std::string>();
  auto it = by_name.find(name);
  if (it == by_name.end()) throw std::domain_error("unknown factor '" + name + "'");
  return it->second;
}

std::vector<Effect> parse_effects(const json& j,
                                  const std::vector<FactorSpec>& factors) {
  std::map<std::string, int> by_name;
  for (std::size_t i = 0; i < factors.size(); ++i)
    by_name[factors[i].name] = static_cast<int>(i);

  std::vector<Effect> effects;
  for (const auto& e : j) {
    std::string kind = e.at("effect").get<std::string>();
    if (kind == "intercept") {
      effects.push_back(Effect::intercept());
    } else if (kind == "main") {
      effects.push_back(Effect::main(factor_index(by_name, e, "factor"),
                                     e.value("comparison", 0)));
    } else if (kind == "quadratic") {
      effects.push_back(Effect::quadratic(factor_index(by_name, e, "factor")));
    } else if (kind == "interaction") {
      const json& a = e.at("a");
      const json& b = e.at("b");
      effects.push_back(Effect::interaction(
          factor_index(by_name, a, "factor"), a.value("comparison", 0),
          factor_index(by_name, b, "factor"), b.value("comparison", 0)));
    } else {
      throw std::domain_error("unknown effect kind '" + kind + "'");
    }
  }
  return effects;
}

Eigen::VectorXd parse_bounds(const json& j, int q, const char* what) {
  Eigen::VectorXd v(q);
  if (j.is_number()) {
    v.setConstant(j.get<double>());
  } else {
    if (static_cast<int>(j.size()) != q)
      throw std::domain_error(std::string(what) + " must be a scalar or an array of length q");
    for (int i = 0; i < q; ++i) v[i] = j.at(i).get<double>();
  }
  return v;
}

}  // namespace

CriterionConfig ExperimentConfig::criterion() const {
  CriterionConfig cfg;
  cfg.link = link;
  cfg.rho = rho;
  cfg.rho0 = rho0;
  const int q = model.q();
  if (rho > 0.0) {
    cfg.r1_inv = correlation_matrix(model, r1)
                     .llt()
                     .solve(Eigen::MatrixXd::Identity(q, q));
    cfg.r2_inv = correlation_matrix(model, r2)
                     .llt()
                     .solve(Eigen::MatrixXd::Identity(q, q));
  }
  if (rho0 > 0.0) {
    if (eta_prior.kind == EtaPrior::Kind::NormalDiag)
      cfg.r0_inv = eta_prior.r0_diag.cwiseInverse().asDiagonal();
    else
      cfg.r0_inv = Eigen::MatrixXd::Identity(q, q);
  }
  return cfg;
}

ExperimentConfig load_experiment(const std::string& json_path) {
  std::ifstream in(json_path);
  if (!in) throw std::runtime_error("cannot open " + json_path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error(json_path + ": " + e.what());
  }

  try {
    std::vector<FactorSpec> factors;
    for (const auto& f : j.at("factors"))
      factors.push_back(
          {f.at("name").get<std::string>(), parse_kind(f.at("type").get<std::string>())});

    ModelSpec model = [&]() {
      const json& m = j.at("model");
      if (m.is_string()) {
        if (m.get<std::string>() != "full_quadratic")
          throw std::domain_error("unknown model shorthand '" + m.get<std::string>() + "'");
        return ModelSpec::full_quadratic(factors);
      }
      return ModelSpec(factors, parse_effects(m, factors));
    }();

    ExperimentConfig cfg(std::move(model));
    cfg.link = parse_link(j.value("link", "logit"));
    cfg.rho = j.value("rho", 0.0);
    cfg.r1 = j.value("r1", 1.0 / 3.0);
    cfg.r2 = j.value("r2", 1.0 / 3.0);
    cfg.rho0 = j.value("rho0", 0.0);

    const int q = cfg.model.q();
    if (j.contains("eta_prior")) {
      const json& p = j.at("eta_prior");
      std::string type = p.value("type", "uniform_box");
      if (type == "uniform_box") {
        cfg.eta_prior.kind = EtaPrior::Kind::UniformBox;
        cfg.eta_prior.lower = parse_bounds(p.at("lower"), q, "eta_prior.lower");
        cfg.eta_prior.upper = parse_bounds(p.at("upper"), q, "eta_prior.upper");
      } else if (type == "normal_diag") {
        cfg.eta_prior.kind = EtaPrior::Kind::NormalDiag;
        cfg.eta_prior.tau0_sq = p.at("tau0_sq").get<double>();
        cfg.eta_prior.r0_diag = p.contains("r0_diag")
                                    ? parse_bounds(p.at("r0_diag"), q, "eta_prior.r0_diag")
                                    : Eigen::VectorXd::Ones(q);
      } else {
        throw std::domain_error("unknown eta prior type '" + type + "'");
      }
    } else {
      cfg.eta_prior.kind = EtaPrior::Kind::UniformBox;
      cfg.eta_prior.lower = Eigen::VectorXd::Constant(q, -1.0);
      cfg.eta_prior.upper = Eigen::VectorXd::Constant(q, 1.0);
    }

    std::string sampling = j.value("eta_sampling", "maximin_lhs");
    if (sampling == "maximin_lhs")
      cfg.sampling = EtaSampling::MaximinLhs;
    else if (sampling == "iid_uniform")
      cfg.sampling = EtaSampling::IidUniform;
    else
      throw std::domain_error("unknown eta sampling '" + sampling + "'");
    cfg.lhs_restarts = j.value("lhs_restarts", 20);

    if (j.contains("search")) {
      const json& s = j.at("search");
      cfg.search.n = s.value("n", 0);
      cfg.search.restarts = s.value("restarts", 10);
      cfg.search.max_iterations = s.value("max_iterations", 0LL);
      cfg.search.no_improve_window = s.value("no_improve_window", 0LL);
      if (s.contains("pi_filter")) {
        const json& f = s.at("pi_filter");
        if (f.size() != 2) throw std::domain_error("pi_filter must be [lo, hi]");
        cfg.search.filter_lo = f.at(0).get<double>();
        cfg.search.filter_hi = f.at(1).get<double>();
      }
      cfg.search.kappa_init = s.value("kappa_init", 0.5);
      cfg.search.seed = s.value("seed", 1ULL);
    }
    cfg.budget = j.value("B", 500);
    cfg.threads = j.value("threads", 1);

    if (cfg.eta_prior.dim() != q)
      throw std::domain_error("eta prior dimension does not match the model");
    return cfg;
  } catch (const json::exception& e) {
    throw std::runtime_error(json_path + ": " + e.what());
  }
}

}  // namespace qqdes
