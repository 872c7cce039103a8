#pragma once

#include <cstdint>
#include <string>

#include "qqdes/criterion.hpp"
#include "qqdes/factors.hpp"
#include "qqdes/prior.hpp"
#include "qqdes/search.hpp"

namespace qqdes {

/// Everything a run needs, parsed from one JSON experiment file: the model,
/// the criterion parameters, the coefficient prior and the search settings.
struct ExperimentConfig {
  explicit ExperimentConfig(ModelSpec m) : model(std::move(m)) {}

  ModelSpec model;
  Link link = Link::Logit;
  double rho = 0.0;
  double r1 = 1.0 / 3.0;
  double r2 = 1.0 / 3.0;
  double rho0 = 0.0;
  EtaPrior eta_prior;
  EtaSampling sampling = EtaSampling::MaximinLhs;
  int lhs_restarts = 20;
  SearchConfig search;
  int budget = 500;  // eta draws for a global design
  int threads = 1;

  /// Criterion with the inverse prior correlation matrices materialized.
  CriterionConfig criterion() const;
};

ExperimentConfig load_experiment(const std::string& json_path);

}  // namespace qqdes
