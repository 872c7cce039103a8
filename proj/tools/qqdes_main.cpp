// Command line front end: builds candidate sets, run-size bounds, local and
// global designs, baseline designs, efficiencies and design draws from a JSON
// experiment file.  Exit codes: 0 success, 2 configuration or input error,
// 3 numerical infeasibility.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "qqdes/experiment.hpp"
#include "qqdes/io.hpp"
#include "qqdes/run_bounds.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qqdes;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct CommonArgs {
  std::string config;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("-c,--config", args.config, "experiment JSON file")->required();
  cmd->add_option("--seed", args.seed, "override the search seed")
      ->each([&args](const std::string&) { args.seed_set = true; });
  cmd->add_option("--threads", args.threads, "worker threads for global accumulation");
}

ExperimentConfig load(const CommonArgs& args) {
  ExperimentConfig cfg = load_experiment(args.config);
  if (args.seed_set) cfg.search.seed = args.seed;
  if (args.threads > 0) cfg.threads = args.threads;
  return cfg;
}

Eigen::VectorXd first_eta(const std::string& path, int q) {
  Eigen::MatrixXd etas = read_eta_csv(path, q);
  return etas.row(0).transpose();
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

double run_seconds(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json design_report(const CandidateSet& cands, const Design& design, double q) {
  json rep;
  rep["n"] = design.size();
  rep["q_value"] = q;
  rep["distinct_points"] = distinct_points(design).size();
  return rep;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian D-optimal designs for a paired continuous and binary response"};
  app.require_subcommand(1);

  CommonArgs args;

  auto* cmd_candidates = app.add_subcommand(
      "candidates", "write the full factorial candidate set with effect columns");
  std::string cand_out;
  add_common(cmd_candidates, args);
  cmd_candidates->add_option("-o,--output", cand_out, "output CSV")->required();

  auto* cmd_bounds = app.add_subcommand(
      "bounds", "replication and run-size bounds at a fixed coefficient vector");
  std::string bounds_eta, bounds_design, bounds_out;
  double bounds_kappa = 0.5;
  add_common(cmd_bounds, args);
  cmd_bounds->add_option("--eta", bounds_eta, "coefficient CSV (first row used)")->required();
  cmd_bounds->add_option("--design", bounds_design,
                         "design CSV; bounds use its distinct points instead of all candidates");
  cmd_bounds->add_option("--kappa", bounds_kappa, "confidence level (default 0.5)");
  cmd_bounds->add_option("-o,--output", bounds_out, "report JSON (stdout if omitted)");

  auto* cmd_local = app.add_subcommand("local", "local optimal design for one coefficient vector");
  std::string local_eta, local_out, local_report;
  add_common(cmd_local, args);
  cmd_local->add_option("--eta", local_eta, "coefficient CSV (first row used)")->required();
  cmd_local->add_option("-o,--output", local_out, "design CSV")->required();
  cmd_local->add_option("--report", local_report, "report JSON");

  auto* cmd_global = app.add_subcommand(
      "global", "global design: accumulate local designs over prior draws");
  std::string global_etas, global_out, global_report;
  int global_b = 0;
  add_common(cmd_global, args);
  cmd_global->add_option("--eta-samples", global_etas,
                         "coefficient sample CSV (drawn from the prior if omitted)");
  cmd_global->add_option("-B,--budget", global_b, "number of prior draws");
  cmd_global->add_option("-o,--output", global_out, "frequency CSV")->required();
  cmd_global->add_option("--report", global_report, "report JSON");

  auto* cmd_baselines = app.add_subcommand(
      "baselines", "linear D, GLM local D and combined baseline designs");
  std::string base_eta, base_dir;
  int base_nglm = 0;
  add_common(cmd_baselines, args);
  cmd_baselines->add_option("--eta", base_eta, "coefficient CSV (first row used)")->required();
  cmd_baselines->add_option("-o,--outdir", base_dir, "output directory")->required();
  cmd_baselines->add_option("--n-glm", base_nglm,
                            "GLM block size of the combined design (default 2n/3)");

  auto* cmd_eff = app.add_subcommand("efficiency",
                                     "relative efficiency of design A over design B");
  std::string eff_a, eff_b, eff_eta, eff_etas, eff_out;
  add_common(cmd_eff, args);
  cmd_eff->add_option("--design-a", eff_a, "design CSV")->required();
  cmd_eff->add_option("--design-b", eff_b, "design CSV")->required();
  cmd_eff->add_option("--eta", eff_eta, "coefficient CSV (first row used)");
  cmd_eff->add_option("--eta-samples", eff_etas, "coefficient sample CSV (all rows)");
  cmd_eff->add_option("-o,--output", eff_out, "per-sample efficiency CSV");

  auto* cmd_sample = app.add_subcommand("sample", "draw a discrete design from frequencies");
  std::string sample_freq, sample_out;
  int sample_n = 0;
  add_common(cmd_sample, args);
  cmd_sample->add_option("--freq", sample_freq, "frequency CSV")->required();
  cmd_sample->add_option("-n,--runs", sample_n, "number of runs")->required();
  cmd_sample->add_option("-o,--output", sample_out, "design CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  const auto t0 = std::chrono::steady_clock::now();
  try {
    ExperimentConfig cfg = load(args);
    CandidateSet cands = full_factorial(cfg.model);
    const int q = cands.q();
    CriterionConfig crit = cfg.criterion();

    if (*cmd_candidates) {
      write_candidates_csv(cand_out, cands);
    } else if (*cmd_bounds) {
      Eigen::VectorXd eta = first_eta(bounds_eta, q);

      std::vector<int> points;
      if (!bounds_design.empty()) {
        points = distinct_points(read_design_csv(bounds_design, cands));
      } else {
        points.resize(cands.size());
        for (int i = 0; i < cands.size(); ++i) points[i] = i;
      }
      std::vector<double> pi(points.size());
      for (std::size_t i = 0; i < points.size(); ++i)
        pi[i] = link_prob(cands.f.row(points[i]).dot(eta), cfg.link);
      ReplicationBounds rb = replication_bounds(pi, bounds_kappa);

      json rep;
      rep["kappa"] = bounds_kappa;
      json per_point = json::array();
      for (std::size_t i = 0; i < points.size(); ++i) {
        json row;
        row["point"] = points[i];
        row["pi"] = pi[i];
        row["sufficient"] = rb.sufficient[i];
        row["necessary"] = rb.necessary[i];
        per_point.push_back(row);
      }
      rep["replication"] = per_point;

      const long long m = static_cast<long long>(points.size());
      if (m > q) {
        auto [lo, hi] = std::minmax_element(pi.begin(), pi.end());
        SupportBounds sb = support_bounds(m, q, *lo, *hi);
        rep["support"] = {{"m", m},
                          {"q", q},
                          {"pi_min", *lo},
                          {"pi_max", *hi},
                          {"n0_sufficient", sb.n0_sufficient},
                          {"n_sufficient", sb.n_sufficient},
                          {"n0_necessary", sb.n0_necessary},
                          {"n_necessary", sb.n_necessary}};
      } else {
        rep["support"] = nullptr;
        rep["note"] = "support bounds need more distinct points than effects";
      }
      if (bounds_out.empty())
        std::cout << rep.dump(2) << "\n";
      else
        write_json(bounds_out, rep);
    } else if (*cmd_local) {
      Eigen::VectorXd eta = first_eta(local_eta, q);
      LocalResult res = local_search(cands, eta, crit, cfg.search);
      write_design_csv(local_out, cands, res.design);
      json rep = design_report(cands, res.design, res.q_value);
      rep["iterations"] = res.iterations;
      rep["exchanges"] = res.exchanges;
      rep["seed"] = cfg.search.seed;
      rep["runtime_s"] = run_seconds(t0);
      rep["design_csv"] = local_out;
      if (!local_report.empty()) write_json(local_report, rep);
      std::cout << "Q = " << res.q_value << " over " << res.design.size()
                << " runs -> " << local_out << "\n";
    } else if (*cmd_global) {
      Eigen::MatrixXd etas;
      if (!global_etas.empty()) {
        etas = read_eta_csv(global_etas, q);
      } else {
        int b = global_b > 0 ? global_b : cfg.budget;
        etas = sample_eta(cfg.eta_prior, b, cfg.sampling,
                          mix_seed(cfg.search.seed, 0xe7a5), cfg.lhs_restarts);
      }
      GlobalResult res = global_design(cands, etas, crit, cfg.search, cfg.threads);
      write_freq_csv(global_out, cands, res.freq);
      json rep;
      rep["B"] = etas.rows();
      rep["failures"] = res.failures;
      rep["support_points"] = (res.freq.array() > 0.0).count();
      rep["runtime_s"] = run_seconds(t0);
      rep["frequency_csv"] = global_out;
      json per = json::array();
      for (double v : res.eta_q) per.push_back(v);
      rep["eta_q"] = per;
      if (!global_report.empty()) write_json(global_report, rep);
      std::cout << "accumulated " << etas.rows() - res.failures << "/" << etas.rows()
                << " local designs -> " << global_out << "\n";
    } else if (*cmd_baselines) {
      Eigen::VectorXd eta = first_eta(base_eta, q);
      const int n = cfg.search.n;
      fs::create_directories(base_dir);
      int n_glm = base_nglm > 0 ? base_nglm : (2 * n + 2) / 3;
      int n_lin = n - n_glm;

      Design dl = baseline_design(BaselineKind::LinearD, cands, n, eta, cfg.link, cfg.search);
      Design dg = baseline_design(BaselineKind::GlmLocalD, cands, n, eta, cfg.link, cfg.search);
      Design dc = combined_design(cands, n_glm, n_lin, eta, cfg.link, cfg.search);
      write_design_csv((fs::path(base_dir) / "d_l.csv").string(), cands, dl);
      write_design_csv((fs::path(base_dir) / "d_g.csv").string(), cands, dg);
      write_design_csv((fs::path(base_dir) / "d_c.csv").string(), cands, dc);
      std::cout << "wrote d_l.csv, d_g.csv, d_c.csv (combined split " << n_glm
                << "+" << n_lin << ") to " << base_dir << "\n";
    } else if (*cmd_eff) {
      if (eff_eta.empty() == eff_etas.empty())
        throw std::runtime_error("efficiency needs exactly one of --eta or --eta-samples");
      Design da = read_design_csv(eff_a, cands);
      Design db = read_design_csv(eff_b, cands);
      Eigen::MatrixXd etas = eff_etas.empty() ? first_eta(eff_eta, q).transpose()
                                              : read_eta_csv(eff_etas, q);
      std::ofstream out;
      if (!eff_out.empty()) {
        out.open(eff_out);
        if (!out) throw std::runtime_error("cannot write " + eff_out);
        out << "sample,q_a,q_b,efficiency\n";
      }
      double mean = 0.0;
      int above_one = 0;
      for (int i = 0; i < etas.rows(); ++i) {
        Eigen::VectorXd eta = etas.row(i).transpose();
        double qa = q_value(cands, da, eta, crit);
        double qb = q_value(cands, db, eta, crit);
        double eff = efficiency(qa, qb, q);
        mean += eff;
        above_one += eff > 1.0;
        if (out.is_open())
          out << i << "," << format_double(qa) << "," << format_double(qb) << ","
              << format_double(eff) << "\n";
      }
      mean /= static_cast<double>(etas.rows());
      std::cout << "mean efficiency " << mean << " over " << etas.rows()
                << " samples, " << above_one << " above 1\n";
    } else if (*cmd_sample) {
      Eigen::VectorXd freq = read_freq_csv(sample_freq, cands);
      double total = freq.sum();
      if (total <= 0.0) throw std::runtime_error("frequencies sum to zero");
      freq /= total;

      // Redraw until the draw supports a nonsingular design; the structural
      // check uses the box midpoint (or zero for a normal prior).
      Eigen::VectorXd eta_check =
          cfg.eta_prior.kind == EtaPrior::Kind::UniformBox
              ? ((cfg.eta_prior.lower + cfg.eta_prior.upper) / 2.0).eval()
              : Eigen::VectorXd::Zero(q).eval();
      Design d;
      bool ok = false;
      for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
        d = sample_discrete(freq, sample_n, mix_seed(cfg.search.seed, attempt));
        try {
          (void)q_value(cands, d, eta_check, crit);
          ok = true;
        } catch (const SingularDesign&) {
        }
      }
      if (!ok)
        throw SamplingFailed("100 consecutive draws were singular for the model");
      write_design_csv(sample_out, cands, d);
      std::cout << "wrote " << sample_n << " runs -> " << sample_out << "\n";
    }
    return 0;
  } catch (const SingularDesign& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const InfeasibleModel& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const SamplingFailed& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
