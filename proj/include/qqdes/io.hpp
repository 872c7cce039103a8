#pragma once

#include <Eigen/Dense>

#include <string>

#include "qqdes/factors.hpp"

namespace qqdes {

/// CSV conventions: comma separated, one header row, floating point values
/// written with 17 significant digits so a write/read round trip is
/// bit-stable.  Level labels are written as plain integers.

/// Design file: one row per run, columns are the factor level labels.
void write_design_csv(const std::string& path, const CandidateSet& cands,
                      const Design& design);
Design read_design_csv(const std::string& path, const CandidateSet& cands);

/// Frequency file: point index, level labels, frequency; all points written.
void write_freq_csv(const std::string& path, const CandidateSet& cands,
                    const Eigen::VectorXd& freq);
Eigen::VectorXd read_freq_csv(const std::string& path, const CandidateSet& cands);

/// Coefficient samples: effect labels as header, one row per sample.
void write_eta_csv(const std::string& path, const ModelSpec& model,
                   const Eigen::MatrixXd& etas);
Eigen::MatrixXd read_eta_csv(const std::string& path, int q);

/// Candidate listing: point index, level labels, expanded effect columns.
void write_candidates_csv(const std::string& path, const CandidateSet& cands);

std::string format_double(double v);

}  // namespace qqdes
