#include "qqdes/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace qqdes {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  for (auto& s : out) {
    std::size_t b = s.find_first_not_of(" \t");
    std::size_t e = s.find_last_not_of(" \t");
    s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  }
  return out;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    rows.push_back(split_csv_line(line));
  }
  if (rows.empty()) throw std::runtime_error(path + " is empty");
  return rows;
}

double parse_double(const std::string& s, const std::string& path) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("bad numeric value '" + s + "' in " + path);
  }
}

int parse_level(const std::string& s, const std::string& path) {
  double v = parse_double(s, path);
  int level = static_cast<int>(std::lround(v));
  if (std::abs(v - level) > 1e-9)
    throw std::runtime_error("level label '" + s + "' in " + path + " is not an integer");
  return level;
}

// Key for a level tuple; levels are in {-1,0,1} so base-3 digits suffice.
long long level_key(const Eigen::VectorXi& levels) {
  long long key = 0;
  for (int j = 0; j < levels.size(); ++j) key = key * 3 + (levels[j] + 1);
  return key;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_design_csv(const std::string& path, const CandidateSet& cands,
                      const Design& design) {
  std::ofstream out = open_out(path);
  const auto& factors = cands.model.factors();
  for (std::size_t j = 0; j < factors.size(); ++j)
    out << (j ? "," : "") << factors[j].name;
  out << "\n";
  for (int idx : design) {
    if (idx < 0 || idx >= cands.size())
      throw std::out_of_range("design index outside candidate set");
    for (int j = 0; j < cands.levels.cols(); ++j)
      out << (j ? "," : "") << cands.levels(idx, j);
    out << "\n";
  }
}

Design read_design_csv(const std::string& path, const CandidateSet& cands) {
  auto rows = read_csv(path);
  const int p = cands.model.p();
  std::unordered_map<long long, int> lookup;
  for (int i = 0; i < cands.size(); ++i)
    lookup.emplace(level_key(cands.levels.row(i)), i);

  Design design;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (static_cast<int>(rows[r].size()) != p)
      throw std::runtime_error(path + ": expected " + std::to_string(p) +
                               " level columns");
    Eigen::VectorXi levels(p);
    for (int j = 0; j < p; ++j) levels[j] = parse_level(rows[r][j], path);
    cands.model.validate_point(levels);
    auto it = lookup.find(level_key(levels));
    if (it == lookup.end())
      throw std::runtime_error(path + ": point not in candidate set");
    design.push_back(it->second);
  }
  if (design.empty()) throw std::runtime_error(path + " contains no runs");
  return design;
}

void write_freq_csv(const std::string& path, const CandidateSet& cands,
                    const Eigen::VectorXd& freq) {
  if (freq.size() != cands.size())
    throw std::domain_error("frequency vector length does not match candidate set");
  std::ofstream out = open_out(path);
  out << "point";
  for (const auto& f : cands.model.factors()) out << "," << f.name;
  out << ",frequency\n";
  for (int i = 0; i < cands.size(); ++i) {
    out << i;
    for (int j = 0; j < cands.levels.cols(); ++j) out << "," << cands.levels(i, j);
    out << "," << format_double(freq[i]) << "\n";
  }
}

Eigen::VectorXd read_freq_csv(const std::string& path, const CandidateSet& cands) {
  auto rows = read_csv(path);
  const int p = cands.model.p();
  std::unordered_map<long long, int> lookup;
  for (int i = 0; i < cands.size(); ++i)
    lookup.emplace(level_key(cands.levels.row(i)), i);

  Eigen::VectorXd freq = Eigen::VectorXd::Zero(cands.size());
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (static_cast<int>(rows[r].size()) != p + 2)
      throw std::runtime_error(path + ": expected point, levels, frequency columns");
    Eigen::VectorXi levels(p);
    for (int j = 0; j < p; ++j) levels[j] = parse_level(rows[r][j + 1], path);
    auto it = lookup.find(level_key(levels));
    if (it == lookup.end())
      throw std::runtime_error(path + ": point not in candidate set");
    freq[it->second] += parse_double(rows[r].back(), path);
  }
  return freq;
}

void write_eta_csv(const std::string& path, const ModelSpec& model,
                   const Eigen::MatrixXd& etas) {
  if (etas.cols() != model.q())
    throw std::domain_error("eta sample width does not match model size");
  std::ofstream out = open_out(path);
  auto labels = model.effect_labels();
  for (std::size_t j = 0; j < labels.size(); ++j) out << (j ? "," : "") << labels[j];
  out << "\n";
  for (int i = 0; i < etas.rows(); ++i) {
    for (int j = 0; j < etas.cols(); ++j)
      out << (j ? "," : "") << format_double(etas(i, j));
    out << "\n";
  }
}

Eigen::MatrixXd read_eta_csv(const std::string& path, int q) {
  auto rows = read_csv(path);
  // The first row is a header when any cell fails to parse as a number.
  std::size_t start = 0;
  {
    bool numeric = true;
    for (const auto& cell : rows[0]) {
      try {
        std::size_t pos = 0;
        (void)std::stod(cell, &pos);
        if (pos != cell.size()) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
      if (!numeric) break;
    }
    if (!numeric) start = 1;
  }
  if (rows.size() <= start) throw std::runtime_error(path + " has no samples");
  Eigen::MatrixXd etas(rows.size() - start, q);
  for (std::size_t r = start; r < rows.size(); ++r) {
    if (static_cast<int>(rows[r].size()) != q)
      throw std::runtime_error(path + ": expected " + std::to_string(q) +
                               " coefficient columns");
    for (int j = 0; j < q; ++j)
      etas(r - start, j) = parse_double(rows[r][j], path);
  }
  return etas;
}

void write_candidates_csv(const std::string& path, const CandidateSet& cands) {
  std::ofstream out = open_out(path);
  out << "point";
  for (const auto& f : cands.model.factors()) out << "," << f.name;
  for (const auto& label : cands.model.effect_labels()) out << ",f:" << label;
  out << "\n";
  for (int i = 0; i < cands.size(); ++i) {
    out << i;
    for (int j = 0; j < cands.levels.cols(); ++j) out << "," << cands.levels(i, j);
    for (int j = 0; j < cands.f.cols(); ++j) out << "," << format_double(cands.f(i, j));
    out << "\n";
  }
}

}  // namespace qqdes
