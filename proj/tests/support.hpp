#pragma once

// Test helpers and brute-force oracles. The oracles deliberately share no
// code with the library: they work from first principles on plain vectors.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "claimspot/annotation.hpp"
#include "claimspot/schema.hpp"
#include "claimspot/sparse.hpp"

namespace testing {

class TempDir {
 public:
  TempDir() {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() / ("claimspot-test-" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

  std::filesystem::path write(const std::string& name, const std::string& content) const {
    const auto p = path_ / name;
    std::ofstream(p, std::ios::binary) << content;
    return p;
  }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// --- agreement ------------------------------------------------------------

using Units = std::vector<std::vector<int>>;

/// Krippendorff's nominal alpha from the textbook definitions: every ordered
/// pair of values within a unit adds 1/(m_u - 1) to the coincidence cell.
inline double alpha_oracle(const Units& units) {
  std::map<std::pair<int, int>, double> o;
  for (const auto& unit : units) {
    const std::size_t m = unit.size();
    if (m < 2) continue;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        if (i != j) o[{unit[i], unit[j]}] += 1.0 / static_cast<double>(m - 1);
      }
    }
  }
  std::map<int, double> marginal;
  double n = 0.0;
  for (const auto& [cell, value] : o) {
    marginal[cell.first] += value;
    n += value;
  }
  double observed = 0.0;
  for (const auto& [cell, value] : o) {
    if (cell.first != cell.second) observed += value;
  }
  observed /= n;
  double expected = 0.0;
  for (const auto& [c, nc] : marginal) {
    for (const auto& [k, nk] : marginal) {
      if (c != k) expected += nc * nk;
    }
  }
  expected /= n * (n - 1.0);
  if (expected == 0.0) return 1.0;
  return 1.0 - observed / expected;
}

inline claimspot::ReliabilityData to_reliability(const Units& units) {
  claimspot::ReliabilityData data;
  for (std::size_t u = 0; u < units.size(); ++u) {
    auto& votes = data.units["u" + std::to_string(u)];
    for (std::size_t a = 0; a < units[u].size(); ++a) votes.emplace_back("a" + std::to_string(a), units[u][a]);
  }
  return data;
}

/// Differing unordered pairs per unit, by enumeration.
inline std::array<std::array<long, 8>, 8> disagreement_oracle(const Units& units) {
  std::array<std::array<long, 8>, 8> cells{};
  for (const auto& unit : units) {
    for (std::size_t i = 0; i < unit.size(); ++i) {
      for (std::size_t j = i + 1; j < unit.size(); ++j) {
        if (unit[i] == unit[j]) continue;
        ++cells[unit[i]][unit[j]];
        ++cells[unit[j]][unit[i]];
      }
    }
  }
  return cells;
}

// --- aggregation ------------------------------------------------------------

/// Vote rule (>= 3 votes, strict majority) and the recall-oriented mapping,
/// applied directly: claim for codes 2..5, nonclaim for 1, 6, 7.
inline std::vector<std::pair<std::string, std::string>> aggregation_oracle(
    const std::vector<claimspot::Sentence>& sentences, const std::vector<claimspot::AnnotationRecord>& votes) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& s : sentences) {
    int tally[8] = {0, 0, 0, 0, 0, 0, 0, 0};
    int total = 0;
    for (const auto& v : votes) {
      if (v.sentence_id != s.id) continue;
      ++tally[claimspot::code_of(v.category)];
      ++total;
    }
    if (total < 3) continue;
    int best = 1;
    for (int c = 2; c <= 7; ++c) {
      if (tally[c] > tally[best]) best = c;
    }
    if (2 * tally[best] <= total) continue;
    out.emplace_back(s.id, (best >= 2 && best <= 5) ? "claim" : "nonclaim");
  }
  return out;
}

// --- metrics ----------------------------------------------------------------

struct Counts {
  long tp = 0, fp = 0, fn = 0, tn = 0;
};

inline Counts count_binary(const std::vector<int>& pred, const std::vector<int>& gold, int positive = 1) {
  Counts c;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred[i] == positive;
    const bool g = gold[i] == positive;
    if (p && g) ++c.tp;
    else if (p) ++c.fp;
    else if (g) ++c.fn;
    else ++c.tn;
  }
  return c;
}

inline double safe_div(double a, double b) { return b == 0.0 ? 0.0 : a / b; }

inline double f1_of(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

// --- numerics ---------------------------------------------------------------

/// Largest relative error between `analytic` and central differences of `f`.
/// Components below 1e-3 in magnitude are compared against 1e-3, where
/// the difference quotient's own rounding error dominates.
template <typename F>
double gradient_check(F&& f, std::vector<double> point, const std::vector<double>& analytic, double h = 1e-6) {
  double worst = 0.0;
  for (std::size_t i = 0; i < point.size(); ++i) {
    const double saved = point[i];
    point[i] = saved + h;
    const double up = f(point);
    point[i] = saved - h;
    const double down = f(point);
    point[i] = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double scale = std::max({1e-3, std::abs(numeric), std::abs(analytic[i])});
    worst = std::max(worst, std::abs(numeric - analytic[i]) / scale);
  }
  return worst;
}

inline claimspot::SparseVector dense_row(std::vector<double> v) { return claimspot::SparseVector::from_dense(v); }

}  // namespace testing
