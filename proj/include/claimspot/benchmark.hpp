#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "claimspot/config.hpp"
#include "claimspot/evaluation.hpp"
#include "claimspot/linear_model.hpp"
#include "claimspot/pipeline.hpp"
#include "claimspot/report.hpp"

namespace claimspot {

enum class OutputFormat { Tsv, Table };

OutputFormat output_format_from_string(std::string_view s);

/// "logreg" -> logistic, "svm" -> hinge.
LossKind loss_from_classifier_name(std::string_view name);
std::string_view classifier_name(LossKind loss);

/// Overlays keys present in `table` (l2_strength, max_iters, tolerance, seed,
/// init_scale, classifier) onto `config`.
void apply_train_settings(const config::Table& table, TrainConfig& config);
/// Overlays k, seed, honor_train_only, threshold.
void apply_cv_settings(const config::Table& table, CvConfig& cv);

struct GridCell {
  std::string name;
  FeaturePipelineConfig features;
  TrainConfig train;
};

struct BenchmarkSpec {
  std::vector<GridCell> grid;
  std::filesystem::path dataset;
  CvConfig cv;
  OutputFormat format = OutputFormat::Tsv;
};

/// Relative paths resolve against `base_dir`.
BenchmarkSpec parse_benchmark_spec(const config::Table& table, const std::filesystem::path& base_dir);
BenchmarkSpec load_benchmark_spec(const std::filesystem::path& path);

struct BenchmarkReport {
  std::vector<std::string> header;
  std::vector<BinaryReportRow> rows;

  std::string render(OutputFormat format) const;
};

/// One pooled cross-validation per cell, all sharing a single seeded split.
/// Referenced resource files are checked up front; any failure throws an
/// Error whose message names the cell, and no rows are returned.
BenchmarkReport run_benchmark_grid(const BenchmarkSpec& spec);

}  // namespace claimspot
