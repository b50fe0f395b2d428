#include "claimspot/benchmark.hpp"

#include "claimspot/error.hpp"

namespace claimspot {

OutputFormat output_format_from_string(std::string_view s) {
  if (s == "tsv") return OutputFormat::Tsv;
  if (s == "table") return OutputFormat::Table;
  throw Error(ErrorCode::ConfigError, "unknown output format '" + std::string(s) + "' (tsv or table)");
}

LossKind loss_from_classifier_name(std::string_view name) {
  if (name == "logreg") return LossKind::Logistic;
  if (name == "svm") return LossKind::Hinge;
  throw Error(ErrorCode::ConfigError, "unknown classifier '" + std::string(name) + "' (logreg or svm)");
}

std::string_view classifier_name(LossKind loss) { return loss == LossKind::Logistic ? "LogReg" : "SVM"; }

void apply_train_settings(const config::Table& table, TrainConfig& config) {
  if (auto v = table.get_double("l2_strength")) config.l2_strength = *v;
  if (auto v = table.get_int("max_iters")) config.max_iters = static_cast<int>(*v);
  if (auto v = table.get_double("tolerance")) config.tolerance = *v;
  if (auto v = table.get_int("seed")) config.seed = static_cast<std::uint64_t>(*v);
  if (auto v = table.get_double("init_scale")) config.init_scale = *v;
  if (auto v = table.get_string("classifier")) config.loss = loss_from_classifier_name(*v);
}

void apply_cv_settings(const config::Table& table, CvConfig& cv) {
  if (auto v = table.get_int("k")) {
    if (*v < 2) throw Error(ErrorCode::ConfigError, "k must be at least 2");
    cv.k = static_cast<std::size_t>(*v);
  }
  if (auto v = table.get_int("seed")) cv.seed = static_cast<std::uint64_t>(*v);
  if (auto v = table.get_bool("honor_train_only")) cv.honor_train_only = *v;
  if (auto v = table.get_double("threshold")) cv.threshold = *v;
}

BenchmarkSpec parse_benchmark_spec(const config::Table& table, const std::filesystem::path& base_dir) {
  BenchmarkSpec spec;
  auto dataset = table.get_string("dataset");
  if (!dataset) throw Error(ErrorCode::ConfigError, "benchmark spec needs 'dataset'");
  spec.dataset = std::filesystem::path(*dataset).is_relative() ? base_dir / *dataset : std::filesystem::path(*dataset);
  if (auto f = table.get_string("format")) spec.format = output_format_from_string(*f);
  if (const auto* cv = table.subtable("cv")) apply_cv_settings(*cv, spec.cv);
  TrainConfig defaults;
  if (const auto* train = table.subtable("train")) apply_train_settings(*train, defaults);

  const auto* cells = table.table_array("cell");
  if (!cells || cells->empty()) throw Error(ErrorCode::ConfigError, "benchmark spec needs at least one [[cell]]");
  for (const auto& cell : *cells) {
    GridCell g;
    g.name = cell.get_string("name").value_or("");
    auto features = cell.get_strings("features");
    if (!features) throw Error(ErrorCode::ConfigError, "cell '" + g.name + "' has no 'features'");
    try {
      g.features = FeaturePipelineConfig::from_strings(*features).resolved(base_dir);
    } catch (const Error& e) {
      throw Error(e.code(), "cell '" + g.name + "': " + e.what());
    }
    if (g.name.empty()) g.name = g.features.canonical();
    g.train = defaults;
    apply_train_settings(cell, g.train);
    spec.grid.push_back(std::move(g));
  }
  return spec;
}

BenchmarkSpec load_benchmark_spec(const std::filesystem::path& path) {
  return parse_benchmark_spec(config::parse_file(path), path.parent_path());
}

std::string BenchmarkReport::render(OutputFormat format) const {
  return format == OutputFormat::Tsv ? format_binary_tsv(rows, header) : format_binary_table(rows, header);
}

BenchmarkReport run_benchmark_grid(const BenchmarkSpec& spec) {
  if (spec.grid.empty()) throw Error(ErrorCode::ConfigError, "benchmark grid is empty");
  for (const auto& cell : spec.grid) {
    for (const auto& c : cell.features.components) {
      if (!c.resource.empty() && !std::filesystem::exists(c.resource)) {
        throw Error(ErrorCode::IoError, "cell '" + cell.name + "': missing resource file " + c.resource);
      }
    }
  }
  const auto dataset = load_labeled_dataset(spec.dataset);
  if (dataset.empty()) throw Error(ErrorCode::InvalidArgument, "benchmark dataset is empty");
  if (dataset.front().kind() != LabelKind::Binary) {
    throw Error(ErrorCode::InvalidArgument, "benchmark grids need a binary-labelled dataset");
  }
  const auto folds = make_folds(dataset, spec.cv);

  BenchmarkReport report;
  report.header = {"dataset=" + spec.dataset.filename().string() + " n=" + std::to_string(dataset.size()),
                   "cv k=" + std::to_string(spec.cv.k) + " seed=" + std::to_string(spec.cv.seed) +
                       " honor_train_only=" + (spec.cv.honor_train_only ? "true" : "false")};
  for (const auto& cell : spec.grid) {
    try {
      const auto result = cross_validate(cell.features, cell.train, dataset, spec.cv, folds);
      report.rows.push_back({cell.name, std::string(classifier_name(cell.train.loss)), *result.binary});
    } catch (const Error& e) {
      throw Error(e.code(), "cell '" + cell.name + "': " + e.what());
    }
  }
  return report;
}

}  // namespace claimspot
