// claimspot: annotation aggregation, training, evaluation, prediction,
// benchmarking and live serving for claim detection.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "claimspot/annotation.hpp"
#include "claimspot/benchmark.hpp"
#include "claimspot/config.hpp"
#include "claimspot/error.hpp"
#include "claimspot/evaluation.hpp"
#include "claimspot/model_io.hpp"
#include "claimspot/report.hpp"
#include "claimspot/service.hpp"

namespace cs = claimspot;

namespace {

std::uint64_t default_seed() {
  if (const char* env = std::getenv("CLAIMSPOT_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw cs::Error(cs::ErrorCode::ConfigError, std::string("CLAIMSPOT_SEED is not an integer: ") + env);
    }
  }
  return 42;
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw cs::Error(cs::ErrorCode::IoError, "cannot write " + path);
  out << content;
}

// Settings shared by `train` and `evaluate`: a TOML-style config file with
// [features], [train] and [cv] tables, overridden by flags.
struct ModelSettings {
  std::string features_file;
  std::vector<std::string> components;
  std::string classifier;
  std::optional<double> l2;
  std::optional<int> max_iters;
  std::optional<double> tolerance;
  std::optional<std::uint64_t> seed;

  void add_flags(CLI::App& cmd) {
    cmd.add_option("--features", features_file, "Feature/model config file (TOML-style)");
    cmd.add_option("--component", components,
                   "Feature component, repeatable; overrides the config's list "
                   "(tfidf, tfidf_nummask, embedding_avg(path), precomputed_vectors(path), "
                   "pos_counts(path), ner_counts(path), pca(k))");
    cmd.add_option("--classifier", classifier, "logreg or svm")->check(CLI::IsMember({"logreg", "svm"}));
    cmd.add_option("--l2", l2, "L2 regularisation strength");
    cmd.add_option("--max-iters", max_iters, "Optimiser iteration cap");
    cmd.add_option("--tolerance", tolerance, "Gradient infinity-norm stopping tolerance");
    cmd.add_option("--seed", seed, "Seed (default: $CLAIMSPOT_SEED or 42)");
  }

  cs::config::Table file() const {
    return features_file.empty() ? cs::config::Table{} : cs::config::parse_file(features_file);
  }

  cs::FeaturePipelineConfig pipeline(const cs::config::Table& table) const {
    std::vector<std::string> specs = components;
    std::filesystem::path base = std::filesystem::current_path();
    if (specs.empty()) {
      const auto* features = table.subtable("features");
      auto listed = features ? features->get_strings("components") : std::nullopt;
      if (!listed) throw cs::Error(cs::ErrorCode::ConfigError, "no feature components (use --features or --component)");
      specs = *listed;
      base = std::filesystem::absolute(features_file).parent_path();
    }
    return cs::FeaturePipelineConfig::from_strings(specs).resolved(base);
  }

  cs::TrainConfig train(const cs::config::Table& table) const {
    cs::TrainConfig config;
    config.seed = default_seed();
    if (const auto* t = table.subtable("train")) cs::apply_train_settings(*t, config);
    if (!classifier.empty()) config.loss = cs::loss_from_classifier_name(classifier);
    if (l2) config.l2_strength = *l2;
    if (max_iters) config.max_iters = *max_iters;
    if (tolerance) config.tolerance = *tolerance;
    if (seed) config.seed = *seed;
    return config;
  }
};

std::vector<cs::Sentence> read_prediction_input(const std::string& path) {
  std::ifstream file;
  std::istream* in = &std::cin;
  if (path != "-") {
    file.open(path);
    if (!file) throw cs::Error(cs::ErrorCode::IoError, "cannot open " + path);
    in = &file;
  }
  if (path.size() > 6 && path.substr(path.size() - 6) == ".jsonl") return cs::read_sentences(*in);
  std::vector<cs::Sentence> sentences;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(*in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    cs::Sentence s;
    s.id = fmt::format("line-{}", lineno);
    s.text = line;
    sentences.push_back(std::move(s));
  }
  return sentences;
}

std::string format_probability(const std::optional<double>& p) { return p ? fmt::format("{}", *p) : ""; }

cs::HttpServer* g_server = nullptr;

void handle_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Claim detection toolkit: aggregate annotations, train and evaluate claim classifiers, serve live feeds"};
  app.require_subcommand(1);
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  // aggregate
  auto* aggregate = app.add_subcommand("aggregate", "Resolve annotator votes into a labelled dataset");
  std::string ann_path, sent_path, mapping_name = "B", extra_path, agg_out;
  bool multiclass = false;
  aggregate->add_option("--annotations", ann_path, "Annotation JSONL")->required();
  aggregate->add_option("--sentences", sent_path, "Sentence JSONL")->required();
  aggregate->add_option("--mapping", mapping_name, "Binary mapping: A or B")
      ->check(CLI::IsMember({"A", "B", "a", "b"}));
  aggregate->add_flag("--multiclass", multiclass, "Keep the seven categories instead of mapping to binary");
  aggregate->add_option("--extra", extra_path, "Labelled JSONL appended as train-only rows");
  aggregate->add_option("--out", agg_out, "Output labelled JSONL")->required();

  // agreement
  auto* agreement = app.add_subcommand("agreement", "Krippendorff's alpha and the disagreement matrix");
  std::string agr_ann, agr_mapping, agr_out;
  agreement->add_option("--annotations", agr_ann, "Annotation JSONL")->required();
  agreement->add_option("--mapping", agr_mapping, "Compute alpha after mapping votes with A or B")
      ->check(CLI::IsMember({"A", "B", "a", "b"}));
  agreement->add_option("--out", agr_out, "Output file (default stdout)");

  // train
  auto* train = app.add_subcommand("train", "Fit features and a classifier on a labelled dataset");
  std::string train_dataset, train_out;
  ModelSettings train_settings;
  train->add_option("--dataset", train_dataset, "Labelled JSONL")->required();
  train_settings.add_flags(*train);
  train->add_option("--out", train_out, "Model file")->required();

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Stratified k-fold cross-validation with pooled metrics");
  std::string eval_dataset, eval_format = "table", eval_out, eval_confusion, eval_predictions;
  std::optional<std::size_t> eval_k;
  std::optional<double> eval_threshold;
  std::optional<bool> eval_honor;
  ModelSettings eval_settings;
  evaluate->add_option("--dataset", eval_dataset, "Labelled JSONL")->required();
  eval_settings.add_flags(*evaluate);
  evaluate->add_option("--k", eval_k, "Number of folds (default 5)");
  evaluate->add_option("--threshold", eval_threshold, "Claim probability threshold (default 0.5)");
  evaluate->add_option("--honor-train-only", eval_honor, "Keep train_only rows out of test folds (true/false)");
  evaluate->add_option("--format", eval_format, "tsv or table")->check(CLI::IsMember({"tsv", "table"}));
  evaluate->add_option("--out", eval_out, "Report file (default stdout)");
  evaluate->add_option("--confusion", eval_confusion, "Write the confusion matrix TSV here");
  evaluate->add_option("--predictions", eval_predictions, "Write pooled predictions TSV here");

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "Label sentences with a trained model");
  std::string model_path, pred_in = "-", pred_out;
  double pred_threshold = 0.5;
  predict_cmd->add_option("--model", model_path, "Model file")->required();
  predict_cmd->add_option("--in", pred_in, "Sentences: one per line, or .jsonl sentence records ('-' = stdin)");
  predict_cmd->add_option("--out", pred_out, "Output TSV (default stdout)");
  predict_cmd->add_option("--threshold", pred_threshold, "Claim probability threshold");

  // benchmark
  auto* benchmark = app.add_subcommand("benchmark", "Run a grid of feature sets and classifiers");
  std::string bench_spec, bench_out, bench_format;
  std::optional<std::uint64_t> bench_seed;
  std::optional<std::size_t> bench_k;
  benchmark->add_option("--spec", bench_spec, "Grid spec (TOML-style)")->required();
  benchmark->add_option("--out", bench_out, "Results file (default stdout)");
  benchmark->add_option("--format", bench_format, "tsv or table (overrides the spec)")
      ->check(CLI::IsMember({"tsv", "table"}));
  benchmark->add_option("--seed", bench_seed, "Fold seed (overrides the spec)");
  benchmark->add_option("--k", bench_k, "Number of folds (overrides the spec)");

  // serve
  auto* serve = app.add_subcommand("serve", "HTTP service for live transcript classification");
  std::string serve_model, serve_category_model, serve_store = "./sessions", serve_host = "127.0.0.1";
  int serve_port = 8080;
  double serve_threshold = 0.5;
  serve->add_option("--model", serve_model, "Binary claim model file");
  serve->add_option("--category-model", serve_category_model, "Optional multiclass model for categories");
  serve->add_option("--store", serve_store, "Session store directory");
  serve->add_option("--host", serve_host, "Bind address");
  serve->add_option("--port", serve_port, "Port (0 picks a free one)");
  serve->add_option("--threshold", serve_threshold, "Claim probability threshold");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*aggregate) {
      const auto sentences = cs::load_sentences(sent_path);
      const auto annotations = cs::load_annotations(ann_path);
      auto result = multiclass ? cs::build_multiclass_dataset(sentences, annotations)
                               : cs::build_binary_dataset(sentences, annotations, cs::LabelMapping::named(mapping_name));
      if (!extra_path.empty()) {
        for (auto ls : cs::load_labeled_dataset(extra_path)) {
          ls.train_only = true;
          result.items.push_back(std::move(ls));
        }
      }
      cs::save_labeled_dataset(agg_out, result.items);
      const auto& s = result.summary;
      std::cerr << fmt::format("resolved={} too_few={} no_majority={} omitted={} claims={} nonclaims={} written={}\n",
                               s.resolved, s.too_few, s.no_majority, s.omitted, s.claims, s.nonclaims,
                               result.items.size());
    } else if (*agreement) {
      const auto annotations = cs::load_annotations(agr_ann);
      const auto raw = cs::ReliabilityData::from_annotations(annotations);
      const auto data =
          agr_mapping.empty() ? raw : cs::ReliabilityData::binarized(annotations, cs::LabelMapping::named(agr_mapping));
      const auto report = cs::krippendorff_alpha(data);
      std::string out = fmt::format("alpha\t{:.6f}\nn_units\t{}\nn_votes\t{}\n\n", report.alpha, report.n_units,
                                    report.n_votes);
      out += cs::format_disagreement_tsv(cs::disagreement_matrix(raw));
      write_output(agr_out, out);
    } else if (*train) {
      const auto table = train_settings.file();
      const auto dataset = cs::load_labeled_dataset(train_dataset);
      if (dataset.empty()) throw cs::Error(cs::ErrorCode::InvalidArgument, "empty dataset");
      auto pipeline = std::make_shared<cs::FeaturePipeline>(train_settings.pipeline(table));
      const auto config = train_settings.train(table);
      std::vector<cs::Sentence> sentences;
      for (const auto& ls : dataset) sentences.push_back(ls.sentence);
      pipeline->fit(sentences);
      const auto x = pipeline->transform(sentences);
      cs::TrainedModel model;
      cs::TrainingTrace trace;
      const auto fingerprint = pipeline->config().fingerprint();
      if (dataset.front().kind() == cs::LabelKind::Binary) {
        std::vector<cs::BinaryLabel> y;
        for (const auto& ls : dataset) y.push_back(std::get<cs::BinaryLabel>(ls.label));
        auto m = cs::train_binary(x, y, config, &trace);
        m.pipeline_fingerprint = fingerprint;
        model.classifier = std::move(m);
      } else {
        std::vector<cs::ClaimCategory> y;
        for (const auto& ls : dataset) y.push_back(std::get<cs::ClaimCategory>(ls.label));
        auto m = cs::train_multinomial(x, y, config, &trace);
        m.pipeline_fingerprint = fingerprint;
        model.classifier = std::move(m);
      }
      model.pipeline = std::move(pipeline);
      cs::save_model(model, train_out);
      std::cerr << fmt::format("trained on {} sentences, {} features, {} iterations ({}), objective {:.6g}\n",
                               dataset.size(), x.cols, trace.iterations, trace.converged ? "converged" : "iteration cap",
                               trace.objective.back());
    } else if (*evaluate) {
      const auto table = eval_settings.file();
      const auto dataset = cs::load_labeled_dataset(eval_dataset);
      if (dataset.empty()) throw cs::Error(cs::ErrorCode::InvalidArgument, "empty dataset");
      const auto features = eval_settings.pipeline(table);
      const auto config = eval_settings.train(table);
      cs::CvConfig cv;
      cv.seed = default_seed();
      if (const auto* t = table.subtable("cv")) cs::apply_cv_settings(*t, cv);
      if (eval_k) cv.k = *eval_k;
      if (eval_settings.seed) cv.seed = *eval_settings.seed;
      if (eval_threshold) cv.threshold = *eval_threshold;
      if (eval_honor) cv.honor_train_only = *eval_honor;

      const auto result = cs::cross_validate(features, config, dataset, cv);
      const std::vector<std::string> header = {
          "dataset=" + std::filesystem::path(eval_dataset).filename().string() + " n=" + std::to_string(dataset.size()),
          "cv k=" + std::to_string(cv.k) + " seed=" + std::to_string(cv.seed) +
              " honor_train_only=" + (cv.honor_train_only ? "true" : "false")};
      std::string report;
      const bool binary = result.binary.has_value();
      if (binary) {
        const std::vector<cs::BinaryReportRow> rows = {
            {features.canonical(), std::string(cs::classifier_name(config.loss)), *result.binary}};
        report = eval_format == "tsv" ? cs::format_binary_tsv(rows, header) : cs::format_binary_table(rows, header);
      } else {
        std::string h;
        for (const auto& line : header) h += "# " + line + "\n";
        report = h + (eval_format == "tsv" ? cs::format_multiclass_tsv(*result.multiclass)
                                           : cs::format_multiclass_table(*result.multiclass));
      }
      write_output(eval_out, report);
      if (!eval_confusion.empty()) write_output(eval_confusion, cs::format_confusion_tsv(result.confusion, binary));
      if (!eval_predictions.empty()) {
        std::string out = "id\tfold\tgold\tpredicted\tprobability\n";
        auto name = [](const cs::Label& l) {
          if (const auto* b = std::get_if<cs::BinaryLabel>(&l)) return std::string(cs::to_string(*b));
          return std::to_string(cs::code_of(std::get<cs::ClaimCategory>(l)));
        };
        for (const auto& p : result.pooled) {
          out += fmt::format("{}\t{}\t{}\t{}\t{}\n", dataset[p.index].sentence.id, p.fold, name(p.gold),
                             name(p.predicted), format_probability(p.probability));
        }
        write_output(eval_predictions, out);
      }
    } else if (*predict_cmd) {
      const auto model = cs::load_model(model_path);
      const auto sentences = read_prediction_input(pred_in);
      const auto predictions = cs::classify_sentences(model, sentences, pred_threshold);
      std::string out = model.is_multiclass() ? "id\tlabel\tprobability\tcategory\n" : "id\tlabel\tprobability\n";
      for (std::size_t i = 0; i < sentences.size(); ++i) {
        const auto& p = predictions[i];
        out += fmt::format("{}\t{}\t{}", sentences[i].id, cs::to_string(p.label), format_probability(p.probability));
        if (model.is_multiclass()) out += "\t" + std::to_string(cs::code_of(*p.category));
        out += "\n";
      }
      write_output(pred_out, out);
    } else if (*benchmark) {
      auto spec = cs::load_benchmark_spec(bench_spec);
      if (!bench_format.empty()) spec.format = cs::output_format_from_string(bench_format);
      if (bench_seed) spec.cv.seed = *bench_seed;
      else if (std::getenv("CLAIMSPOT_SEED")) {
        const auto table = cs::config::parse_file(bench_spec);
        const auto* cv = table.subtable("cv");
        if (!cv || !cv->get_int("seed")) spec.cv.seed = default_seed();
      }
      if (bench_k) spec.cv.k = *bench_k;
      const auto report = cs::run_benchmark_grid(spec);
      write_output(bench_out, report.render(spec.format));
    } else if (*serve) {
      std::shared_ptr<const cs::TrainedModel> model, category_model;
      if (!serve_model.empty()) model = std::make_shared<const cs::TrainedModel>(cs::load_model(serve_model));
      if (!serve_category_model.empty()) {
        category_model = std::make_shared<const cs::TrainedModel>(cs::load_model(serve_category_model));
      }
      if (!model) spdlog::warn("no --model given; text appends will answer 503");
      cs::LiveService service(serve_store, model, category_model, serve_threshold);
      cs::HttpServer server(service);
      const int port = server.bind(serve_host, serve_port);
      g_server = &server;
      std::signal(SIGINT, handle_signal);
      std::signal(SIGTERM, handle_signal);
      std::cout << fmt::format("listening on http://{}:{}", serve_host, port) << std::endl;
      server.listen();
      g_server = nullptr;
    }
  } catch (const cs::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
