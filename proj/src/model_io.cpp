#include "claimspot/model_io.hpp"

#include <fstream>
#include <sstream>

#include "claimspot/error.hpp"
#include "json.hpp"

namespace claimspot {

using nlohmann::json;

std::string serialize_model(const TrainedModel& model) {
  json doc;
  doc["schema_version"] = kModelSchemaVersion;
  if (const auto* b = std::get_if<BinaryLinearModel>(&model.classifier)) {
    doc["kind"] = "binary";
    doc["loss"] = std::string(to_string(b->loss));
    doc["classes"] = {"nonclaim", "claim"};
    doc["pipeline_fingerprint"] = b->pipeline_fingerprint;
    doc["dim"] = b->weights.size();
    doc["weights"] = b->weights;
    doc["bias"] = b->bias;
  } else {
    const auto& m = std::get<MultinomialModel>(model.classifier);
    doc["kind"] = "multinomial";
    doc["loss"] = "logistic";
    std::vector<int> codes;
    for (auto c : m.classes) codes.push_back(code_of(c));
    doc["classes"] = codes;
    doc["pipeline_fingerprint"] = m.pipeline_fingerprint;
    doc["dim"] = m.dim;
    doc["weights"] = m.weights;
    doc["biases"] = m.biases;
  }
  if (model.pipeline) {
    doc["pipeline"] = {{"components", json::array()}, {"state", model.pipeline->state()}};
    for (const auto& c : model.pipeline->config().components) doc["pipeline"]["components"].push_back(c.to_string());
  } else {
    doc["pipeline"] = nullptr;
  }
  return doc.dump() + "\n";
}

TrainedModel deserialize_model(const std::string& text, ResourceCache& cache) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::CorruptModelFile, e.what());
  }
  try {
    if (!doc.is_object() || !doc.contains("schema_version")) {
      throw Error(ErrorCode::CorruptModelFile, "missing schema_version");
    }
    const auto version = doc.at("schema_version").get<int>();
    if (version != kModelSchemaVersion) {
      throw Error(ErrorCode::VersionMismatch, "model schema_version " + std::to_string(version) + ", expected " +
                                                  std::to_string(kModelSchemaVersion));
    }
    TrainedModel model;
    const auto kind = doc.at("kind").get<std::string>();
    const auto dim = doc.at("dim").get<std::size_t>();
    const auto fingerprint = doc.at("pipeline_fingerprint").get<std::uint64_t>();
    if (kind == "binary") {
      BinaryLinearModel b;
      const auto loss = doc.at("loss").get<std::string>();
      if (loss != "logistic" && loss != "hinge") throw Error(ErrorCode::CorruptModelFile, "unknown loss " + loss);
      b.loss = loss == "logistic" ? LossKind::Logistic : LossKind::Hinge;
      b.weights = doc.at("weights").get<std::vector<double>>();
      b.bias = doc.at("bias").get<double>();
      b.pipeline_fingerprint = fingerprint;
      if (b.weights.size() != dim) throw Error(ErrorCode::CorruptModelFile, "weight count differs from dim");
      model.classifier = std::move(b);
    } else if (kind == "multinomial") {
      MultinomialModel m;
      for (int code : doc.at("classes").get<std::vector<int>>()) {
        auto c = category_from_code(code);
        if (!c) throw Error(ErrorCode::CorruptModelFile, "unknown class code " + std::to_string(code));
        m.classes.push_back(*c);
      }
      m.dim = dim;
      m.weights = doc.at("weights").get<std::vector<double>>();
      m.biases = doc.at("biases").get<std::vector<double>>();
      m.pipeline_fingerprint = fingerprint;
      if (m.weights.size() != m.classes.size() * dim || m.biases.size() != m.classes.size()) {
        throw Error(ErrorCode::CorruptModelFile, "multinomial parameter sizes are inconsistent");
      }
      model.classifier = std::move(m);
    } else {
      throw Error(ErrorCode::CorruptModelFile, "unknown model kind " + kind);
    }
    const auto& p = doc.at("pipeline");
    if (!p.is_null()) {
      auto config = FeaturePipelineConfig::from_strings(p.at("components").get<std::vector<std::string>>());
      if (config.fingerprint() != fingerprint) {
        throw Error(ErrorCode::CorruptModelFile, "pipeline fingerprint does not match its components");
      }
      auto pipeline = FeaturePipeline::restore(std::move(config), p.at("state"), cache);
      if (pipeline.output_dim() != dim) {
        throw Error(ErrorCode::DimensionMismatch, "pipeline produces " + std::to_string(pipeline.output_dim()) +
                                                      " features, classifier expects " + std::to_string(dim));
      }
      model.pipeline = std::make_shared<const FeaturePipeline>(std::move(pipeline));
    }
    return model;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptModelFile, e.what());
  }
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  const auto text = serialize_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write model to " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

TrainedModel load_model(const std::filesystem::path& path, ResourceCache& cache) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open model " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_model(ss.str(), cache);
}

std::vector<SentencePrediction> classify_sentences(const TrainedModel& model, std::span<const Sentence> sentences,
                                                   double threshold) {
  if (!model.pipeline) throw Error(ErrorCode::InvalidArgument, "model file carries no feature pipeline");
  std::vector<SentencePrediction> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) {
    const auto x = model.pipeline->transform(s);
    SentencePrediction p;
    if (const auto* b = std::get_if<BinaryLinearModel>(&model.classifier)) {
      p.label = predict(*b, x, threshold);
      if (b->loss == LossKind::Logistic) p.probability = predict_proba(*b, x);
    } else {
      const auto mc = predict_multiclass(std::get<MultinomialModel>(model.classifier), x);
      const auto& classes = std::get<MultinomialModel>(model.classifier).classes;
      const auto pos = static_cast<std::size_t>(std::find(classes.begin(), classes.end(), mc.category) -
                                                classes.begin());
      p.category = mc.category;
      p.probability = mc.probabilities[pos];
      p.label = *map_to_binary(mc.category, LabelMapping::row_b());
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace claimspot
