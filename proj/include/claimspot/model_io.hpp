#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "claimspot/linear_model.hpp"
#include "claimspot/pipeline.hpp"

namespace claimspot {

inline constexpr int kModelSchemaVersion = 1;

/// A classifier plus (optionally) the fitted feature pipeline it consumes.
struct TrainedModel {
  std::shared_ptr<const FeaturePipeline> pipeline;
  std::variant<BinaryLinearModel, MultinomialModel> classifier;

  bool is_multiclass() const { return std::holds_alternative<MultinomialModel>(classifier); }
};

/// Versioned JSON text. Doubles are written in shortest round-trip form, so a
/// reloaded model reproduces predictions bit for bit.
void save_model(const TrainedModel& model, const std::filesystem::path& path);
/// Throws VersionMismatch, CorruptModelFile, IoError.
TrainedModel load_model(const std::filesystem::path& path, ResourceCache& cache = ResourceCache::shared());

std::string serialize_model(const TrainedModel& model);
TrainedModel deserialize_model(const std::string& text, ResourceCache& cache = ResourceCache::shared());

/// Output of applying a TrainedModel to one sentence.
struct SentencePrediction {
  BinaryLabel label = BinaryLabel::NonClaim;
  std::optional<double> probability;  // absent for hinge models
  std::optional<ClaimCategory> category;
};

/// The single classification path shared by offline prediction and serving.
/// For a multiclass model, `label` maps the category through the row-B
/// mapping and `probability` is that of the predicted category.
std::vector<SentencePrediction> classify_sentences(const TrainedModel& model, std::span<const Sentence> sentences,
                                                   double threshold = 0.5);

}  // namespace claimspot
