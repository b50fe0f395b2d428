#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "claimspot/embedding.hpp"
#include "claimspot/pca.hpp"
#include "claimspot/schema.hpp"
#include "claimspot/sparse.hpp"
#include "claimspot/tagging.hpp"
#include "claimspot/tfidf.hpp"
#include "json.hpp"

namespace claimspot {

enum class ComponentKind { Tfidf, TfidfNumMask, EmbeddingAvg, PrecomputedVectors, PosCounts, NerCounts, Pca };

/// One entry of a feature recipe. Textual form: `tfidf`, `tfidf_nummask`,
/// `embedding_avg(path)`, `precomputed_vectors(path)`, `pos_counts(path)`,
/// `ner_counts(path)`, `pca(k)` or `pca` (k = 300). Tag counts take the
/// tagged-corpus path.
struct FeatureComponent {
  ComponentKind kind = ComponentKind::Tfidf;
  std::string resource;
  std::size_t k = 0;

  static FeatureComponent parse(std::string_view spec);
  std::string to_string() const;
  bool is_dense() const;
  bool needs_sentence_id() const;

  friend bool operator==(const FeatureComponent&, const FeatureComponent&) = default;
};

struct FeaturePipelineConfig {
  std::vector<FeatureComponent> components;

  static FeaturePipelineConfig from_strings(std::span<const std::string> specs);
  /// Throws ConfigError unless non-empty and every pca follows a dense component.
  void validate() const;
  /// Relative resource paths are resolved against `base`.
  FeaturePipelineConfig resolved(const std::filesystem::path& base) const;
  std::string canonical() const;
  std::uint64_t fingerprint() const;  // FNV-1a of canonical()
  bool needs_sentence_ids() const;
};

/// Shares loaded lexicons, sentence vectors and tagged corpora across
/// pipelines (folds, grid cells) by path.
class ResourceCache {
 public:
  static ResourceCache& shared();

  std::shared_ptr<const EmbeddingLexicon> lexicon(const std::string& path);
  std::shared_ptr<const SentenceVectors> sentence_vectors(const std::string& path);
  std::shared_ptr<const TaggedCorpus> tagged_corpus(const std::string& path);

 private:
  std::mutex mutex_;
  std::unordered_map<std::string, std::shared_ptr<const EmbeddingLexicon>> lexicons_;
  std::unordered_map<std::string, std::shared_ptr<const SentenceVectors>> vectors_;
  std::unordered_map<std::string, std::shared_ptr<const TaggedCorpus>> tagged_;
};

/// A feature recipe plus its fitted state. Blocks are concatenated in
/// recipe order; a `pca` entry reduces the block right before it.
class FeaturePipeline {
 public:
  explicit FeaturePipeline(FeaturePipelineConfig config, ResourceCache& cache = ResourceCache::shared());

  const FeaturePipelineConfig& config() const { return config_; }
  bool fitted() const { return fitted_; }
  std::size_t output_dim() const;

  /// Fits TF-IDF vocabularies and PCA projections on `sentences` only.
  void fit(std::span<const Sentence> sentences);
  /// Throws NotFitted, MissingVector.
  SparseVector transform(const Sentence& sentence) const;
  FeatureMatrix transform(std::span<const Sentence> sentences) const;

  nlohmann::json state() const;
  static FeaturePipeline restore(FeaturePipelineConfig config, const nlohmann::json& state,
                                 ResourceCache& cache = ResourceCache::shared());

 private:
  struct Stage {
    FeatureComponent source;
    std::optional<std::size_t> pca_k;
    TfidfModel tfidf;
    std::optional<PcaModel> pca;
    std::shared_ptr<const EmbeddingLexicon> lexicon;
    std::shared_ptr<const SentenceVectors> vectors;
    std::shared_ptr<const TaggedCorpus> tagged;
    std::size_t raw_dim = 0;
  };

  void load_resources();
  SparseVector raw_block(const Stage& stage, const Sentence& sentence) const;
  SparseVector stage_block(const Stage& stage, const Sentence& sentence) const;

  FeaturePipelineConfig config_;
  ResourceCache* cache_;
  std::vector<Stage> stages_;
  bool fitted_ = false;
};

}  // namespace claimspot
