#include "claimspot/pipeline.hpp"

#include <cctype>
#include <charconv>

#include "claimspot/error.hpp"
#include "claimspot/text.hpp"

namespace claimspot {

using nlohmann::json;

namespace {

struct KindName {
  ComponentKind kind;
  std::string_view name;
};

constexpr KindName kKindNames[] = {
    {ComponentKind::Tfidf, "tfidf"},
    {ComponentKind::TfidfNumMask, "tfidf_nummask"},
    {ComponentKind::EmbeddingAvg, "embedding_avg"},
    {ComponentKind::PrecomputedVectors, "precomputed_vectors"},
    {ComponentKind::PosCounts, "pos_counts"},
    {ComponentKind::NerCounts, "ner_counts"},
    {ComponentKind::Pca, "pca"},
};

std::string_view kind_name(ComponentKind kind) {
  for (const auto& kn : kKindNames) {
    if (kn.kind == kind) return kn.name;
  }
  return "?";
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

FeatureComponent FeatureComponent::parse(std::string_view spec) {
  spec = trim(spec);
  std::string_view name = spec;
  std::optional<std::string_view> arg;
  if (auto open = spec.find('('); open != std::string_view::npos) {
    if (spec.back() != ')') throw Error(ErrorCode::ConfigError, "malformed component '" + std::string(spec) + "'");
    name = trim(spec.substr(0, open));
    arg = trim(spec.substr(open + 1, spec.size() - open - 2));
  }
  FeatureComponent c;
  bool known = false;
  for (const auto& kn : kKindNames) {
    if (kn.name == name) {
      c.kind = kn.kind;
      known = true;
    }
  }
  if (!known) throw Error(ErrorCode::ConfigError, "unknown feature component '" + std::string(name) + "'");
  switch (c.kind) {
    case ComponentKind::Tfidf:
    case ComponentKind::TfidfNumMask:
      if (arg) throw Error(ErrorCode::ConfigError, std::string(name) + " takes no argument");
      break;
    case ComponentKind::Pca: {
      c.k = kDefaultPcaComponents;
      if (arg) {
        auto [ptr, ec] = std::from_chars(arg->data(), arg->data() + arg->size(), c.k);
        if (ec != std::errc() || ptr != arg->data() + arg->size() || c.k == 0) {
          throw Error(ErrorCode::ConfigError, "pca needs a positive integer, got '" + std::string(*arg) + "'");
        }
      }
      break;
    }
    default:
      if (!arg || arg->empty()) {
        throw Error(ErrorCode::ConfigError, std::string(name) + " needs a file argument, e.g. " +
                                                std::string(name) + "(path)");
      }
      c.resource = std::string(*arg);
  }
  return c;
}

std::string FeatureComponent::to_string() const {
  std::string out(kind_name(kind));
  if (kind == ComponentKind::Pca) return out + "(" + std::to_string(k) + ")";
  if (!resource.empty()) out += "(" + resource + ")";
  return out;
}

bool FeatureComponent::is_dense() const {
  return kind == ComponentKind::EmbeddingAvg || kind == ComponentKind::PrecomputedVectors ||
         kind == ComponentKind::PosCounts || kind == ComponentKind::NerCounts;
}

bool FeatureComponent::needs_sentence_id() const {
  return kind == ComponentKind::PrecomputedVectors || kind == ComponentKind::PosCounts ||
         kind == ComponentKind::NerCounts;
}

FeaturePipelineConfig FeaturePipelineConfig::from_strings(std::span<const std::string> specs) {
  FeaturePipelineConfig config;
  for (const auto& s : specs) config.components.push_back(FeatureComponent::parse(s));
  config.validate();
  return config;
}

void FeaturePipelineConfig::validate() const {
  if (components.empty()) throw Error(ErrorCode::ConfigError, "feature pipeline has no components");
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (components[i].kind != ComponentKind::Pca) continue;
    if (i == 0 || !components[i - 1].is_dense()) {
      throw Error(ErrorCode::ConfigError, "pca must directly follow a dense component");
    }
  }
}

FeaturePipelineConfig FeaturePipelineConfig::resolved(const std::filesystem::path& base) const {
  FeaturePipelineConfig out = *this;
  for (auto& c : out.components) {
    if (!c.resource.empty() && std::filesystem::path(c.resource).is_relative()) {
      c.resource = (base / c.resource).lexically_normal().string();
    }
  }
  return out;
}

std::string FeaturePipelineConfig::canonical() const {
  std::string out;
  for (const auto& c : components) {
    if (!out.empty()) out += '+';
    out += c.to_string();
  }
  return out;
}

std::uint64_t FeaturePipelineConfig::fingerprint() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : canonical()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

bool FeaturePipelineConfig::needs_sentence_ids() const {
  for (const auto& c : components) {
    if (c.needs_sentence_id()) return true;
  }
  return false;
}

ResourceCache& ResourceCache::shared() {
  static ResourceCache cache;
  return cache;
}

namespace {

template <typename T, typename Loader>
std::shared_ptr<const T> cached(std::mutex& mutex, std::unordered_map<std::string, std::shared_ptr<const T>>& map,
                                const std::string& path, Loader load) {
  std::lock_guard lock(mutex);
  auto it = map.find(path);
  if (it != map.end()) return it->second;
  auto value = std::make_shared<const T>(load(path));
  map.emplace(path, value);
  return value;
}

}  // namespace

std::shared_ptr<const EmbeddingLexicon> ResourceCache::lexicon(const std::string& path) {
  return cached(mutex_, lexicons_, path, [](const std::string& p) { return load_embedding_lexicon(p); });
}

std::shared_ptr<const SentenceVectors> ResourceCache::sentence_vectors(const std::string& path) {
  return cached(mutex_, vectors_, path, [](const std::string& p) { return load_sentence_vectors(p); });
}

std::shared_ptr<const TaggedCorpus> ResourceCache::tagged_corpus(const std::string& path) {
  return cached(mutex_, tagged_, path, [](const std::string& p) { return load_tagged_corpus(p); });
}

FeaturePipeline::FeaturePipeline(FeaturePipelineConfig config, ResourceCache& cache)
    : config_(std::move(config)), cache_(&cache) {
  config_.validate();
  for (const auto& c : config_.components) {
    if (c.kind == ComponentKind::Pca) {
      stages_.back().pca_k = c.k;
    } else {
      stages_.push_back(Stage{c, std::nullopt, {}, std::nullopt, nullptr, nullptr, nullptr, 0});
    }
  }
  load_resources();
}

void FeaturePipeline::load_resources() {
  for (auto& st : stages_) {
    switch (st.source.kind) {
      case ComponentKind::EmbeddingAvg:
        st.lexicon = cache_->lexicon(st.source.resource);
        st.raw_dim = st.lexicon->dim;
        break;
      case ComponentKind::PrecomputedVectors:
        st.vectors = cache_->sentence_vectors(st.source.resource);
        st.raw_dim = st.vectors->dim;
        break;
      case ComponentKind::PosCounts:
        st.tagged = cache_->tagged_corpus(st.source.resource);
        st.raw_dim = st.tagged->pos_tags.size();
        break;
      case ComponentKind::NerCounts:
        st.tagged = cache_->tagged_corpus(st.source.resource);
        st.raw_dim = st.tagged->ner_tags.size();
        break;
      default:
        break;
    }
  }
}

std::size_t FeaturePipeline::output_dim() const {
  if (!fitted_) throw Error(ErrorCode::NotFitted, "feature pipeline has not been fitted");
  std::size_t dim = 0;
  for (const auto& st : stages_) dim += st.pca ? st.pca->output_dim() : st.raw_dim;
  return dim;
}

SparseVector FeaturePipeline::raw_block(const Stage& st, const Sentence& sentence) const {
  switch (st.source.kind) {
    case ComponentKind::Tfidf:
    case ComponentKind::TfidfNumMask:
      return transform_tfidf(st.tfidf, tokenize(sentence.text));
    case ComponentKind::EmbeddingAvg:
      return SparseVector::from_dense(embed_average(*st.lexicon, tokenize(sentence.text)));
    case ComponentKind::PrecomputedVectors:
      return SparseVector::from_dense(st.vectors->at(sentence.id));
    case ComponentKind::PosCounts:
      return SparseVector::from_dense(
          tag_count_features(st.tagged->at(sentence.id), st.tagged->pos_tags, TagField::Pos));
    case ComponentKind::NerCounts:
      return SparseVector::from_dense(
          tag_count_features(st.tagged->at(sentence.id), st.tagged->ner_tags, TagField::Ner));
    case ComponentKind::Pca:
      break;
  }
  throw Error(ErrorCode::InvalidArgument, "pca is not a source component");
}

SparseVector FeaturePipeline::stage_block(const Stage& st, const Sentence& sentence) const {
  SparseVector raw = raw_block(st, sentence);
  if (!st.pca) return raw;
  return SparseVector::from_dense(transform_pca(*st.pca, raw.to_dense()));
}

void FeaturePipeline::fit(std::span<const Sentence> sentences) {
  if (sentences.empty()) throw Error(ErrorCode::InvalidArgument, "cannot fit features on zero sentences");
  for (auto& st : stages_) {
    st.pca.reset();
    if (st.source.kind == ComponentKind::Tfidf || st.source.kind == ComponentKind::TfidfNumMask) {
      std::vector<std::vector<std::string>> corpus;
      corpus.reserve(sentences.size());
      for (const auto& s : sentences) corpus.push_back(tokenize(s.text));
      st.tfidf = fit_tfidf(corpus, st.source.kind == ComponentKind::TfidfNumMask);
      st.raw_dim = st.tfidf.terms.size();
    }
    if (st.pca_k) {
      Eigen::MatrixXd data(static_cast<Eigen::Index>(sentences.size()), static_cast<Eigen::Index>(st.raw_dim));
      for (std::size_t i = 0; i < sentences.size(); ++i) {
        const auto dense = raw_block(st, sentences[i]).to_dense();
        for (std::size_t j = 0; j < dense.size(); ++j) {
          data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = dense[j];
        }
      }
      st.pca = fit_pca(data, *st.pca_k);
    }
  }
  fitted_ = true;
}

SparseVector FeaturePipeline::transform(const Sentence& sentence) const {
  if (!fitted_) throw Error(ErrorCode::NotFitted, "feature pipeline has not been fitted");
  std::vector<SparseVector> blocks;
  blocks.reserve(stages_.size());
  for (const auto& st : stages_) blocks.push_back(stage_block(st, sentence));
  return concat_features(blocks);
}

FeatureMatrix FeaturePipeline::transform(std::span<const Sentence> sentences) const {
  FeatureMatrix m;
  m.cols = output_dim();
  m.rows.reserve(sentences.size());
  for (const auto& s : sentences) m.rows.push_back(transform(s));
  return m;
}

namespace {

json eigen_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(r, c);
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd eigen_from_json(const json& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = n > 0 ? static_cast<Eigen::Index>(rows.at(0).size()) : 0;
  Eigen::MatrixXd m(n, d);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto row = rows.at(static_cast<std::size_t>(r)).get<std::vector<double>>();
    if (static_cast<Eigen::Index>(row.size()) != d) throw Error(ErrorCode::CorruptModelFile, "ragged matrix");
    for (Eigen::Index c = 0; c < d; ++c) m(r, c) = row[static_cast<std::size_t>(c)];
  }
  return m;
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd from_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

json FeaturePipeline::state() const {
  if (!fitted_) throw Error(ErrorCode::NotFitted, "feature pipeline has not been fitted");
  json stages = json::array();
  for (const auto& st : stages_) {
    json s = {{"component", st.source.to_string()}, {"raw_dim", st.raw_dim}};
    if (st.tfidf.fitted) {
      s["tfidf"] = {{"terms", st.tfidf.terms},
                    {"idf", st.tfidf.idf},
                    {"doc_count", st.tfidf.doc_count},
                    {"mask_numbers", st.tfidf.mask_numbers}};
    }
    if (st.pca) {
      s["pca"] = {{"mean", to_vector(st.pca->mean)},
                  {"components", eigen_to_json(st.pca->components)},
                  {"explained_variance", to_vector(st.pca->explained_variance)}};
    }
    stages.push_back(std::move(s));
  }
  return stages;
}

FeaturePipeline FeaturePipeline::restore(FeaturePipelineConfig config, const json& state, ResourceCache& cache) {
  FeaturePipeline p(std::move(config), cache);
  if (!state.is_array() || state.size() != p.stages_.size()) {
    throw Error(ErrorCode::CorruptModelFile, "pipeline state does not match its configuration");
  }
  for (std::size_t i = 0; i < p.stages_.size(); ++i) {
    auto& st = p.stages_[i];
    const auto& s = state[i];
    if (s.at("component").get<std::string>() != st.source.to_string()) {
      throw Error(ErrorCode::CorruptModelFile, "pipeline stage " + std::to_string(i) + " mismatch");
    }
    const auto raw_dim = s.at("raw_dim").get<std::size_t>();
    if (auto it = s.find("tfidf"); it != s.end()) {
      st.tfidf.terms = it->at("terms").get<std::vector<std::string>>();
      st.tfidf.idf = it->at("idf").get<std::vector<double>>();
      st.tfidf.doc_count = it->at("doc_count").get<std::size_t>();
      st.tfidf.mask_numbers = it->at("mask_numbers").get<bool>();
      if (st.tfidf.idf.size() != st.tfidf.terms.size()) throw Error(ErrorCode::CorruptModelFile, "idf size");
      for (std::size_t t = 0; t < st.tfidf.terms.size(); ++t) {
        st.tfidf.vocabulary.emplace(st.tfidf.terms[t], static_cast<std::uint32_t>(t));
      }
      st.tfidf.fitted = true;
      st.raw_dim = st.tfidf.terms.size();
    }
    if (st.raw_dim != raw_dim) {
      throw Error(ErrorCode::DimensionMismatch, "resource for " + st.source.to_string() + " has dimension " +
                                                    std::to_string(st.raw_dim) + ", model expects " +
                                                    std::to_string(raw_dim));
    }
    if (auto it = s.find("pca"); it != s.end()) {
      PcaModel pca;
      pca.mean = from_vector(it->at("mean").get<std::vector<double>>());
      pca.components = eigen_from_json(it->at("components"));
      pca.explained_variance = from_vector(it->at("explained_variance").get<std::vector<double>>());
      st.pca = std::move(pca);
    }
  }
  p.fitted_ = true;
  return p;
}

}  // namespace claimspot
