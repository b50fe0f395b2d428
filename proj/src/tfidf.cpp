#include "claimspot/tfidf.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "claimspot/error.hpp"
#include "claimspot/text.hpp"

namespace claimspot {

TfidfModel fit_tfidf(std::span<const std::vector<std::string>> corpus, bool mask_numbers) {
  if (corpus.empty()) throw Error(ErrorCode::InvalidArgument, "cannot fit TF-IDF on an empty corpus");
  std::map<std::string, std::size_t> df;
  for (const auto& doc : corpus) {
    std::set<std::string> seen;
    for (const auto& t : doc) seen.insert(mask_numbers && is_number_token(t) ? std::string(kNumberToken) : t);
    for (const auto& t : seen) ++df[t];
  }
  TfidfModel model;
  model.doc_count = corpus.size();
  model.mask_numbers = mask_numbers;
  model.fitted = true;
  const double n = static_cast<double>(corpus.size());
  for (const auto& [term, count] : df) {
    model.vocabulary.emplace(term, static_cast<std::uint32_t>(model.terms.size()));
    model.terms.push_back(term);
    model.idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
  }
  return model;
}

SparseVector transform_tfidf(const TfidfModel& model, std::span<const std::string> tokens) {
  if (!model.fitted) throw Error(ErrorCode::NotFitted, "TF-IDF model has not been fitted");
  std::map<std::uint32_t, double> counts;
  for (const auto& raw : tokens) {
    const std::string& t = raw;
    auto it = model.vocabulary.find(model.mask_numbers && is_number_token(t) ? std::string(kNumberToken) : t);
    if (it != model.vocabulary.end()) counts[it->second] += 1.0;
  }
  SparseVector v;
  v.dim = model.terms.size();
  double norm = 0.0;
  for (const auto& [col, tf] : counts) {
    const double w = tf * model.idf[col];
    v.index.push_back(col);
    v.value.push_back(w);
    norm += w * w;
  }
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (auto& x : v.value) x /= norm;
  }
  return v;
}

}  // namespace claimspot
