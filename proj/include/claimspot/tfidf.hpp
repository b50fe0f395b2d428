#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "claimspot/sparse.hpp"

namespace claimspot {

struct TfidfModel {
  std::unordered_map<std::string, std::uint32_t> vocabulary;
  std::vector<std::string> terms;  // column -> token
  std::vector<double> idf;
  std::size_t doc_count = 0;
  bool mask_numbers = false;
  bool fitted = false;
};

/// Smoothed idf: ln((1 + N) / (1 + df)) + 1. Columns are ordered by token.
/// When `mask_numbers` is set, number tokens are masked before counting.
TfidfModel fit_tfidf(std::span<const std::vector<std::string>> corpus, bool mask_numbers = false);

/// Raw counts times idf, L2-normalised; unknown tokens are ignored and an
/// all-unknown sentence yields the zero vector. Throws NotFitted.
SparseVector transform_tfidf(const TfidfModel& model, std::span<const std::string> tokens);

}  // namespace claimspot
