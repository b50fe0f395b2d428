#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "claimspot/schema.hpp"

// Deterministic synthetic fixtures standing in for real annotated
// transcripts. Text is plain ASCII: each sentence starts with a capital
// letter, ends with a period and contains no abbreviations.
namespace claimspot::synthetic {

/// Binary corpus whose classes draw from separate vocabularies over shared
/// filler words. Exactly round(n * claim_fraction) sentences are claims.
std::vector<LabeledSentence> labeled_corpus(std::size_t n, double claim_fraction, std::uint64_t seed);

/// Seven-way corpus with one vocabulary per category.
std::vector<LabeledSentence> multiclass_corpus(std::size_t n, std::uint64_t seed);

struct AnnotationCorpus {
  std::vector<Sentence> sentences;
  std::vector<AnnotationRecord> annotations;
};

/// Each sentence gets 1..5 votes from distinct annotators; votes agree with
/// a latent category with probability `agreement`.
AnnotationCorpus annotation_corpus(std::size_t n_sentences, double agreement, std::uint64_t seed);

/// Running transcript text made of `n` sentences from both classes.
std::vector<std::string> transcript_sentences(std::size_t n, std::uint64_t seed);

/// GloVe-format lexicon over the synthetic vocabulary; claim words lean
/// positive on the first coordinate.
std::string lexicon_text(std::size_t dim, std::uint64_t seed);

}  // namespace claimspot::synthetic
