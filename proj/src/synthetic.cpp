#include "claimspot/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <string_view>

#include <fmt/format.h>

namespace claimspot::synthetic {

namespace {

using Words = std::vector<std::string_view>;

const Words kFiller = {"the", "we", "people", "government", "minister", "country", "today", "this",
                       "that", "about", "week", "year", "party", "know", "said", "very",
                       "more", "all", "there", "our", "they", "now", "here", "and"};

const Words kClaimWords = {"percent", "million", "rose", "fell", "increased", "billion", "law", "illegal",
                           "causes", "will", "forecast", "rate", "figures", "statistics", "unemployment",
                           "inflation", "spending", "budget", "growth", "tax", "since", "compared"};

const Words kNonClaimWords = {"think", "feel", "thank", "question", "wonderful", "honestly", "maybe",
                              "welcome", "really", "agree", "sorry", "hope", "please", "guess",
                              "lovely", "believe", "fantastic", "remember", "okay", "listen"};

const std::array<Words, 7> kCategoryWords = {{
    {"i", "my", "myself", "mortgage", "deposit", "struggled", "personally", "family"},
    {"percent", "million", "billion", "figures", "doubled", "halved", "largest", "average"},
    {"causes", "because", "linked", "correlation", "leads", "predictor", "effect", "result"},
    {"law", "illegal", "rules", "must", "legislation", "allowed", "regulation", "court"},
    {"will", "forecast", "future", "expected", "predicts", "projected", "next", "soon"},
    {"voted", "promised", "poll", "support", "quote", "definition", "advocated", "opinion"},
    {"thank", "question", "welcome", "hello", "really", "okay", "lovely", "listen"},
}};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  template <typename T>
  const T& pick(const std::vector<T>& v) { return v[below(v.size())]; }

 private:
  std::mt19937_64 engine_;
};

std::string make_sentence(Rng& rng, const Words& signal, const Words* noise, std::size_t n_signal,
                          bool with_number) {
  const std::size_t length = 7 + rng.below(8);
  std::vector<std::string> words;
  for (std::size_t i = 0; i < length; ++i) words.emplace_back(rng.pick(kFiller));
  for (std::size_t i = 0; i < n_signal; ++i) words[rng.below(words.size())] = std::string(rng.pick(signal));
  if (noise && rng.uniform() < 0.15) words[rng.below(words.size())] = std::string(rng.pick(*noise));
  if (with_number) words[1 + rng.below(words.size() - 1)] = std::to_string(2 + rng.below(98));
  std::string text;
  for (const auto& w : words) {
    if (!text.empty()) text += ' ';
    text += w;
  }
  text[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(text[0])));
  return text + ".";
}

}  // namespace

std::vector<LabeledSentence> labeled_corpus(std::size_t n, double claim_fraction, std::uint64_t seed) {
  Rng rng(seed);
  const auto n_claims = static_cast<std::size_t>(std::llround(static_cast<double>(n) * claim_fraction));
  std::vector<bool> is_claim(n, false);
  std::fill(is_claim.begin(), is_claim.begin() + static_cast<std::ptrdiff_t>(n_claims), true);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = rng.below(i);
    std::swap(is_claim[i - 1], is_claim[j]);
  }
  std::vector<LabeledSentence> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool claim = is_claim[i];
    const std::size_t n_signal = 2 + rng.below(2);
    const bool number = claim ? rng.uniform() < 0.5 : rng.uniform() < 0.05;
    Sentence s;
    s.id = fmt::format("syn-{:05d}", i);
    s.text = make_sentence(rng, claim ? kClaimWords : kNonClaimWords, claim ? &kNonClaimWords : &kClaimWords,
                           n_signal, number);
    s.source = "synthetic";
    out.push_back({std::move(s), claim ? BinaryLabel::Claim : BinaryLabel::NonClaim, false});
  }
  return out;
}

std::vector<LabeledSentence> multiclass_corpus(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<LabeledSentence> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto category = kAllCategories[i % kAllCategories.size()];
    Sentence s;
    s.id = fmt::format("mc-{:05d}", i);
    s.text = make_sentence(rng, kCategoryWords[static_cast<std::size_t>(code_of(category) - 1)], nullptr,
                           2 + rng.below(2), false);
    s.source = "synthetic";
    out.push_back({std::move(s), category, false});
  }
  return out;
}

AnnotationCorpus annotation_corpus(std::size_t n_sentences, double agreement, std::uint64_t seed) {
  Rng rng(seed);
  AnnotationCorpus corpus;
  const std::vector<std::string> annotators = {"a01", "a02", "a03", "a04", "a05", "a06", "a07", "a08"};
  for (std::size_t i = 0; i < n_sentences; ++i) {
    Sentence s;
    s.id = fmt::format("ann-{:05d}", i);
    const auto latent = kAllCategories[rng.below(kAllCategories.size())];
    s.text = make_sentence(rng, kCategoryWords[static_cast<std::size_t>(code_of(latent) - 1)], nullptr, 2, false);
    s.source = "synthetic";
    const std::size_t votes = 1 + rng.below(5);
    std::set<std::size_t> chosen;
    while (chosen.size() < votes) chosen.insert(rng.below(annotators.size()));
    for (std::size_t a : chosen) {
      const auto cat = rng.uniform() < agreement ? latent : kAllCategories[rng.below(kAllCategories.size())];
      corpus.annotations.push_back({s.id, annotators[a], cat, fmt::format("2018-09-12T10:{:02d}:00Z", a)});
    }
    corpus.sentences.push_back(std::move(s));
  }
  return corpus;
}

std::vector<std::string> transcript_sentences(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    const bool claim = rng.uniform() < 0.3;
    out.push_back(make_sentence(rng, claim ? kClaimWords : kNonClaimWords, nullptr, 1 + rng.below(3),
                                claim && rng.uniform() < 0.5));
  }
  return out;
}

std::string lexicon_text(std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  std::set<std::string_view> vocab(kFiller.begin(), kFiller.end());
  vocab.insert(kClaimWords.begin(), kClaimWords.end());
  vocab.insert(kNonClaimWords.begin(), kNonClaimWords.end());
  const std::set<std::string_view> claims(kClaimWords.begin(), kClaimWords.end());
  const std::set<std::string_view> nonclaims(kNonClaimWords.begin(), kNonClaimWords.end());
  std::ostringstream out;
  for (auto word : vocab) {
    out << word;
    for (std::size_t d = 0; d < dim; ++d) {
      double v = rng.uniform() - 0.5;
      if (d == 0 && claims.contains(word)) v += 1.0;
      if (d == 0 && nonclaims.contains(word)) v -= 1.0;
      out << ' ' << fmt::format("{:.6f}", v);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace claimspot::synthetic
