#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace claimspot {

struct TaggedToken {
  std::string text;
  std::string pos;
  std::string ner;
};

struct TaggedSentence {
  std::string sentence_id;
  std::vector<TaggedToken> tokens;
};

enum class TagField { Pos, Ner };

/// Output of an external tagger. The first JSONL line declares the closed tag
/// sets; their order fixes the column order of count features.
struct TaggedCorpus {
  std::vector<std::string> pos_tags;
  std::vector<std::string> ner_tags;
  std::unordered_map<std::string, TaggedSentence> sentences;

  const std::vector<std::string>& tagset(TagField field) const {
    return field == TagField::Pos ? pos_tags : ner_tags;
  }
  /// Throws MissingVector when the sentence was never tagged.
  const TaggedSentence& at(const std::string& sentence_id) const;
};

/// Throws UnknownTag for tags outside the header, DuplicateId, ParseError.
TaggedCorpus read_tagged_corpus(std::istream& in);
TaggedCorpus load_tagged_corpus(const std::filesystem::path& path);

/// Per-tag occurrence counts in tagset order. Throws UnknownTag.
std::vector<double> tag_count_features(const TaggedSentence& sentence, std::span<const std::string> tagset,
                                       TagField field);

}  // namespace claimspot
