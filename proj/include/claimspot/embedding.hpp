#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace claimspot {

/// Word vectors in GloVe text format (`token v1 ... vd` per line).
struct EmbeddingLexicon {
  std::size_t dim = 0;
  std::unordered_map<std::string, std::vector<double>> vectors;

  const std::vector<double>* find(const std::string& token) const;
};

/// Duplicate tokens keep their first vector and log a warning. Throws
/// DimensionMismatch (with line) or EmptyFile.
EmbeddingLexicon read_embedding_lexicon(std::istream& in);
EmbeddingLexicon load_embedding_lexicon(const std::filesystem::path& path);

/// Mean of the vectors of in-lexicon tokens; zero vector when none are known.
std::vector<double> embed_average(const EmbeddingLexicon& lexicon, std::span<const std::string> tokens);

/// Externally produced sentence encodings keyed by sentence id.
struct SentenceVectors {
  std::size_t dim = 0;
  std::unordered_map<std::string, std::vector<double>> vectors;

  /// Throws MissingVector.
  const std::vector<double>& at(const std::string& sentence_id) const;
};

/// TSV rows `sentence_id<TAB>v1<TAB>...<TAB>vd`. Throws DimensionMismatch, DuplicateId.
SentenceVectors read_sentence_vectors(std::istream& in);
SentenceVectors load_sentence_vectors(const std::filesystem::path& path);

}  // namespace claimspot
