#include "claimspot/embedding.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "claimspot/error.hpp"

namespace claimspot {

namespace {

double parse_double(const std::string& s, std::size_t lineno) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw Error(ErrorCode::ParseError, "not a number: '" + s + "'", lineno);
  return v;
}

}  // namespace

const std::vector<double>* EmbeddingLexicon::find(const std::string& token) const {
  auto it = vectors.find(token);
  return it == vectors.end() ? nullptr : &it->second;
}

EmbeddingLexicon read_embedding_lexicon(std::istream& in) {
  EmbeddingLexicon lex;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream fields(line);
    std::string token;
    if (!(fields >> token)) continue;
    std::vector<double> vec;
    std::string num;
    while (fields >> num) vec.push_back(parse_double(num, lineno));
    if (vec.empty()) throw Error(ErrorCode::DimensionMismatch, "token '" + token + "' has no vector", lineno);
    if (lex.dim == 0) {
      lex.dim = vec.size();
    } else if (vec.size() != lex.dim) {
      throw Error(ErrorCode::DimensionMismatch,
                  "expected " + std::to_string(lex.dim) + " values, got " + std::to_string(vec.size()), lineno);
    }
    if (!lex.vectors.emplace(token, std::move(vec)).second) {
      spdlog::warn("duplicate lexicon token '{}' on line {}; keeping the first vector", token, lineno);
    }
  }
  if (lex.vectors.empty()) throw Error(ErrorCode::EmptyFile, "embedding lexicon has no entries");
  return lex;
}

EmbeddingLexicon load_embedding_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open lexicon " + path.string());
  return read_embedding_lexicon(in);
}

std::vector<double> embed_average(const EmbeddingLexicon& lexicon, std::span<const std::string> tokens) {
  std::vector<double> sum(lexicon.dim, 0.0);
  std::size_t known = 0;
  for (const auto& t : tokens) {
    const auto* v = lexicon.find(t);
    if (!v) continue;
    ++known;
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += (*v)[i];
  }
  if (known > 0) {
    for (auto& x : sum) x /= static_cast<double>(known);
  }
  return sum;
}

const std::vector<double>& SentenceVectors::at(const std::string& sentence_id) const {
  auto it = vectors.find(sentence_id);
  if (it == vectors.end()) throw Error(ErrorCode::MissingVector, "no sentence vector for '" + sentence_id + "'");
  return it->second;
}

SentenceVectors read_sentence_vectors(std::istream& in) {
  SentenceVectors out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      auto tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() < 2) throw Error(ErrorCode::DimensionMismatch, "row has no vector", lineno);
    std::vector<double> vec;
    vec.reserve(fields.size() - 1);
    for (std::size_t i = 1; i < fields.size(); ++i) vec.push_back(parse_double(fields[i], lineno));
    if (out.dim == 0) {
      out.dim = vec.size();
    } else if (vec.size() != out.dim) {
      throw Error(ErrorCode::DimensionMismatch,
                  "expected " + std::to_string(out.dim) + " values, got " + std::to_string(vec.size()), lineno);
    }
    if (!out.vectors.emplace(fields[0], std::move(vec)).second) {
      throw Error(ErrorCode::DuplicateId, "sentence id '" + fields[0] + "'", lineno);
    }
  }
  if (out.vectors.empty()) throw Error(ErrorCode::EmptyFile, "sentence vector file has no rows");
  return out;
}

SentenceVectors load_sentence_vectors(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open sentence vectors " + path.string());
  return read_sentence_vectors(in);
}

}  // namespace claimspot
