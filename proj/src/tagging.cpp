#include "claimspot/tagging.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "claimspot/error.hpp"
#include "json.hpp"

namespace claimspot {

using nlohmann::json;

const TaggedSentence& TaggedCorpus::at(const std::string& sentence_id) const {
  auto it = sentences.find(sentence_id);
  if (it == sentences.end()) throw Error(ErrorCode::MissingVector, "no tagged entry for '" + sentence_id + "'");
  return it->second;
}

TaggedCorpus read_tagged_corpus(std::istream& in) {
  TaggedCorpus corpus;
  std::set<std::string> pos_set;
  std::set<std::string> ner_set;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json obj = json::parse(line);
      if (!header_seen) {
        if (!obj.contains("pos_tags") || !obj.contains("ner_tags")) {
          throw Error(ErrorCode::ParseError, "first line must declare pos_tags and ner_tags", lineno);
        }
        corpus.pos_tags = obj.at("pos_tags").get<std::vector<std::string>>();
        corpus.ner_tags = obj.at("ner_tags").get<std::vector<std::string>>();
        pos_set.insert(corpus.pos_tags.begin(), corpus.pos_tags.end());
        ner_set.insert(corpus.ner_tags.begin(), corpus.ner_tags.end());
        header_seen = true;
        continue;
      }
      TaggedSentence s;
      s.sentence_id = obj.at("sentence_id").get<std::string>();
      for (const auto& tok : obj.at("tokens")) {
        TaggedToken t{tok.at("t").get<std::string>(), tok.at("pos").get<std::string>(),
                      tok.at("ner").get<std::string>()};
        if (!pos_set.contains(t.pos)) throw Error(ErrorCode::UnknownTag, "POS tag '" + t.pos + "'", lineno);
        if (!ner_set.contains(t.ner)) throw Error(ErrorCode::UnknownTag, "NER tag '" + t.ner + "'", lineno);
        s.tokens.push_back(std::move(t));
      }
      auto id = s.sentence_id;
      if (!corpus.sentences.emplace(id, std::move(s)).second) {
        throw Error(ErrorCode::DuplicateId, "sentence id '" + id + "'", lineno);
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ParseError, e.what(), lineno);
    }
  }
  if (!header_seen) throw Error(ErrorCode::EmptyFile, "tagged corpus has no header line");
  return corpus;
}

TaggedCorpus load_tagged_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open tagged corpus " + path.string());
  return read_tagged_corpus(in);
}

std::vector<double> tag_count_features(const TaggedSentence& sentence, std::span<const std::string> tagset,
                                       TagField field) {
  std::vector<double> counts(tagset.size(), 0.0);
  for (const auto& tok : sentence.tokens) {
    const auto& tag = field == TagField::Pos ? tok.pos : tok.ner;
    auto it = std::find(tagset.begin(), tagset.end(), tag);
    if (it == tagset.end()) throw Error(ErrorCode::UnknownTag, "tag '" + tag + "' not in tagset");
    counts[static_cast<std::size_t>(it - tagset.begin())] += 1.0;
  }
  return counts;
}

}  // namespace claimspot
