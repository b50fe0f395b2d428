#include "claimspot/schema.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <spdlog/spdlog.h>

#include "claimspot/error.hpp"
#include "json.hpp"

namespace claimspot {

using nlohmann::json;

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateVote: return "DuplicateVote";
    case ErrorCode::UnknownCategoryCode: return "UnknownCategoryCode";
    case ErrorCode::OverlappingSets: return "OverlappingSets";
    case ErrorCode::IncompleteCoverage: return "IncompleteCoverage";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::NotFitted: return "NotFitted";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::MissingVector: return "MissingVector";
    case ErrorCode::UnknownTag: return "UnknownTag";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SingleClassInput: return "SingleClassInput";
    case ErrorCode::HingeModelHasNoProbability: return "HingeModelHasNoProbability";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::CorruptModelFile: return "CorruptModelFile";
    case ErrorCode::ClassTooSmall: return "ClassTooSmall";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::StoreUnavailable: return "StoreUnavailable";
    case ErrorCode::SessionNotFound: return "SessionNotFound";
    case ErrorCode::ItemNotFound: return "ItemNotFound";
    case ErrorCode::ModelNotLoaded: return "ModelNotLoaded";
    case ErrorCode::DuplicateSession: return "DuplicateSession";
  }
  return "Unknown";
}

namespace {

std::string format_message(ErrorCode code, const std::string& message,
                           std::optional<std::size_t> line) {
  std::string out(error_code_name(code));
  if (line) out += " (line " + std::to_string(*line) + ")";
  if (!message.empty()) out += ": " + message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::optional<std::size_t> line)
    : std::runtime_error(format_message(code, message, line)), code_(code), line_(line) {}

std::optional<ClaimCategory> category_from_code(int code) {
  if (code < 1 || code > 7) return std::nullopt;
  return static_cast<ClaimCategory>(code);
}

std::string_view category_name(ClaimCategory c) {
  switch (c) {
    case ClaimCategory::PersonalExperience: return "Personal experience";
    case ClaimCategory::Quantity: return "Quantity in the past or present";
    case ClaimCategory::CorrelationCausation: return "Correlation or causation";
    case ClaimCategory::LawsRules: return "Current laws or rules of operation";
    case ClaimCategory::Prediction: return "Prediction";
    case ClaimCategory::OtherClaim: return "Other type of claim";
    case ClaimCategory::NotAClaim: return "Not a claim";
  }
  return "?";
}

std::string_view category_short_name(ClaimCategory c) {
  switch (c) {
    case ClaimCategory::PersonalExperience: return "Pers";
    case ClaimCategory::Quantity: return "Qu";
    case ClaimCategory::CorrelationCausation: return "Corr";
    case ClaimCategory::LawsRules: return "Law";
    case ClaimCategory::Prediction: return "Pred";
    case ClaimCategory::OtherClaim: return "Other";
    case ClaimCategory::NotAClaim: return "Not";
  }
  return "?";
}

std::string_view to_string(BinaryLabel label) {
  return label == BinaryLabel::Claim ? "claim" : "nonclaim";
}

std::optional<BinaryLabel> binary_label_from_string(std::string_view s) {
  if (s == "claim") return BinaryLabel::Claim;
  if (s == "nonclaim") return BinaryLabel::NonClaim;
  return std::nullopt;
}

LabelMapping LabelMapping::row_a() { return {{2}, {3, 4, 6, 7}, {1, 5}}; }
LabelMapping LabelMapping::row_b() { return {{2, 3, 4, 5}, {1, 6, 7}, {}}; }

LabelMapping LabelMapping::named(std::string_view name) {
  if (name == "A" || name == "a") return row_a();
  if (name == "B" || name == "b") return row_b();
  throw Error(ErrorCode::InvalidArgument, "unknown mapping '" + std::string(name) + "' (expected A or B)");
}

void validate_mapping(const LabelMapping& mapping) {
  std::map<int, int> seen;
  for (const auto* set : {&mapping.claim_set, &mapping.nonclaim_set, &mapping.omitted_set}) {
    for (int code : *set) {
      if (code < 1 || code > 7) {
        throw Error(ErrorCode::UnknownCategoryCode, "code " + std::to_string(code) + " in mapping");
      }
      if (++seen[code] > 1) {
        throw Error(ErrorCode::OverlappingSets, "code " + std::to_string(code) + " appears in two sets");
      }
    }
  }
  for (int code = 1; code <= 7; ++code) {
    if (!seen.contains(code)) {
      throw Error(ErrorCode::IncompleteCoverage, "code " + std::to_string(code) + " is not assigned");
    }
  }
}

std::optional<BinaryLabel> map_to_binary(ClaimCategory category, const LabelMapping& mapping) {
  const int code = code_of(category);
  if (mapping.claim_set.contains(code)) return BinaryLabel::Claim;
  if (mapping.nonclaim_set.contains(code)) return BinaryLabel::NonClaim;
  return std::nullopt;
}

namespace {

// Parses a JSONL stream, skipping blank lines. Unknown top-level fields are
// reported once per field name.
template <typename Fn>
void for_each_record(std::istream& in, std::initializer_list<std::string_view> known, Fn&& fn) {
  std::string line;
  std::size_t lineno = 0;
  std::set<std::string> warned;
  while (std::getline(in, line)) {
    ++lineno;
    if (std::all_of(line.begin(), line.end(), [](unsigned char ch) { return std::isspace(ch); })) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::ParseError, e.what(), lineno);
    }
    if (!obj.is_object()) throw Error(ErrorCode::ParseError, "record is not an object", lineno);
    for (const auto& item : obj.items()) {
      if (std::find(known.begin(), known.end(), item.key()) == known.end() &&
          warned.insert(item.key()).second) {
        spdlog::warn("ignoring unknown field '{}' (first seen on line {})", item.key(), lineno);
      }
    }
    try {
      fn(obj, lineno);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ParseError, e.what(), lineno);
    }
  }
}

std::string required_string(const json& obj, const char* key, std::size_t lineno) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw Error(ErrorCode::ParseError, std::string("missing string field '") + key + "'", lineno);
  }
  return it->get<std::string>();
}

ClaimCategory parse_category(const json& value, std::size_t lineno) {
  if (!value.is_number_integer()) throw Error(ErrorCode::ParseError, "category must be an integer", lineno);
  const auto code = value.get<std::int64_t>();
  auto c = (code >= 1 && code <= 7) ? category_from_code(static_cast<int>(code)) : std::nullopt;
  if (!c) throw Error(ErrorCode::UnknownCategoryCode, "category " + std::to_string(code), lineno);
  return *c;
}

Sentence parse_sentence_fields(const json& obj, std::size_t lineno) {
  Sentence s;
  s.id = required_string(obj, "id", lineno);
  if (s.id.empty()) throw Error(ErrorCode::ParseError, "empty sentence id", lineno);
  s.text = required_string(obj, "text", lineno);
  if (auto it = obj.find("context"); it != obj.end() && !it->is_null()) {
    s.context = it->get<std::vector<std::string>>();
    if (s.context.size() > 2) throw Error(ErrorCode::ParseError, "context holds more than 2 sentences", lineno);
  }
  if (auto it = obj.find("source"); it != obj.end() && !it->is_null()) s.source = it->get<std::string>();
  if (auto it = obj.find("seq"); it != obj.end() && !it->is_null()) {
    const auto seq = it->get<std::int64_t>();
    if (seq < 0) throw Error(ErrorCode::ParseError, "seq must be non-negative", lineno);
    s.seq = seq;
  }
  return s;
}

json sentence_fields(const Sentence& s) {
  json obj = {{"id", s.id}, {"text", s.text}, {"context", s.context}, {"source", s.source}};
  if (s.seq) obj["seq"] = *s.seq;
  return obj;
}

template <typename T, typename Reader>
std::vector<T> load_file(const std::filesystem::path& path, Reader reader) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return reader(in);
}

template <typename Writer, typename T>
void save_file(const std::filesystem::path& path, const T& items, Writer writer) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  writer(out, items);
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace

std::vector<AnnotationRecord> read_annotations(std::istream& in) {
  std::vector<AnnotationRecord> records;
  std::set<std::pair<std::string, std::string>> votes;
  for_each_record(in, {"sentence_id", "annotator_id", "category", "timestamp"},
                  [&](const json& obj, std::size_t lineno) {
                    AnnotationRecord r;
                    r.sentence_id = required_string(obj, "sentence_id", lineno);
                    r.annotator_id = required_string(obj, "annotator_id", lineno);
                    auto cat = obj.find("category");
                    if (cat == obj.end()) throw Error(ErrorCode::ParseError, "missing field 'category'", lineno);
                    r.category = parse_category(*cat, lineno);
                    if (auto ts = obj.find("timestamp"); ts != obj.end() && !ts->is_null()) {
                      r.timestamp = ts->get<std::string>();
                    }
                    if (!votes.emplace(r.sentence_id, r.annotator_id).second) {
                      throw Error(ErrorCode::DuplicateVote,
                                  "annotator '" + r.annotator_id + "' voted twice on '" + r.sentence_id + "'",
                                  lineno);
                    }
                    records.push_back(std::move(r));
                  });
  return records;
}

std::vector<Sentence> read_sentences(std::istream& in) {
  std::vector<Sentence> sentences;
  std::set<std::string> ids;
  for_each_record(in, {"id", "text", "context", "source", "seq"}, [&](const json& obj, std::size_t lineno) {
    Sentence s = parse_sentence_fields(obj, lineno);
    if (!ids.insert(s.id).second) throw Error(ErrorCode::DuplicateId, "sentence id '" + s.id + "'", lineno);
    sentences.push_back(std::move(s));
  });
  return sentences;
}

std::vector<LabeledSentence> read_labeled_dataset(std::istream& in) {
  std::vector<LabeledSentence> dataset;
  std::set<std::string> ids;
  std::optional<LabelKind> kind;
  for_each_record(in, {"id", "text", "label", "train_only", "context", "source", "seq"},
                  [&](const json& obj, std::size_t lineno) {
                    LabeledSentence ls{parse_sentence_fields(obj, lineno), BinaryLabel::NonClaim, false};
                    auto label = obj.find("label");
                    if (label == obj.end()) throw Error(ErrorCode::ParseError, "missing field 'label'", lineno);
                    if (label->is_string()) {
                      auto b = binary_label_from_string(label->get<std::string>());
                      if (!b) throw Error(ErrorCode::UnknownLabel, label->get<std::string>(), lineno);
                      ls.label = *b;
                    } else {
                      ls.label = parse_category(*label, lineno);
                    }
                    if (auto t = obj.find("train_only"); t != obj.end() && !t->is_null()) {
                      ls.train_only = t->get<bool>();
                    }
                    if (kind && *kind != ls.kind()) {
                      throw Error(ErrorCode::ParseError, "dataset mixes binary and category labels", lineno);
                    }
                    kind = ls.kind();
                    if (!ids.insert(ls.sentence.id).second) {
                      throw Error(ErrorCode::DuplicateId, "sentence id '" + ls.sentence.id + "'", lineno);
                    }
                    dataset.push_back(std::move(ls));
                  });
  return dataset;
}

std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path) {
  return load_file<AnnotationRecord>(path, [](std::istream& in) { return read_annotations(in); });
}

std::vector<Sentence> load_sentences(const std::filesystem::path& path) {
  return load_file<Sentence>(path, [](std::istream& in) { return read_sentences(in); });
}

std::vector<LabeledSentence> load_labeled_dataset(const std::filesystem::path& path) {
  return load_file<LabeledSentence>(path, [](std::istream& in) { return read_labeled_dataset(in); });
}

void write_annotations(std::ostream& out, const std::vector<AnnotationRecord>& records) {
  for (const auto& r : records) {
    json obj = {{"sentence_id", r.sentence_id},
                {"annotator_id", r.annotator_id},
                {"category", code_of(r.category)},
                {"timestamp", r.timestamp}};
    out << obj.dump() << '\n';
  }
}

void write_sentences(std::ostream& out, const std::vector<Sentence>& sentences) {
  for (const auto& s : sentences) out << sentence_fields(s).dump() << '\n';
}

void write_labeled_dataset(std::ostream& out, const std::vector<LabeledSentence>& dataset) {
  for (const auto& ls : dataset) {
    json obj = sentence_fields(ls.sentence);
    if (const auto* b = std::get_if<BinaryLabel>(&ls.label)) {
      obj["label"] = std::string(to_string(*b));
    } else {
      obj["label"] = code_of(std::get<ClaimCategory>(ls.label));
    }
    if (ls.train_only) obj["train_only"] = true;
    out << obj.dump() << '\n';
  }
}

void save_annotations(const std::filesystem::path& path, const std::vector<AnnotationRecord>& records) {
  save_file(path, records, [](std::ostream& o, const auto& r) { write_annotations(o, r); });
}

void save_sentences(const std::filesystem::path& path, const std::vector<Sentence>& sentences) {
  save_file(path, sentences, [](std::ostream& o, const auto& s) { write_sentences(o, s); });
}

void save_labeled_dataset(const std::filesystem::path& path, const std::vector<LabeledSentence>& dataset) {
  save_file(path, dataset, [](std::ostream& o, const auto& d) { write_labeled_dataset(o, d); });
}

}  // namespace claimspot
