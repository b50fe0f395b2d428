#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace claimspot {

/// The closed seven-way claim taxonomy. Codes are fixed: downstream mappings
/// and reports index by them.
enum class ClaimCategory : int {
  PersonalExperience = 1,
  Quantity = 2,
  CorrelationCausation = 3,
  LawsRules = 4,
  Prediction = 5,
  OtherClaim = 6,
  NotAClaim = 7,
};

inline constexpr std::array<ClaimCategory, 7> kAllCategories = {
    ClaimCategory::PersonalExperience, ClaimCategory::Quantity,
    ClaimCategory::CorrelationCausation, ClaimCategory::LawsRules,
    ClaimCategory::Prediction, ClaimCategory::OtherClaim,
    ClaimCategory::NotAClaim};

constexpr int code_of(ClaimCategory c) { return static_cast<int>(c); }
std::optional<ClaimCategory> category_from_code(int code);
std::string_view category_name(ClaimCategory c);
/// Short label used in report tables ("Pers", "Qu", ...).
std::string_view category_short_name(ClaimCategory c);

enum class BinaryLabel { NonClaim = 0, Claim = 1 };

std::string_view to_string(BinaryLabel label);
std::optional<BinaryLabel> binary_label_from_string(std::string_view s);

struct Sentence {
  std::string id;
  std::string text;
  std::vector<std::string> context;  // at most two preceding sentences
  std::string source;
  std::optional<std::int64_t> seq;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct AnnotationRecord {
  std::string sentence_id;
  std::string annotator_id;
  ClaimCategory category{ClaimCategory::NotAClaim};
  std::string timestamp;

  friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

/// Partition of the seven category codes into claim / non-claim / omitted.
struct LabelMapping {
  std::set<int> claim_set;
  std::set<int> nonclaim_set;
  std::set<int> omitted_set;

  /// Row 1: high-agreement mapping that omits personal experience and predictions.
  static LabelMapping row_a();
  /// Row 2: the recall-oriented mapping used for the binary experiments.
  static LabelMapping row_b();
  /// "A" or "B" (case-insensitive).
  static LabelMapping named(std::string_view name);
};

/// Throws Error(OverlappingSets) or Error(IncompleteCoverage) naming the code.
void validate_mapping(const LabelMapping& mapping);

std::optional<BinaryLabel> map_to_binary(ClaimCategory category, const LabelMapping& mapping);

enum class LabelKind { Binary, Multiclass };
using Label = std::variant<BinaryLabel, ClaimCategory>;

struct LabeledSentence {
  Sentence sentence;
  Label label;
  bool train_only = false;

  LabelKind kind() const {
    return std::holds_alternative<BinaryLabel>(label) ? LabelKind::Binary : LabelKind::Multiclass;
  }

  friend bool operator==(const LabeledSentence&, const LabeledSentence&) = default;
};

// JSONL readers. Each throws Error with the offending 1-based line number.
std::vector<AnnotationRecord> read_annotations(std::istream& in);
std::vector<Sentence> read_sentences(std::istream& in);
std::vector<LabeledSentence> read_labeled_dataset(std::istream& in);

std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path);
std::vector<Sentence> load_sentences(const std::filesystem::path& path);
std::vector<LabeledSentence> load_labeled_dataset(const std::filesystem::path& path);

void write_annotations(std::ostream& out, const std::vector<AnnotationRecord>& records);
void write_sentences(std::ostream& out, const std::vector<Sentence>& sentences);
void write_labeled_dataset(std::ostream& out, const std::vector<LabeledSentence>& dataset);

void save_annotations(const std::filesystem::path& path, const std::vector<AnnotationRecord>& records);
void save_sentences(const std::filesystem::path& path, const std::vector<Sentence>& sentences);
void save_labeled_dataset(const std::filesystem::path& path,
                          const std::vector<LabeledSentence>& dataset);

}  // namespace claimspot
