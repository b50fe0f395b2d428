#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "claimspot/schema.hpp"

namespace claimspot {

/// Votes grouped by unit (sentence). Codes are nominal values; for raw data
/// they are the category codes 1..7.
struct ReliabilityData {
  std::map<std::string, std::vector<std::pair<std::string, int>>> units;

  static ReliabilityData from_annotations(std::span<const AnnotationRecord> records);
  /// Recodes votes as claim=1 / nonclaim=2 under `mapping`; omitted votes are dropped.
  static ReliabilityData binarized(std::span<const AnnotationRecord> records, const LabelMapping& mapping);

  std::size_t vote_count() const;
};

struct AgreementReport {
  double alpha = 1.0;
  std::size_t n_units = 0;  // units with >= 2 votes
  std::size_t n_votes = 0;  // pairable values in those units
};

/// Nominal-metric Krippendorff's alpha via the coincidence matrix. Units with
/// a single vote are not pairable and are skipped. Throws InsufficientData
/// when no unit has two votes.
AgreementReport krippendorff_alpha(const ReliabilityData& data);

/// Unordered pairs of differing votes, counted per unit. counts[i][j] is the
/// cell for codes i+1 and j+1; the diagonal stays zero.
struct DisagreementMatrix {
  std::array<std::array<std::int64_t, 7>, 7> counts{};

  std::int64_t total() const;  // sum over i < j
};

DisagreementMatrix disagreement_matrix(const ReliabilityData& data);

enum class MajorityOutcome { Resolved, TooFewAnnotators, NoMajority };

struct MajorityResult {
  MajorityOutcome outcome = MajorityOutcome::TooFewAnnotators;
  std::optional<ClaimCategory> category;
};

inline constexpr std::size_t kMinAnnotators = 3;

/// Resolved iff at least three votes were cast and one category holds
/// strictly more than half of them.
MajorityResult aggregate_majority(std::span<const ClaimCategory> votes);

struct AggregationSummary {
  std::size_t resolved = 0;     // majority found (includes omitted)
  std::size_t too_few = 0;
  std::size_t no_majority = 0;
  std::size_t omitted = 0;      // resolved to a category the mapping omits
  std::size_t claims = 0;
  std::size_t nonclaims = 0;

  friend bool operator==(const AggregationSummary&, const AggregationSummary&) = default;
};

struct AggregatedDataset {
  std::vector<LabeledSentence> items;
  AggregationSummary summary;
};

/// Resolves each annotated sentence at category level, then maps to binary.
/// Output follows the order of `sentences`; sentences without any vote are
/// not counted.
AggregatedDataset build_binary_dataset(std::span<const Sentence> sentences,
                                       std::span<const AnnotationRecord> annotations,
                                       const LabelMapping& mapping);

/// Same vote rule, keeping the seven categories as labels.
AggregatedDataset build_multiclass_dataset(std::span<const Sentence> sentences,
                                           std::span<const AnnotationRecord> annotations);

}  // namespace claimspot
