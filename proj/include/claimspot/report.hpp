#pragma once

#include <string>
#include <vector>

#include "claimspot/annotation.hpp"
#include "claimspot/evaluation.hpp"

namespace claimspot {

/// One row of a binary results table: feature set, classifier, scores.
struct BinaryReportRow {
  std::string features;
  std::string classifier;
  BinaryMetrics metrics;
};

/// `header` lines are emitted first, each prefixed with "# ".
std::string format_binary_tsv(const std::vector<BinaryReportRow>& rows, const std::vector<std::string>& header = {});
std::string format_binary_table(const std::vector<BinaryReportRow>& rows,
                                const std::vector<std::string>& header = {});

/// Per-class rows plus "micro avg / total" and "macro avg / total".
std::string format_multiclass_tsv(const MulticlassReport& report);
std::string format_multiclass_table(const MulticlassReport& report);

/// Gold rows by predicted columns. Multiclass labels print as category names.
std::string format_confusion_tsv(const ConfusionMatrix& cm, bool binary);

/// Symmetric 7x7 grid with short category names; the diagonal is always 0.
std::string format_disagreement_tsv(const DisagreementMatrix& matrix);

std::string class_label_name(int label, bool binary);

}  // namespace claimspot
