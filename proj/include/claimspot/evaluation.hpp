#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "claimspot/linear_model.hpp"
#include "claimspot/pipeline.hpp"
#include "claimspot/schema.hpp"

namespace claimspot {

struct CvConfig {
  std::size_t k = 5;
  std::uint64_t seed = 42;
  bool honor_train_only = true;
  double threshold = 0.5;
};

/// Fold id for instances that are only ever used for training.
inline constexpr int kTrainOnlyFold = -1;

/// Seeded stratified assignment of instances to k test folds. Within each
/// class the shuffled instances are dealt round-robin, continuing the
/// counter across classes, so per-fold class counts are floor or ceil of
/// n_class / k. Instances flagged in `train_only` get kTrainOnlyFold.
/// Throws ClassTooSmall when a class has fewer than k testable instances.
std::vector<int> stratified_kfold(std::span<const int> labels, std::size_t k, std::uint64_t seed,
                                  std::span<const bool> train_only = {});

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Normal approximation p +- z * sqrt(p(1-p)/n), clipped to [0, 1].
Interval binomial_ci(double p, std::size_t n, double level = 0.95);
double z_for_level(double level);

struct BinaryMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  Interval p_interval;  // n = predicted positives
  Interval r_interval;  // n = gold positives
  std::size_t n_gold_pos = 0;
  std::size_t n_pred_pos = 0;
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

/// Zero denominators give 0 and log a warning. Throws LengthMismatch.
BinaryMetrics binary_metrics(std::span<const BinaryLabel> preds, std::span<const BinaryLabel> golds,
                             double level = 0.95);

/// Rows are gold, columns predicted; classes as given.
struct ConfusionMatrix {
  std::vector<int> classes;
  std::vector<std::vector<std::size_t>> counts;

  std::size_t total() const;
};

/// Throws UnknownLabel for labels outside `classes`, LengthMismatch.
ConfusionMatrix confusion_matrix(std::span<const int> preds, std::span<const int> golds,
                                 std::span<const int> classes);

struct ClassScores {
  int label = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct AveragedScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct MulticlassReport {
  std::vector<ClassScores> per_class;
  AveragedScores micro;
  AveragedScores macro;
  std::size_t total = 0;
};

/// One-vs-rest scores per class; micro pools counts, macro averages classes.
/// When `classes` is empty the sorted union of labels is used.
MulticlassReport multiclass_report(std::span<const int> preds, std::span<const int> golds,
                                   std::span<const int> classes = {});

struct PooledPrediction {
  std::size_t index = 0;  // into the dataset
  int fold = 0;
  Label gold;
  Label predicted;
  std::optional<double> probability;
};

struct CvResult {
  std::vector<int> folds;
  std::vector<PooledPrediction> pooled;  // ascending index
  std::optional<BinaryMetrics> binary;
  std::optional<MulticlassReport> multiclass;
  ConfusionMatrix confusion;
};

/// Stratification labels: binary as 0/1, categories by code.
std::vector<int> stratification_labels(std::span<const LabeledSentence> dataset);
std::vector<int> make_folds(std::span<const LabeledSentence> dataset, const CvConfig& cv);

/// Per fold: fit features and classifier on the training part only, predict
/// the test part. Metrics are computed once on the pooled predictions.
/// `folds` may carry a precomputed split (as from make_folds).
CvResult cross_validate(const FeaturePipelineConfig& features, const TrainConfig& train,
                        std::span<const LabeledSentence> dataset, const CvConfig& cv,
                        std::span<const int> folds = {});

}  // namespace claimspot
