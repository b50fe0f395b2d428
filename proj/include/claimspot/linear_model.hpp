#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "claimspot/schema.hpp"
#include "claimspot/sparse.hpp"

namespace claimspot {

enum class LossKind { Logistic, Hinge };

std::string_view to_string(LossKind loss);

struct TrainConfig {
  double l2_strength = 1.0;
  int max_iters = 1000;
  double tolerance = 1e-6;  // on the gradient's infinity norm
  std::uint64_t seed = 42;
  LossKind loss = LossKind::Logistic;
  /// Initial weights are uniform in [-init_scale, init_scale]; zero by default.
  double init_scale = 0.0;

  void validate() const;
};

struct BinaryLinearModel {
  std::vector<double> weights;
  double bias = 0.0;
  LossKind loss = LossKind::Logistic;
  std::uint64_t pipeline_fingerprint = 0;

  std::size_t dim() const { return weights.size(); }
  /// w.x + b. Throws DimensionMismatch.
  double margin(const SparseVector& x) const;
};

struct MultinomialModel {
  std::size_t dim = 0;
  std::vector<double> weights;  // classes.size() x dim, row-major
  std::vector<double> biases;
  std::vector<ClaimCategory> classes;  // ascending code
  std::uint64_t pipeline_fingerprint = 0;

  std::vector<double> scores(const SparseVector& x) const;
};

/// Accepted-step history of one optimisation run.
struct TrainingTrace {
  std::vector<double> objective;  // initial value, then one per accepted step
  int iterations = 0;
  bool converged = false;
};

/// Mean loss + (l2 / n) * 0.5 * |w|^2 over parameters (w, b); the bias is
/// not regularised. Fills `grad` (same layout) and returns the objective.
double binary_objective(const FeatureMatrix& x, std::span<const BinaryLabel> y, LossKind loss, double l2,
                        std::span<const double> params, std::span<double> grad);

/// Softmax cross-entropy with the same regulariser. Parameters are the
/// row-major class-by-feature weights followed by one bias per class;
/// `y` holds class indices in [0, n_classes).
double multinomial_objective(const FeatureMatrix& x, std::span<const std::size_t> y, std::size_t n_classes,
                             double l2, std::span<const double> params, std::span<double> grad);

using Objective = std::function<double(std::span<const double>, std::span<double>)>;

/// Full-gradient descent with Armijo backtracking. Each iteration's trial
/// step starts at the Barzilai-Borwein length.
std::vector<double> minimize(const Objective& objective, std::vector<double> start, int max_iters,
                             double tolerance, TrainingTrace* trace = nullptr);

/// Throws SingleClassInput, DimensionMismatch.
BinaryLinearModel train_binary(const FeatureMatrix& x, std::span<const BinaryLabel> y, const TrainConfig& config,
                               TrainingTrace* trace = nullptr);

/// Throws HingeModelHasNoProbability, DimensionMismatch.
double predict_proba(const BinaryLinearModel& model, const SparseVector& x);
double predict_proba(const BinaryLinearModel& model, std::span<const double> x);

/// Claim iff p >= threshold (logistic) or margin >= 0 (hinge).
BinaryLabel predict(const BinaryLinearModel& model, const SparseVector& x, double threshold = 0.5);

MultinomialModel train_multinomial(const FeatureMatrix& x, std::span<const ClaimCategory> y,
                                   const TrainConfig& config, TrainingTrace* trace = nullptr);

struct MulticlassPrediction {
  ClaimCategory category;
  std::vector<double> probabilities;  // aligned with model.classes
};

/// Argmax of the softmax; ties go to the lowest category code.
MulticlassPrediction predict_multiclass(const MultinomialModel& model, const SparseVector& x);

std::vector<double> softmax(std::span<const double> scores);
double sigmoid(double z);

}  // namespace claimspot
