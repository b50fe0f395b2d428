#include "claimspot/linear_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "claimspot/error.hpp"

namespace claimspot {

std::string_view to_string(LossKind loss) { return loss == LossKind::Logistic ? "logistic" : "hinge"; }

void TrainConfig::validate() const {
  if (!(l2_strength >= 0.0)) throw Error(ErrorCode::InvalidArgument, "l2_strength must be >= 0");
  if (max_iters < 0) throw Error(ErrorCode::InvalidArgument, "max_iters must be >= 0");
  if (!(tolerance >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be >= 0");
  if (!(init_scale >= 0.0)) throw Error(ErrorCode::InvalidArgument, "init_scale must be >= 0");
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

// log(1 + exp(-z)) without overflow.
double log1p_exp_neg(double z) { return z > 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z)); }

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void check_rows(const FeatureMatrix& x, std::size_t n_labels) {
  if (x.size() != n_labels) {
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(x.size()) + " rows but " + std::to_string(n_labels) + " labels");
  }
  if (x.cols == 0) throw Error(ErrorCode::DimensionMismatch, "feature matrix has zero columns");
  for (const auto& row : x.rows) {
    if (row.dim != x.cols) throw Error(ErrorCode::DimensionMismatch, "row dimension differs from matrix");
  }
}

std::vector<double> initial_params(std::size_t n_weights, std::size_t n_total, const TrainConfig& config) {
  std::vector<double> params(n_total, 0.0);
  if (config.init_scale > 0.0) {
    std::mt19937_64 rng(config.seed);
    for (std::size_t i = 0; i < n_weights; ++i) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      params[i] = (2.0 * u - 1.0) * config.init_scale;
    }
  }
  return params;
}

}  // namespace

double binary_objective(const FeatureMatrix& x, std::span<const BinaryLabel> y, LossKind loss, double l2,
                        std::span<const double> params, std::span<double> grad) {
  const std::size_t d = x.cols;
  const std::size_t n = x.size();
  const auto w = params.first(d);
  const double b = params[d];
  std::fill(grad.begin(), grad.end(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = y[i] == BinaryLabel::Claim ? 1.0 : -1.0;
    const double z = s * (x.rows[i].dot(w) + b);
    double dz = 0.0;  // d loss / d margin
    if (loss == LossKind::Logistic) {
      total += log1p_exp_neg(z);
      dz = -s * sigmoid(-z);
    } else if (z < 1.0) {
      total += 1.0 - z;
      dz = -s;
    }
    if (dz != 0.0) {
      x.rows[i].axpy_into(dz * inv_n, grad.first(d));
      grad[d] += dz * inv_n;
    }
  }
  const double reg = l2 * inv_n;
  double sq = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    sq += w[j] * w[j];
    grad[j] += reg * w[j];
  }
  return total * inv_n + 0.5 * reg * sq;
}

double multinomial_objective(const FeatureMatrix& x, std::span<const std::size_t> y, std::size_t n_classes,
                             double l2, std::span<const double> params, std::span<double> grad) {
  const std::size_t d = x.cols;
  const std::size_t n = x.size();
  const std::size_t n_w = n_classes * d;
  std::fill(grad.begin(), grad.end(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> scores(n_classes);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < n_classes; ++c) {
      scores[c] = x.rows[i].dot(params.subspan(c * d, d)) + params[n_w + c];
    }
    const double mx = *std::max_element(scores.begin(), scores.end());
    double z = 0.0;
    for (double s : scores) z += std::exp(s - mx);
    const double lse = mx + std::log(z);
    total += lse - scores[y[i]];
    for (std::size_t c = 0; c < n_classes; ++c) {
      const double g = (std::exp(scores[c] - lse) - (c == y[i] ? 1.0 : 0.0)) * inv_n;
      x.rows[i].axpy_into(g, grad.subspan(c * d, d));
      grad[n_w + c] += g;
    }
  }
  const double reg = l2 * inv_n;
  double sq = 0.0;
  for (std::size_t j = 0; j < n_w; ++j) {
    sq += params[j] * params[j];
    grad[j] += reg * params[j];
  }
  return total * inv_n + 0.5 * reg * sq;
}

std::vector<double> minimize(const Objective& objective, std::vector<double> x, int max_iters, double tolerance,
                             TrainingTrace* trace) {
  constexpr double kArmijo = 1e-4;
  constexpr double kMinStep = 1e-20;
  const std::size_t p = x.size();
  std::vector<double> g(p), x_new(p), g_new(p);
  double f = objective(x, g);
  if (trace) {
    *trace = {};
    trace->objective.push_back(f);
  }
  double step = 1.0;
  int it = 0;
  bool converged = false;
  for (; it < max_iters; ++it) {
    const double gnorm_inf = inf_norm(g);
    if (gnorm_inf <= tolerance) {
      converged = true;
      break;
    }
    const double gg = dot(g, g);
    double t = step;
    double f_new = 0.0;
    bool accepted = false;
    while (t >= kMinStep) {
      for (std::size_t j = 0; j < p; ++j) x_new[j] = x[j] - t * g[j];
      f_new = objective(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= f - kArmijo * t * gg) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
    // Barzilai-Borwein length for the next trial step.
    double ss = 0.0, sy = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      const double s = x_new[j] - x[j];
      const double yv = g_new[j] - g[j];
      ss += s * s;
      sy += s * yv;
    }
    step = sy > 0.0 ? ss / sy : 2.0 * t;
    step = std::clamp(step, 1e-10, 1e10);
    x.swap(x_new);
    g.swap(g_new);
    f = f_new;
    if (trace) trace->objective.push_back(f);
  }
  if (trace) {
    trace->iterations = it;
    trace->converged = converged || inf_norm(g) <= tolerance;
  }
  return x;
}

BinaryLinearModel train_binary(const FeatureMatrix& x, std::span<const BinaryLabel> y, const TrainConfig& config,
                               TrainingTrace* trace) {
  config.validate();
  check_rows(x, y.size());
  if (x.size() < 2) throw Error(ErrorCode::SingleClassInput, "need at least two training instances");
  const bool has_pos = std::find(y.begin(), y.end(), BinaryLabel::Claim) != y.end();
  const bool has_neg = std::find(y.begin(), y.end(), BinaryLabel::NonClaim) != y.end();
  if (!has_pos || !has_neg) throw Error(ErrorCode::SingleClassInput, "training labels contain a single class");

  const std::size_t d = x.cols;
  auto fn = [&](std::span<const double> params, std::span<double> grad) {
    return binary_objective(x, y, config.loss, config.l2_strength, params, grad);
  };
  auto params = minimize(fn, initial_params(d, d + 1, config), config.max_iters, config.tolerance, trace);
  BinaryLinearModel model;
  model.bias = params[d];
  params.resize(d);
  model.weights = std::move(params);
  model.loss = config.loss;
  return model;
}

double BinaryLinearModel::margin(const SparseVector& x) const {
  if (x.dim != weights.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "input has " + std::to_string(x.dim) + " features, model expects " + std::to_string(weights.size()));
  }
  return x.dot(weights) + bias;
}

double predict_proba(const BinaryLinearModel& model, const SparseVector& x) {
  if (model.loss != LossKind::Logistic) {
    throw Error(ErrorCode::HingeModelHasNoProbability, "hinge-loss models only produce margins");
  }
  return sigmoid(model.margin(x));
}

double predict_proba(const BinaryLinearModel& model, std::span<const double> x) {
  return predict_proba(model, SparseVector::from_dense(x));
}

BinaryLabel predict(const BinaryLinearModel& model, const SparseVector& x, double threshold) {
  if (model.loss == LossKind::Hinge) return model.margin(x) >= 0.0 ? BinaryLabel::Claim : BinaryLabel::NonClaim;
  return predict_proba(model, x) >= threshold ? BinaryLabel::Claim : BinaryLabel::NonClaim;
}

MultinomialModel train_multinomial(const FeatureMatrix& x, std::span<const ClaimCategory> y,
                                   const TrainConfig& config, TrainingTrace* trace) {
  config.validate();
  if (config.loss != LossKind::Logistic) {
    throw Error(ErrorCode::InvalidArgument, "multiclass training supports the logistic loss only");
  }
  check_rows(x, y.size());
  std::set<ClaimCategory> distinct(y.begin(), y.end());
  if (distinct.size() < 2) throw Error(ErrorCode::SingleClassInput, "training labels contain a single class");

  MultinomialModel model;
  model.classes.assign(distinct.begin(), distinct.end());
  model.dim = x.cols;
  const std::size_t c = model.classes.size();
  std::vector<std::size_t> idx(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    idx[i] = static_cast<std::size_t>(std::lower_bound(model.classes.begin(), model.classes.end(), y[i]) -
                                      model.classes.begin());
  }
  auto fn = [&](std::span<const double> params, std::span<double> grad) {
    return multinomial_objective(x, idx, c, config.l2_strength, params, grad);
  };
  auto params = minimize(fn, initial_params(c * model.dim, c * model.dim + c, config), config.max_iters,
                         config.tolerance, trace);
  model.biases.assign(params.begin() + static_cast<std::ptrdiff_t>(c * model.dim), params.end());
  params.resize(c * model.dim);
  model.weights = std::move(params);
  return model;
}

std::vector<double> MultinomialModel::scores(const SparseVector& x) const {
  if (x.dim != dim) {
    throw Error(ErrorCode::DimensionMismatch,
                "input has " + std::to_string(x.dim) + " features, model expects " + std::to_string(dim));
  }
  std::vector<double> out(classes.size());
  for (std::size_t c = 0; c < classes.size(); ++c) {
    out[c] = x.dot(std::span<const double>(weights).subspan(c * dim, dim)) + biases[c];
  }
  return out;
}

std::vector<double> softmax(std::span<const double> scores) {
  std::vector<double> p(scores.begin(), scores.end());
  if (p.empty()) return p;
  const double mx = *std::max_element(p.begin(), p.end());
  double z = 0.0;
  for (auto& v : p) {
    v = std::exp(v - mx);
    z += v;
  }
  for (auto& v : p) v /= z;
  return p;
}

MulticlassPrediction predict_multiclass(const MultinomialModel& model, const SparseVector& x) {
  auto probs = softmax(model.scores(x));
  // max_element returns the first maximum; classes are in ascending code order.
  const auto best = static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
  return {model.classes[best], std::move(probs)};
}

}  // namespace claimspot
