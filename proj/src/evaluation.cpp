#include "claimspot/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <memory>
#include <map>
#include <random>
#include <set>

#include <boost/math/distributions/normal.hpp>
#include <spdlog/spdlog.h>

#include "claimspot/error.hpp"

namespace claimspot {

std::vector<int> stratified_kfold(std::span<const int> labels, std::size_t k, std::uint64_t seed,
                                  std::span<const bool> train_only) {
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "k must be at least 2");
  if (!train_only.empty() && train_only.size() != labels.size()) {
    throw Error(ErrorCode::LengthMismatch, "train_only flags differ in length from labels");
  }
  std::map<int, std::vector<std::size_t>> by_class;
  std::vector<int> folds(labels.size(), kTrainOnlyFold);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!train_only.empty() && train_only[i]) continue;
    by_class[labels[i]].push_back(i);
  }
  for (const auto& [label, members] : by_class) {
    if (members.size() < k) {
      throw Error(ErrorCode::ClassTooSmall, "class " + std::to_string(label) + " has " +
                                                std::to_string(members.size()) + " instances, fewer than k=" +
                                                std::to_string(k));
    }
  }
  std::mt19937_64 rng(seed);
  std::size_t counter = 0;
  for (auto& [label, members] : by_class) {
    // Fisher-Yates with an explicit draw, so the split is identical across
    // standard library implementations.
    for (std::size_t i = members.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(rng() % i);
      std::swap(members[i - 1], members[j]);
    }
    for (std::size_t idx : members) folds[idx] = static_cast<int>(counter++ % k);
  }
  return folds;
}

double z_for_level(double level) {
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::InvalidArgument, "confidence level must be in (0, 1)");
  if (level == 0.95) return 1.959964;
  return boost::math::quantile(boost::math::normal(), 0.5 + level / 2.0);
}

Interval binomial_ci(double p, std::size_t n, double level) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidArgument, "proportion outside [0, 1]");
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "binomial interval needs n >= 1");
  const double half = z_for_level(level) * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  return {std::max(0.0, p - half), std::min(1.0, p + half)};
}

namespace {

double safe_ratio(std::size_t num, std::size_t den, const char* what) {
  if (den == 0) {
    spdlog::warn("{} undefined (zero denominator); reporting 0", what);
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

Interval interval_or_empty(double p, std::size_t n, double level) {
  return n == 0 ? Interval{0.0, 0.0} : binomial_ci(p, n, level);
}

}  // namespace

BinaryMetrics binary_metrics(std::span<const BinaryLabel> preds, std::span<const BinaryLabel> golds,
                             double level) {
  if (preds.size() != golds.size()) {
    throw Error(ErrorCode::LengthMismatch,
                std::to_string(preds.size()) + " predictions vs " + std::to_string(golds.size()) + " gold labels");
  }
  BinaryMetrics m;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const bool p = preds[i] == BinaryLabel::Claim;
    const bool g = golds[i] == BinaryLabel::Claim;
    if (p && g) ++m.tp;
    else if (p) ++m.fp;
    else if (g) ++m.fn;
    else ++m.tn;
  }
  m.n_pred_pos = m.tp + m.fp;
  m.n_gold_pos = m.tp + m.fn;
  m.precision = safe_ratio(m.tp, m.n_pred_pos, "precision");
  m.recall = safe_ratio(m.tp, m.n_gold_pos, "recall");
  m.f1 = harmonic(m.precision, m.recall);
  m.p_interval = interval_or_empty(m.precision, m.n_pred_pos, level);
  m.r_interval = interval_or_empty(m.recall, m.n_gold_pos, level);
  return m;
}

std::size_t ConfusionMatrix::total() const {
  std::size_t t = 0;
  for (const auto& row : counts) {
    for (auto c : row) t += c;
  }
  return t;
}

ConfusionMatrix confusion_matrix(std::span<const int> preds, std::span<const int> golds,
                                 std::span<const int> classes) {
  if (preds.size() != golds.size()) throw Error(ErrorCode::LengthMismatch, "prediction/gold lengths differ");
  ConfusionMatrix cm;
  cm.classes.assign(classes.begin(), classes.end());
  cm.counts.assign(classes.size(), std::vector<std::size_t>(classes.size(), 0));
  auto pos = [&](int label) {
    auto it = std::find(classes.begin(), classes.end(), label);
    if (it == classes.end()) throw Error(ErrorCode::UnknownLabel, "label " + std::to_string(label));
    return static_cast<std::size_t>(it - classes.begin());
  };
  for (std::size_t i = 0; i < preds.size(); ++i) ++cm.counts[pos(golds[i])][pos(preds[i])];
  return cm;
}

MulticlassReport multiclass_report(std::span<const int> preds, std::span<const int> golds,
                                   std::span<const int> classes) {
  std::vector<int> labels(classes.begin(), classes.end());
  if (labels.empty()) {
    std::set<int> all(golds.begin(), golds.end());
    all.insert(preds.begin(), preds.end());
    labels.assign(all.begin(), all.end());
  }
  const auto cm = confusion_matrix(preds, golds, labels);
  MulticlassReport report;
  report.total = cm.total();
  std::size_t tp_sum = 0, fp_sum = 0, fn_sum = 0;
  bool undefined = false;
  for (std::size_t c = 0; c < labels.size(); ++c) {
    std::size_t tp = cm.counts[c][c], pred = 0, gold = 0;
    for (std::size_t o = 0; o < labels.size(); ++o) {
      pred += cm.counts[o][c];
      gold += cm.counts[c][o];
    }
    ClassScores s;
    s.label = labels[c];
    s.support = gold;
    undefined = undefined || pred == 0 || gold == 0;
    s.precision = pred ? static_cast<double>(tp) / static_cast<double>(pred) : 0.0;
    s.recall = gold ? static_cast<double>(tp) / static_cast<double>(gold) : 0.0;
    s.f1 = harmonic(s.precision, s.recall);
    report.per_class.push_back(s);
    tp_sum += tp;
    fp_sum += pred - tp;
    fn_sum += gold - tp;
    report.macro.precision += s.precision;
    report.macro.recall += s.recall;
    report.macro.f1 += s.f1;
  }
  if (undefined) spdlog::warn("some classes have no predictions or no gold instances; their scores are 0");
  if (!labels.empty()) {
    const double c = static_cast<double>(labels.size());
    report.macro.precision /= c;
    report.macro.recall /= c;
    report.macro.f1 /= c;
  }
  report.micro.precision = tp_sum + fp_sum ? static_cast<double>(tp_sum) / static_cast<double>(tp_sum + fp_sum) : 0.0;
  report.micro.recall = tp_sum + fn_sum ? static_cast<double>(tp_sum) / static_cast<double>(tp_sum + fn_sum) : 0.0;
  report.micro.f1 = harmonic(report.micro.precision, report.micro.recall);
  return report;
}

std::vector<int> stratification_labels(std::span<const LabeledSentence> dataset) {
  std::vector<int> labels;
  labels.reserve(dataset.size());
  for (const auto& ls : dataset) {
    if (const auto* b = std::get_if<BinaryLabel>(&ls.label)) {
      labels.push_back(static_cast<int>(*b));
    } else {
      labels.push_back(code_of(std::get<ClaimCategory>(ls.label)));
    }
  }
  return labels;
}

std::vector<int> make_folds(std::span<const LabeledSentence> dataset, const CvConfig& cv) {
  const auto labels = stratification_labels(dataset);
  auto train_only = std::make_unique<bool[]>(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) train_only[i] = cv.honor_train_only && dataset[i].train_only;
  return stratified_kfold(labels, cv.k, cv.seed, std::span<const bool>(train_only.get(), dataset.size()));
}

namespace {

struct FoldOutput {
  std::vector<std::size_t> test;
  std::vector<Label> predicted;
  std::vector<std::optional<double>> probability;
};

FoldOutput run_fold(int fold, const FeaturePipelineConfig& features, const TrainConfig& train,
                    std::span<const LabeledSentence> dataset, std::span<const int> folds, const CvConfig& cv) {
  std::vector<Sentence> train_sentences;
  std::vector<Label> train_labels;
  FoldOutput out;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (folds[i] == fold) {
      out.test.push_back(i);
    } else {
      train_sentences.push_back(dataset[i].sentence);
      train_labels.push_back(dataset[i].label);
    }
  }
  FeaturePipeline pipeline(features);
  pipeline.fit(train_sentences);
  const auto x_train = pipeline.transform(train_sentences);
  const bool binary = dataset.front().kind() == LabelKind::Binary;
  if (binary) {
    std::vector<BinaryLabel> y;
    for (const auto& l : train_labels) y.push_back(std::get<BinaryLabel>(l));
    const auto model = train_binary(x_train, y, train);
    for (std::size_t i : out.test) {
      const auto x = pipeline.transform(dataset[i].sentence);
      out.predicted.emplace_back(predict(model, x, cv.threshold));
      out.probability.push_back(model.loss == LossKind::Logistic ? std::optional(predict_proba(model, x))
                                                                 : std::nullopt);
    }
  } else {
    std::vector<ClaimCategory> y;
    for (const auto& l : train_labels) y.push_back(std::get<ClaimCategory>(l));
    const auto model = train_multinomial(x_train, y, train);
    for (std::size_t i : out.test) {
      auto p = predict_multiclass(model, pipeline.transform(dataset[i].sentence));
      const auto pos = std::find(model.classes.begin(), model.classes.end(), p.category) - model.classes.begin();
      out.predicted.emplace_back(p.category);
      out.probability.push_back(p.probabilities[static_cast<std::size_t>(pos)]);
    }
  }
  return out;
}

int label_code(const Label& l) {
  if (const auto* b = std::get_if<BinaryLabel>(&l)) return static_cast<int>(*b);
  return code_of(std::get<ClaimCategory>(l));
}

}  // namespace

CvResult cross_validate(const FeaturePipelineConfig& features, const TrainConfig& train,
                        std::span<const LabeledSentence> dataset, const CvConfig& cv, std::span<const int> folds) {
  if (dataset.empty()) throw Error(ErrorCode::InvalidArgument, "empty dataset");
  const auto kind = dataset.front().kind();
  for (const auto& ls : dataset) {
    if (ls.kind() != kind) throw Error(ErrorCode::InvalidArgument, "dataset mixes label kinds");
  }
  CvResult result;
  if (folds.empty()) {
    result.folds = make_folds(dataset, cv);
  } else {
    if (folds.size() != dataset.size()) throw Error(ErrorCode::LengthMismatch, "fold assignment size");
    result.folds.assign(folds.begin(), folds.end());
  }
  const int k = static_cast<int>(cv.k);

  std::vector<std::future<FoldOutput>> jobs;
  for (int f = 0; f < k; ++f) {
    jobs.push_back(std::async(std::launch::async, [&, f] {
      return run_fold(f, features, train, dataset, result.folds, cv);
    }));
  }
  std::vector<FoldOutput> outputs;
  for (auto& j : jobs) outputs.push_back(j.get());

  for (int f = 0; f < k; ++f) {
    const auto& o = outputs[static_cast<std::size_t>(f)];
    for (std::size_t t = 0; t < o.test.size(); ++t) {
      const auto idx = o.test[t];
      result.pooled.push_back({idx, f, dataset[idx].label, o.predicted[t], o.probability[t]});
    }
  }
  std::sort(result.pooled.begin(), result.pooled.end(),
            [](const PooledPrediction& a, const PooledPrediction& b) { return a.index < b.index; });

  std::vector<int> gold_codes, pred_codes;
  for (const auto& p : result.pooled) {
    gold_codes.push_back(label_code(p.gold));
    pred_codes.push_back(label_code(p.predicted));
  }
  if (kind == LabelKind::Binary) {
    std::vector<BinaryLabel> preds, golds;
    for (const auto& p : result.pooled) {
      preds.push_back(std::get<BinaryLabel>(p.predicted));
      golds.push_back(std::get<BinaryLabel>(p.gold));
    }
    result.binary = binary_metrics(preds, golds);
    const std::vector<int> classes = {static_cast<int>(BinaryLabel::Claim), static_cast<int>(BinaryLabel::NonClaim)};
    result.confusion = confusion_matrix(pred_codes, gold_codes, classes);
  } else {
    std::vector<int> classes;
    for (auto c : kAllCategories) {
      const int code = code_of(c);
      if (std::find(gold_codes.begin(), gold_codes.end(), code) != gold_codes.end() ||
          std::find(pred_codes.begin(), pred_codes.end(), code) != pred_codes.end()) {
        classes.push_back(code);
      }
    }
    result.multiclass = multiclass_report(pred_codes, gold_codes, classes);
    result.confusion = confusion_matrix(pred_codes, gold_codes, classes);
  }
  return result;
}

}  // namespace claimspot
