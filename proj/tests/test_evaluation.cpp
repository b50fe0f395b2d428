#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <fmt/format.h>

#include "claimspot/error.hpp"
#include "claimspot/evaluation.hpp"
#include "claimspot/report.hpp"
#include "claimspot/synthetic.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace claimspot;

namespace {

std::vector<int> labels_of(std::initializer_list<std::pair<int, int>> counts) {
  std::vector<int> out;
  for (auto [label, n] : counts) out.insert(out.end(), static_cast<std::size_t>(n), label);
  return out;
}

std::vector<BinaryLabel> to_binary(const std::vector<int>& v) {
  std::vector<BinaryLabel> out;
  for (int x : v) out.push_back(x ? BinaryLabel::Claim : BinaryLabel::NonClaim);
  return out;
}

double round2(double x) { return std::round(x * 100.0) / 100.0; }

}  // namespace

TEST_CASE("stratified folds on small fixtures") {
  const auto five_five = labels_of({{1, 5}, {0, 5}});
  const auto folds = stratified_kfold(five_five, 5, 42);
  for (int f = 0; f < 5; ++f) {
    int pos = 0, neg = 0;
    for (std::size_t i = 0; i < folds.size(); ++i) {
      if (folds[i] == f) (five_five[i] ? pos : neg)++;
    }
    CHECK(pos == 1);
    CHECK(neg == 1);
  }

  const auto seven_five = labels_of({{1, 7}, {0, 5}});
  const auto f2 = stratified_kfold(seven_five, 5, 1);
  for (int f = 0; f < 5; ++f) {
    int pos = 0;
    for (std::size_t i = 0; i < f2.size(); ++i) pos += f2[i] == f && seven_five[i];
    CHECK((pos == 1 || pos == 2));
  }

  CHECK(stratified_kfold(seven_five, 5, 9) == stratified_kfold(seven_five, 5, 9));
  CHECK_THROWS_AS(stratified_kfold(labels_of({{1, 4}, {0, 10}}), 5, 1), Error);
  CHECK_THROWS_AS(stratified_kfold(five_five, 1, 1), Error);
}

TEST_CASE("stratified folds respect train-only rows") {
  auto labels = labels_of({{1, 8}, {0, 12}});
  std::unique_ptr<bool[]> train_only(new bool[20]());
  for (int i = 0; i < 20; i += 4) train_only[i] = true;
  const auto folds = stratified_kfold(labels, 3, 5, std::span<const bool>(train_only.get(), 20));
  for (int i = 0; i < 20; ++i) CHECK((folds[i] == kTrainOnlyFold) == train_only[i]);
}

TEST_CASE("binomial intervals") {
  const auto ci = binomial_ci(0.80, 1570);
  CHECK(round2(ci.lo) == 0.78);
  CHECK(round2(ci.hi) == 0.82);
  CHECK(std::abs(ci.lo - (0.80 - 1.959964 * std::sqrt(0.8 * 0.2 / 1570))) < 1e-12);

  CHECK(binomial_ci(1.0, 10).hi == 1.0);
  CHECK(binomial_ci(0.0, 10).lo == 0.0);
  CHECK(binomial_ci(0.99, 5).hi == 1.0);

  const auto narrow = binomial_ci(0.3, 400), wide = binomial_ci(0.3, 100);
  CHECK(std::abs((wide.hi - wide.lo) / 2 - (narrow.hi - narrow.lo)) < 1e-12);

  CHECK(z_for_level(0.95) == 1.959964);
  CHECK(z_for_level(0.90) == doctest::Approx(1.644854).epsilon(1e-6));
}

TEST_CASE("binary metrics") {
  // TP=4, FP=1, FN=1, TN=2.
  const auto golds = to_binary({1, 1, 1, 1, 1, 0, 0, 0});
  const auto preds = to_binary({1, 1, 1, 1, 0, 1, 0, 0});
  const auto m = binary_metrics(preds, golds);
  CHECK(m.precision == doctest::Approx(0.8));
  CHECK(m.recall == doctest::Approx(0.8));
  CHECK(m.f1 == doctest::Approx(0.8));
  CHECK(m.tn == 2);
  CHECK(m.n_pred_pos == 5);
  CHECK(m.n_gold_pos == 5);

  const auto perfect = binary_metrics(golds, golds);
  CHECK(perfect.precision == 1.0);
  CHECK(perfect.recall == 1.0);
  CHECK(perfect.f1 == 1.0);

  const auto none = binary_metrics(to_binary({0, 0, 0}), to_binary({1, 0, 1}));
  CHECK(none.precision == 0.0);
  CHECK(none.recall == 0.0);
  CHECK(none.f1 == 0.0);

  CHECK_THROWS_AS(binary_metrics(to_binary({1}), to_binary({1, 0})), Error);
}

TEST_CASE("binary metrics match counting on random sets") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> p(1 + rng() % 60), g(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] = static_cast<int>(rng() % 2);
      g[i] = static_cast<int>(rng() % 2);
    }
    const auto c = testing::count_binary(p, g);
    const auto m = binary_metrics(to_binary(p), to_binary(g));
    const double prec = testing::safe_div(c.tp, c.tp + c.fp);
    const double rec = testing::safe_div(c.tp, c.tp + c.fn);
    CHECK(m.precision == prec);
    CHECK(m.recall == rec);
    CHECK(m.f1 == doctest::Approx(testing::f1_of(prec, rec)).epsilon(1e-15));
    CHECK(m.p_interval.lo <= m.precision);
    CHECK(m.precision <= m.p_interval.hi);
    CHECK(m.r_interval.lo <= m.recall);
    CHECK(m.recall <= m.r_interval.hi);
  }
}

TEST_CASE("confusion matrix and multiclass report on a fixture") {
  // gold:  1 1 1 2 2 3 3 3 3
  // pred:  1 1 2 2 3 3 3 3 1
  const std::vector<int> gold = {1, 1, 1, 2, 2, 3, 3, 3, 3};
  const std::vector<int> pred = {1, 1, 2, 2, 3, 3, 3, 3, 1};
  const std::vector<int> classes = {1, 2, 3};
  const auto cm = confusion_matrix(pred, gold, classes);
  CHECK(cm.counts == std::vector<std::vector<std::size_t>>{{2, 1, 0}, {0, 1, 1}, {1, 0, 3}});
  CHECK(cm.total() == 9);

  const auto r = multiclass_report(pred, gold);
  REQUIRE(r.per_class.size() == 3);
  // class 1: tp 2, fp 1, fn 1; class 2: tp 1, fp 1, fn 1; class 3: tp 3, fp 1, fn 1.
  CHECK(r.per_class[0].precision == doctest::Approx(2.0 / 3));
  CHECK(r.per_class[1].recall == doctest::Approx(0.5));
  CHECK(r.per_class[2].f1 == doctest::Approx(0.75));
  CHECK(r.per_class[2].support == 4);
  CHECK(r.micro.f1 == doctest::Approx(6.0 / 9));
  CHECK(r.macro.f1 == doctest::Approx((2.0 / 3 + 0.5 + 0.75) / 3));
  CHECK(r.total == 9);

  const std::vector<int> bad = {1, 1, 1, 2, 2, 3, 3, 3, 9};
  CHECK_THROWS_AS(confusion_matrix(bad, gold, classes), Error);

  const auto perfect = multiclass_report(gold, gold);
  CHECK(perfect.micro.f1 == 1.0);
  CHECK(perfect.macro.precision == 1.0);
}

TEST_CASE("multiclass metrics match counting on random sets") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const int n_classes = 2 + static_cast<int>(rng() % 6);
    std::vector<int> p(5 + rng() % 80), g(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] = 1 + static_cast<int>(rng() % n_classes);
      g[i] = 1 + static_cast<int>(rng() % n_classes);
    }
    std::vector<int> classes(n_classes);
    for (int c = 0; c < n_classes; ++c) classes[c] = c + 1;
    const auto cm = confusion_matrix(p, g, classes);
    const auto r = multiclass_report(p, g, classes);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < p.size(); ++i) correct += p[i] == g[i];
    CHECK(std::abs(r.micro.f1 - static_cast<double>(correct) / p.size()) < 1e-12);
    double lo = 1, hi = 0;
    for (int c = 0; c < n_classes; ++c) {
      const auto counts = testing::count_binary(p, g, c + 1);
      std::size_t row = 0;
      for (int k = 0; k < n_classes; ++k) {
        std::size_t brute = 0;
        for (std::size_t i = 0; i < p.size(); ++i) brute += g[i] == c + 1 && p[i] == k + 1;
        CHECK(cm.counts[c][k] == brute);
        row += cm.counts[c][k];
      }
      CHECK(row == r.per_class[c].support);
      const double prec = testing::safe_div(counts.tp, counts.tp + counts.fp);
      const double rec = testing::safe_div(counts.tp, counts.tp + counts.fn);
      CHECK(r.per_class[c].precision == prec);
      CHECK(r.per_class[c].recall == rec);
      lo = std::min(lo, r.per_class[c].f1);
      hi = std::max(hi, r.per_class[c].f1);
    }
    CHECK(r.macro.f1 >= lo - 1e-12);
    CHECK(r.macro.f1 <= hi + 1e-12);
  }
}

TEST_CASE("cross-validation with a leaked label is perfect") {
  testing::TempDir dir;
  const auto corpus = synthetic::labeled_corpus(60, 0.3, 4);
  std::string rows;
  for (const auto& ls : corpus) {
    rows += ls.sentence.id + "\t" + (std::get<BinaryLabel>(ls.label) == BinaryLabel::Claim ? "1" : "-1") + "\n";
  }
  const auto vec = dir.write("leak.tsv", rows);
  const auto features =
      FeaturePipelineConfig::from_strings(std::vector<std::string>{"precomputed_vectors(" + vec.string() + ")"});
  const auto result = cross_validate(features, {}, corpus, {});
  REQUIRE(result.binary);
  CHECK(result.binary->f1 == 1.0);
  CHECK(result.pooled.size() == corpus.size());
}

TEST_CASE("features are fitted on training folds only") {
  // Every sentence uses words of its own, so a sentence in a test fold has no
  // TF-IDF column and all test rows of a fold share one probability.
  std::vector<LabeledSentence> data;
  for (int i = 0; i < 20; ++i) {
    Sentence s{fmt::format("s{}", i), fmt::format("Alpha{} beta{} gamma{}.", i, i, i), {}, "", {}};
    data.push_back({s, i % 2 ? BinaryLabel::Claim : BinaryLabel::NonClaim, false});
  }
  const auto result =
      cross_validate(FeaturePipelineConfig::from_strings(std::vector<std::string>{"tfidf"}), {}, data, {});
  std::map<int, std::set<double>> per_fold;
  for (const auto& p : result.pooled) per_fold[p.fold].insert(*p.probability);
  CHECK(per_fold.size() == 5);
  for (const auto& [fold, probs] : per_fold) CHECK(probs.size() == 1);
}

TEST_CASE("pooled predictions cover every testable instance once and are deterministic") {
  auto corpus = synthetic::labeled_corpus(150, 0.3, 8);
  for (std::size_t i = 0; i < corpus.size(); i += 7) corpus[i].train_only = true;
  const auto features = FeaturePipelineConfig::from_strings(std::vector<std::string>{"tfidf"});
  CvConfig cv;
  const auto a = cross_validate(features, {}, corpus, cv);
  const auto b = cross_validate(features, {}, corpus, cv);
  std::set<std::size_t> seen;
  for (const auto& p : a.pooled) {
    CHECK_FALSE(corpus[p.index].train_only);
    CHECK(seen.insert(p.index).second);
  }
  CHECK(seen.size() == corpus.size() - (corpus.size() + 6) / 7);
  REQUIRE(a.pooled.size() == b.pooled.size());
  for (std::size_t i = 0; i < a.pooled.size(); ++i) {
    CHECK(a.pooled[i].index == b.pooled[i].index);
    CHECK(a.pooled[i].probability == b.pooled[i].probability);
  }
  CHECK(a.confusion.total() == a.pooled.size());

  cv.honor_train_only = false;
  CHECK(cross_validate(features, {}, corpus, cv).pooled.size() == corpus.size());
}

TEST_CASE("multiclass cross-validation") {
  const auto corpus = synthetic::multiclass_corpus(140, 6);
  const auto result =
      cross_validate(FeaturePipelineConfig::from_strings(std::vector<std::string>{"tfidf"}), {}, corpus, {});
  REQUIRE(result.multiclass);
  CHECK_FALSE(result.binary);
  CHECK(result.multiclass->total == 140);
  CHECK(result.confusion.classes.size() == 7);
}

TEST_CASE("report formatting") {
  BinaryMetrics m;
  m.precision = 0.7;
  m.recall = 0.59;
  m.f1 = 0.6403;
  m.p_interval = {0.6712, 0.7288};
  m.r_interval = {0.5657, 0.6143};
  m.n_pred_pos = 1000;
  m.n_gold_pos = 1570;
  const std::vector<BinaryReportRow> rows = {{"tfidf", "LogReg", m}};
  const auto tsv = format_binary_tsv(rows, {"dataset=x n=1"});
  CHECK(tsv ==
        "# dataset=x n=1\n"
        "features\tclassifier\tP\tR\tF1\tP_lo\tP_hi\tR_lo\tR_hi\tn_pred_pos\tn_gold_pos\n"
        "tfidf\tLogReg\t0.7000\t0.5900\t0.6403\t0.6712\t0.7288\t0.5657\t0.6143\t1000\t1570\n");
  const auto table = format_binary_table(rows);
  CHECK(table.find("0.57 - 0.61") != std::string::npos);
  CHECK(table.find("0.67 - 0.73") != std::string::npos);

  DisagreementMatrix dm;
  dm.counts[5][6] = dm.counts[6][5] = 2;
  const auto grid = format_disagreement_tsv(dm);
  CHECK(grid.find("\tPers\tQu\tCorr\tLaw\tPred\tOther\tNot\n") == 0);
  CHECK(grid.find("Other\t0\t0\t0\t0\t0\t0\t2\n") != std::string::npos);
  CHECK(grid.find("Not\t0\t0\t0\t0\t0\t2\t0\n") != std::string::npos);

  const std::vector<int> g = {1, 0, 1}, p = {1, 1, 1}, classes = {0, 1};
  const auto cm = format_confusion_tsv(confusion_matrix(p, g, classes), true);
  CHECK(cm == "gold\\predicted\tnonclaim\tclaim\nnonclaim\t0\t1\nclaim\t0\t2\n");

  const auto mc = format_multiclass_tsv(multiclass_report(p, g));
  CHECK(mc.find("micro avg / total") != std::string::npos);
  CHECK(mc.find("macro avg / total") != std::string::npos);
}
