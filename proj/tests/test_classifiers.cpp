#include <cmath>
#include <random>

#include "claimspot/error.hpp"
#include "claimspot/linear_model.hpp"
#include "claimspot/model_io.hpp"
#include "claimspot/synthetic.hpp"
#include "doctest.h"
#include "json.hpp"
#include "support.hpp"

using namespace claimspot;

namespace {

template <typename F>
ErrorCode failure(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

struct BinaryData {
  FeatureMatrix x;
  std::vector<BinaryLabel> y;
};

BinaryData random_binary(std::mt19937_64& rng, std::size_t n, std::size_t d) {
  std::normal_distribution<double> g;
  BinaryData data;
  data.x.cols = d;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(d);
    for (auto& v : row) v = g(rng);
    data.x.rows.push_back(SparseVector::from_dense(row));
    data.y.push_back(i % 2 ? BinaryLabel::Claim : BinaryLabel::NonClaim);
  }
  return data;
}

// Two Gaussian-free clusters with margin >= 1 from the separator x0 + x1 = 0.
BinaryData separable_2d(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 3.0);
  BinaryData data;
  data.x.cols = 2;
  for (int i = 0; i < 20; ++i) {
    const bool pos = i % 2 == 0;
    const double a = u(rng), b = u(rng);
    const double s = pos ? 1.0 : -1.0;
    data.x.rows.push_back(SparseVector::from_dense(std::vector<double>{s * (1.0 + a), s * (1.0 + b)}));
    data.y.push_back(pos ? BinaryLabel::Claim : BinaryLabel::NonClaim);
  }
  return data;
}

std::vector<double> random_params(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g(0.0, 0.5);
  std::vector<double> p(n);
  for (auto& v : p) v = g(rng);
  return p;
}

}  // namespace

TEST_CASE("logistic and hinge gradients match finite differences") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const auto data = random_binary(rng, 25, 4);
    for (LossKind loss : {LossKind::Logistic, LossKind::Hinge}) {
      auto params = random_params(rng, 5);
      std::vector<double> grad(5), scratch(5);
      const double l2 = 0.7;
      binary_objective(data.x, data.y, loss, l2, params, grad);
      const double err = testing::gradient_check(
          [&](const std::vector<double>& p) { return binary_objective(data.x, data.y, loss, l2, p, scratch); },
          params, grad);
      // Random Gaussian rows almost surely keep every margin away from 1.
      CHECK(err < 1e-5);
    }
  }
}

TEST_CASE("multinomial gradient matches finite differences") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t c = 3, d = 4;
    auto data = random_binary(rng, 30, d);
    std::vector<std::size_t> y(30);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = i % c;
    auto params = random_params(rng, c * d + c);
    std::vector<double> grad(params.size()), scratch(params.size());
    multinomial_objective(data.x, y, c, 0.5, params, grad);
    const double err = testing::gradient_check(
        [&](const std::vector<double>& p) { return multinomial_objective(data.x, y, c, 0.5, p, scratch); }, params,
        grad);
    CHECK(err < 1e-5);
  }
}

TEST_CASE("hinge subgradient at the kink is zero") {
  FeatureMatrix x{1, {SparseVector::from_dense(std::vector<double>{1.0})}};
  const std::vector<BinaryLabel> y = {BinaryLabel::Claim};
  std::vector<double> params = {1.0, 0.0}, grad(2);
  const double value = binary_objective(x, y, LossKind::Hinge, 0.0, params, grad);
  CHECK(value == 0.0);
  CHECK(grad[0] == 0.0);
  CHECK(grad[1] == 0.0);
}

TEST_CASE("zero iterations leave the model at the origin") {
  std::mt19937_64 rng(3);
  const auto data = random_binary(rng, 10, 3);
  TrainConfig cfg;
  cfg.max_iters = 0;
  const auto model = train_binary(data.x, data.y, cfg);
  CHECK(model.bias == 0.0);
  for (double w : model.weights) CHECK(w == 0.0);
  for (const auto& row : data.x.rows) CHECK(predict_proba(model, row) == 0.5);
}

TEST_CASE("separable data is fitted exactly") {
  std::mt19937_64 rng(4);
  const auto data = separable_2d(rng);
  for (LossKind loss : {LossKind::Logistic, LossKind::Hinge}) {
    TrainConfig cfg;
    cfg.loss = loss;
    cfg.l2_strength = 0.01;
    const auto model = train_binary(data.x, data.y, cfg);
    for (std::size_t i = 0; i < data.y.size(); ++i) CHECK(predict(model, data.x.rows[i]) == data.y[i]);
  }
}

TEST_CASE("training objective never increases and the optimum is unique") {
  std::mt19937_64 rng(5);
  const auto data = random_binary(rng, 40, 5);
  TrainConfig cfg;
  cfg.tolerance = 1e-10;
  cfg.init_scale = 1.0;
  cfg.seed = 1;
  TrainingTrace trace;
  const auto a = train_binary(data.x, data.y, cfg, &trace);
  REQUIRE(trace.objective.size() >= 2);
  for (std::size_t i = 1; i < trace.objective.size(); ++i) CHECK(trace.objective[i] <= trace.objective[i - 1]);
  CHECK(trace.converged);

  cfg.seed = 2;
  const auto b = train_binary(data.x, data.y, cfg);
  double worst = std::abs(a.bias - b.bias);
  for (std::size_t j = 0; j < a.weights.size(); ++j) worst = std::max(worst, std::abs(a.weights[j] - b.weights[j]));
  CHECK(worst < 1e-4);
}

TEST_CASE("training input errors") {
  FeatureMatrix x{1, {SparseVector::from_dense(std::vector<double>{1.0}), SparseVector::from_dense(std::vector<double>{2.0})}};
  const std::vector<BinaryLabel> same = {BinaryLabel::Claim, BinaryLabel::Claim};
  CHECK(failure([&] { train_binary(x, same, {}); }) == ErrorCode::SingleClassInput);
  const std::vector<BinaryLabel> short_y = {BinaryLabel::Claim};
  CHECK(failure([&] { train_binary(x, short_y, {}); }) == ErrorCode::DimensionMismatch);
  TrainConfig bad;
  bad.l2_strength = -1;
  const std::vector<BinaryLabel> y = {BinaryLabel::Claim, BinaryLabel::NonClaim};
  CHECK(failure([&] { train_binary(x, y, bad); }) == ErrorCode::InvalidArgument);
  const std::vector<ClaimCategory> one = {ClaimCategory::Quantity, ClaimCategory::Quantity};
  CHECK(failure([&] { train_multinomial(x, one, {}); }) == ErrorCode::SingleClassInput);
}

TEST_CASE("probabilities and decisions") {
  BinaryLinearModel zero{{0.0, 0.0}, 0.0, LossKind::Logistic, 0};
  const auto x = SparseVector::from_dense(std::vector<double>{0.3, -2.0});
  CHECK(predict_proba(zero, x) == 0.5);
  CHECK(predict(zero, x) == BinaryLabel::Claim);

  std::mt19937_64 rng(6);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 100; ++trial) {
    BinaryLinearModel m{{g(rng), g(rng)}, g(rng), LossKind::Logistic, 0};
    BinaryLinearModel neg{{-m.weights[0], -m.weights[1]}, -m.bias, LossKind::Logistic, 0};
    const auto v = SparseVector::from_dense(std::vector<double>{g(rng), g(rng)});
    const auto w = SparseVector::from_dense(std::vector<double>{g(rng), g(rng)});
    const double p = predict_proba(m, v);
    CHECK(predict_proba(neg, v) == doctest::Approx(1.0 - p).epsilon(1e-12));
    if (m.margin(v) < m.margin(w)) CHECK(p < predict_proba(m, w));
    CHECK(predict(m, v, 0.0) == BinaryLabel::Claim);

    int previous = 3;
    for (double t : {0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0}) {
      int positives = 0;
      for (const auto& r : {v, w}) positives += predict(m, r, t) == BinaryLabel::Claim;
      CHECK(positives <= previous);
      previous = positives;
    }
  }

  BinaryLinearModel hinge{{1.0, 0.0}, 0.0, LossKind::Hinge, 0};
  CHECK(failure([&] { predict_proba(hinge, x); }) == ErrorCode::HingeModelHasNoProbability);
  CHECK(predict(hinge, SparseVector::from_dense(std::vector<double>{0.0, 1.0})) == BinaryLabel::Claim);
  CHECK(failure([&] { predict_proba(zero, SparseVector::from_dense(std::vector<double>{1.0})); }) ==
        ErrorCode::DimensionMismatch);
}

TEST_CASE("softmax") {
  const std::vector<double> s = {1.0, 2.0, -3.0, 1000.0};
  auto p = softmax(s);
  double sum = 0;
  for (double v : p) sum += v;
  CHECK(std::abs(sum - 1.0) < 1e-9);
  std::vector<double> shifted = s;
  for (auto& v : shifted) v += 123.25;
  const auto q = softmax(shifted);
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(std::abs(p[i] - q[i]) < 1e-12);
}

TEST_CASE("multinomial training") {
  std::mt19937_64 rng(7);
  SUBCASE("three separable classes") {
    FeatureMatrix x{2, {}};
    std::vector<ClaimCategory> y;
    const std::vector<std::pair<double, double>> centres = {{4, 0}, {-4, 4}, {-4, -4}};
    const std::vector<ClaimCategory> classes = {ClaimCategory::NotAClaim, ClaimCategory::Quantity,
                                                ClaimCategory::Prediction};
    std::uniform_real_distribution<double> jitter(-1, 1);
    for (int i = 0; i < 30; ++i) {
      const auto [cx, cy] = centres[i % 3];
      x.rows.push_back(SparseVector::from_dense(std::vector<double>{cx + jitter(rng), cy + jitter(rng)}));
      y.push_back(classes[i % 3]);
    }
    TrainConfig cfg;
    cfg.l2_strength = 0.01;
    const auto model = train_multinomial(x, y, cfg);
    CHECK(model.classes == std::vector<ClaimCategory>{ClaimCategory::Quantity, ClaimCategory::Prediction,
                                                      ClaimCategory::NotAClaim});
    for (std::size_t i = 0; i < y.size(); ++i) {
      const auto pred = predict_multiclass(model, x.rows[i]);
      CHECK(pred.category == y[i]);
      double sum = 0;
      for (double p : pred.probabilities) sum += p;
      CHECK(std::abs(sum - 1.0) < 1e-9);
    }
  }
  SUBCASE("two classes agree with the binary model") {
    auto data = random_binary(rng, 200, 3);
    std::normal_distribution<double> g;
    std::vector<ClaimCategory> cats;
    for (std::size_t i = 0; i < data.y.size(); ++i) {
      const auto dense = data.x.rows[i].to_dense();
      const bool claim = dense[0] + 0.5 * dense[1] + 0.3 * g(rng) > 0;
      data.y[i] = claim ? BinaryLabel::Claim : BinaryLabel::NonClaim;
      cats.push_back(claim ? ClaimCategory::Quantity : ClaimCategory::NotAClaim);
    }
    TrainConfig cfg;
    cfg.tolerance = 1e-9;
    const auto binary = train_binary(data.x, data.y, cfg);
    const auto multi = train_multinomial(data.x, cats, cfg);
    int agree = 0, total = 0;
    for (double a = -3; a <= 3; a += 0.25) {
      for (double b = -3; b <= 3; b += 0.25) {
        const auto v = SparseVector::from_dense(std::vector<double>{a, b, 0.5 * a - b});
        const bool bin = predict(binary, v) == BinaryLabel::Claim;
        const bool mc = predict_multiclass(multi, v).category == ClaimCategory::Quantity;
        agree += bin == mc;
        ++total;
      }
    }
    CHECK(static_cast<double>(agree) / total >= 0.98);
  }
}

TEST_CASE("model files round trip") {
  std::mt19937_64 rng(8);
  const auto data = random_binary(rng, 50, 6);
  for (LossKind loss : {LossKind::Logistic, LossKind::Hinge}) {
    TrainConfig cfg;
    cfg.loss = loss;
    TrainedModel model;
    model.classifier = train_binary(data.x, data.y, cfg);
    const auto back = deserialize_model(serialize_model(model));
    const auto& a = std::get<BinaryLinearModel>(model.classifier);
    const auto& b = std::get<BinaryLinearModel>(back.classifier);
    CHECK(a.weights == b.weights);
    CHECK(a.bias == b.bias);
    std::normal_distribution<double> g(0, 10);
    for (int i = 0; i < 100; ++i) {
      std::vector<double> v(6);
      for (auto& e : v) e = g(rng);
      const auto x = SparseVector::from_dense(v);
      if (loss == LossKind::Logistic) CHECK(predict_proba(a, x) == predict_proba(b, x));
      CHECK(a.margin(x) == b.margin(x));
    }
  }
}

TEST_CASE("model files with pipelines, bad versions and truncation") {
  testing::TempDir dir;
  const auto corpus = synthetic::labeled_corpus(120, 0.3, 9);
  std::vector<Sentence> sentences;
  std::vector<BinaryLabel> y;
  for (const auto& ls : corpus) {
    sentences.push_back(ls.sentence);
    y.push_back(std::get<BinaryLabel>(ls.label));
  }
  auto pipeline = std::make_shared<FeaturePipeline>(
      FeaturePipelineConfig::from_strings(std::vector<std::string>{"tfidf_nummask"}));
  pipeline->fit(sentences);
  TrainedModel model;
  auto clf = train_binary(pipeline->transform(sentences), y, {});
  clf.pipeline_fingerprint = pipeline->config().fingerprint();
  model.classifier = clf;
  model.pipeline = pipeline;
  save_model(model, dir / "m.json");
  const auto back = load_model(dir / "m.json");
  const auto p1 = classify_sentences(model, sentences);
  const auto p2 = classify_sentences(back, sentences);
  for (std::size_t i = 0; i < p1.size(); ++i) {
    CHECK(p1[i].label == p2[i].label);
    CHECK(p1[i].probability == p2[i].probability);
  }

  auto doc = nlohmann::json::parse(testing::read_file(dir / "m.json"));
  doc["schema_version"] = 99;
  dir.write("v.json", doc.dump());
  CHECK(failure([&] { load_model(dir / "v.json"); }) == ErrorCode::VersionMismatch);

  const auto text = testing::read_file(dir / "m.json");
  dir.write("t.json", text.substr(0, text.size() / 2));
  CHECK(failure([&] { load_model(dir / "t.json"); }) == ErrorCode::CorruptModelFile);

  doc["schema_version"] = kModelSchemaVersion;
  doc["pipeline_fingerprint"] = 12345;
  dir.write("f.json", doc.dump());
  CHECK(failure([&] { load_model(dir / "f.json"); }) == ErrorCode::CorruptModelFile);

  CHECK(failure([&] { load_model(dir / "absent.json"); }) == ErrorCode::IoError);
}

TEST_CASE("multiclass models map categories to binary labels") {
  const auto corpus = synthetic::multiclass_corpus(140, 3);
  std::vector<Sentence> sentences;
  std::vector<ClaimCategory> y;
  for (const auto& ls : corpus) {
    sentences.push_back(ls.sentence);
    y.push_back(std::get<ClaimCategory>(ls.label));
  }
  auto pipeline = std::make_shared<FeaturePipeline>(
      FeaturePipelineConfig::from_strings(std::vector<std::string>{"tfidf"}));
  pipeline->fit(sentences);
  TrainedModel model;
  auto clf = train_multinomial(pipeline->transform(sentences), y, {});
  clf.pipeline_fingerprint = pipeline->config().fingerprint();
  model.classifier = clf;
  model.pipeline = pipeline;
  const auto back = deserialize_model(serialize_model(model));
  const auto preds = classify_sentences(back, sentences);
  for (const auto& p : preds) {
    REQUIRE(p.category);
    CHECK(p.label == map_to_binary(*p.category, LabelMapping::row_b()));
    REQUIRE(p.probability);
    CHECK(*p.probability > 0.0);
  }
}
