#include "claimspot/annotation.hpp"

#include <algorithm>
#include <unordered_map>

#include <spdlog/spdlog.h>

#include "claimspot/error.hpp"

namespace claimspot {

ReliabilityData ReliabilityData::from_annotations(std::span<const AnnotationRecord> records) {
  ReliabilityData data;
  for (const auto& r : records) data.units[r.sentence_id].emplace_back(r.annotator_id, code_of(r.category));
  return data;
}

ReliabilityData ReliabilityData::binarized(std::span<const AnnotationRecord> records,
                                           const LabelMapping& mapping) {
  validate_mapping(mapping);
  ReliabilityData data;
  for (const auto& r : records) {
    auto b = map_to_binary(r.category, mapping);
    if (!b) continue;
    data.units[r.sentence_id].emplace_back(r.annotator_id, *b == BinaryLabel::Claim ? 1 : 2);
  }
  return data;
}

std::size_t ReliabilityData::vote_count() const {
  std::size_t n = 0;
  for (const auto& [id, votes] : units) n += votes.size();
  return n;
}

AgreementReport krippendorff_alpha(const ReliabilityData& data) {
  // Dense index over the values that actually occur.
  std::map<int, std::size_t> index;
  for (const auto& [id, votes] : data.units) {
    if (votes.size() < 2) continue;
    for (const auto& [annotator, code] : votes) index.emplace(code, 0);
  }
  std::size_t next = 0;
  for (auto& [code, idx] : index) idx = next++;

  const std::size_t v = index.size();
  std::vector<double> coincidence(v * v, 0.0);
  AgreementReport report;
  for (const auto& [id, votes] : data.units) {
    const std::size_t m = votes.size();
    if (m < 2) continue;
    ++report.n_units;
    report.n_votes += m;
    std::vector<std::size_t> counts(v, 0);
    for (const auto& [annotator, code] : votes) ++counts[index.at(code)];
    const double weight = 1.0 / static_cast<double>(m - 1);
    for (std::size_t c = 0; c < v; ++c) {
      if (counts[c] == 0) continue;
      for (std::size_t k = 0; k < v; ++k) {
        const double pairs = c == k ? static_cast<double>(counts[c]) * (counts[c] - 1)
                                    : static_cast<double>(counts[c]) * counts[k];
        coincidence[c * v + k] += pairs * weight;
      }
    }
  }
  if (report.n_units == 0) {
    throw Error(ErrorCode::InsufficientData, "no unit has two or more votes");
  }

  std::vector<double> marginals(v, 0.0);
  for (std::size_t c = 0; c < v; ++c) {
    for (std::size_t k = 0; k < v; ++k) marginals[c] += coincidence[c * v + k];
  }
  const double n = static_cast<double>(report.n_votes);
  double observed = 0.0;
  double expected = 0.0;
  for (std::size_t c = 0; c < v; ++c) {
    for (std::size_t k = 0; k < v; ++k) {
      if (c == k) continue;
      observed += coincidence[c * v + k];
      expected += marginals[c] * marginals[k];
    }
  }
  // A single value throughout: no variation to disagree about.
  if (expected == 0.0) {
    report.alpha = 1.0;
    return report;
  }
  report.alpha = 1.0 - (n - 1.0) * observed / expected;
  return report;
}

std::int64_t DisagreementMatrix::total() const {
  std::int64_t sum = 0;
  for (std::size_t i = 0; i < 7; ++i) {
    for (std::size_t j = i + 1; j < 7; ++j) sum += counts[i][j];
  }
  return sum;
}

DisagreementMatrix disagreement_matrix(const ReliabilityData& data) {
  DisagreementMatrix matrix;
  for (const auto& [id, votes] : data.units) {
    for (std::size_t a = 0; a < votes.size(); ++a) {
      for (std::size_t b = a + 1; b < votes.size(); ++b) {
        const int x = votes[a].second;
        const int y = votes[b].second;
        if (x < 1 || x > 7 || y < 1 || y > 7) {
          throw Error(ErrorCode::UnknownCategoryCode, "vote code outside 1..7 in unit '" + id + "'");
        }
        if (x == y) continue;
        ++matrix.counts[x - 1][y - 1];
        ++matrix.counts[y - 1][x - 1];
      }
    }
  }
  return matrix;
}

MajorityResult aggregate_majority(std::span<const ClaimCategory> votes) {
  if (votes.size() < kMinAnnotators) return {MajorityOutcome::TooFewAnnotators, std::nullopt};
  std::array<std::size_t, 8> tally{};
  for (auto c : votes) ++tally[code_of(c)];
  for (auto c : kAllCategories) {
    if (2 * tally[code_of(c)] > votes.size()) return {MajorityOutcome::Resolved, c};
  }
  return {MajorityOutcome::NoMajority, std::nullopt};
}

namespace {

template <typename Emit>
AggregationSummary aggregate(std::span<const Sentence> sentences,
                             std::span<const AnnotationRecord> annotations, Emit&& emit) {
  std::unordered_map<std::string, std::vector<ClaimCategory>> votes;
  for (const auto& s : sentences) votes.try_emplace(s.id);
  std::size_t orphans = 0;
  for (const auto& r : annotations) {
    auto it = votes.find(r.sentence_id);
    if (it == votes.end()) {
      ++orphans;
      continue;
    }
    it->second.push_back(r.category);
  }
  if (orphans > 0) spdlog::warn("{} votes reference unknown sentence ids and were skipped", orphans);

  AggregationSummary summary;
  for (const auto& s : sentences) {
    const auto& v = votes.at(s.id);
    if (v.empty()) continue;
    const auto result = aggregate_majority(v);
    switch (result.outcome) {
      case MajorityOutcome::TooFewAnnotators: ++summary.too_few; break;
      case MajorityOutcome::NoMajority: ++summary.no_majority; break;
      case MajorityOutcome::Resolved:
        ++summary.resolved;
        emit(s, *result.category, summary);
        break;
    }
  }
  return summary;
}

}  // namespace

AggregatedDataset build_binary_dataset(std::span<const Sentence> sentences,
                                       std::span<const AnnotationRecord> annotations,
                                       const LabelMapping& mapping) {
  validate_mapping(mapping);
  AggregatedDataset out;
  out.summary = aggregate(sentences, annotations,
                          [&](const Sentence& s, ClaimCategory c, AggregationSummary& summary) {
                            auto label = map_to_binary(c, mapping);
                            if (!label) {
                              ++summary.omitted;
                              return;
                            }
                            ++(*label == BinaryLabel::Claim ? summary.claims : summary.nonclaims);
                            out.items.push_back({s, *label, false});
                          });
  return out;
}

AggregatedDataset build_multiclass_dataset(std::span<const Sentence> sentences,
                                           std::span<const AnnotationRecord> annotations) {
  AggregatedDataset out;
  out.summary = aggregate(sentences, annotations,
                          [&](const Sentence& s, ClaimCategory c, AggregationSummary& summary) {
                            ++(c == ClaimCategory::NotAClaim ? summary.nonclaims : summary.claims);
                            out.items.push_back({s, c, false});
                          });
  return out;
}

}  // namespace claimspot
