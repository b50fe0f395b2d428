#include "claimspot/report.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace claimspot {

std::string class_label_name(int label, bool binary) {
  if (binary) return std::string(to_string(static_cast<BinaryLabel>(label)));
  if (auto c = category_from_code(label)) return std::string(category_name(*c));
  return std::to_string(label);
}

namespace {

std::string header_lines(const std::vector<std::string>& header) {
  std::string out;
  for (const auto& h : header) out += "# " + h + "\n";
  return out;
}

// Renders rows of cells as left-aligned columns separated by two spaces.
std::string align(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths;
  for (const auto& r : rows) {
    widths.resize(std::max(widths.size(), r.size()), 0);
    for (std::size_t c = 0; c < r.size(); ++c) widths[c] = std::max(widths[c], r[c].size());
  }
  std::string out;
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t c = 0; c < r.size(); ++c) {
      line += r[c];
      if (c + 1 < r.size()) line += std::string(widths[c] - r[c].size() + 2, ' ');
    }
    out += line + "\n";
  }
  return out;
}

}  // namespace

std::string format_binary_tsv(const std::vector<BinaryReportRow>& rows, const std::vector<std::string>& header) {
  std::string out = header_lines(header);
  out += "features\tclassifier\tP\tR\tF1\tP_lo\tP_hi\tR_lo\tR_hi\tn_pred_pos\tn_gold_pos\n";
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    out += fmt::format("{}\t{}\t{:.4f}\t{:.4f}\t{:.4f}\t{:.4f}\t{:.4f}\t{:.4f}\t{:.4f}\t{}\t{}\n", r.features,
                       r.classifier, m.precision, m.recall, m.f1, m.p_interval.lo, m.p_interval.hi, m.r_interval.lo,
                       m.r_interval.hi, m.n_pred_pos, m.n_gold_pos);
  }
  return out;
}

std::string format_binary_table(const std::vector<BinaryReportRow>& rows, const std::vector<std::string>& header) {
  std::vector<std::vector<std::string>> cells = {
      {"Features", "Classifier", "P", "R", "F1", "P-interval", "R-interval"}};
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    cells.push_back({r.features, r.classifier, fmt::format("{:.2f}", m.precision), fmt::format("{:.2f}", m.recall),
                     fmt::format("{:.2f}", m.f1), fmt::format("{:.2f} - {:.2f}", m.p_interval.lo, m.p_interval.hi),
                     fmt::format("{:.2f} - {:.2f}", m.r_interval.lo, m.r_interval.hi)});
  }
  return header_lines(header) + align(cells);
}

std::string format_multiclass_tsv(const MulticlassReport& report) {
  std::string out = "class\tP\tR\tF1\tN\n";
  for (const auto& c : report.per_class) {
    out += fmt::format("{}\t{:.4f}\t{:.4f}\t{:.4f}\t{}\n", class_label_name(c.label, false), c.precision, c.recall,
                       c.f1, c.support);
  }
  out += fmt::format("micro avg / total\t{:.4f}\t{:.4f}\t{:.4f}\t{}\n", report.micro.precision, report.micro.recall,
                     report.micro.f1, report.total);
  out += fmt::format("macro avg / total\t{:.4f}\t{:.4f}\t{:.4f}\t{}\n", report.macro.precision, report.macro.recall,
                     report.macro.f1, report.total);
  return out;
}

std::string format_multiclass_table(const MulticlassReport& report) {
  std::vector<std::vector<std::string>> cells = {{"Class", "P", "R", "F1", "N"}};
  for (const auto& c : report.per_class) {
    cells.push_back({class_label_name(c.label, false), fmt::format("{:.2f}", c.precision),
                     fmt::format("{:.2f}", c.recall), fmt::format("{:.2f}", c.f1), std::to_string(c.support)});
  }
  for (const auto& [name, avg] : {std::pair{"micro avg / total", report.micro}, {"macro avg / total", report.macro}}) {
    cells.push_back({name, fmt::format("{:.2f}", avg.precision), fmt::format("{:.2f}", avg.recall),
                     fmt::format("{:.2f}", avg.f1), std::to_string(report.total)});
  }
  return align(cells);
}

std::string format_confusion_tsv(const ConfusionMatrix& cm, bool binary) {
  std::string out = "gold\\predicted";
  for (int c : cm.classes) out += "\t" + class_label_name(c, binary);
  out += "\n";
  for (std::size_t r = 0; r < cm.classes.size(); ++r) {
    out += class_label_name(cm.classes[r], binary);
    for (auto v : cm.counts[r]) out += "\t" + std::to_string(v);
    out += "\n";
  }
  return out;
}

std::string format_disagreement_tsv(const DisagreementMatrix& matrix) {
  std::string out;
  for (auto c : kAllCategories) out += "\t" + std::string(category_short_name(c));
  out += "\n";
  for (std::size_t i = 0; i < 7; ++i) {
    out += std::string(category_short_name(kAllCategories[i]));
    for (std::size_t j = 0; j < 7; ++j) out += "\t" + std::to_string(matrix.counts[i][j]);
    out += "\n";
  }
  return out;
}

}  // namespace claimspot
