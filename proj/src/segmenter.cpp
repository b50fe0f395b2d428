#include "claimspot/service.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace claimspot {

namespace {

constexpr std::array<std::string_view, 24> kAbbreviations = {
    "Mr.",  "Mrs.", "Ms.",  "Dr.",  "Prof.", "St.",  "Rt.",  "Hon.", "Sr.",  "Jr.",  "Gen.", "Sen.",
    "Rep.", "Gov.", "No.",  "vs.",  "e.g.",  "i.e.", "U.K.", "U.S.", "U.N.", "E.U.", "Mt.",  "Lt."};

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }
bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending = false;
  for (char c : s) {
    if (is_space(c)) {
      pending = true;
      continue;
    }
    if (pending && !out.empty()) out.push_back(' ');
    pending = false;
    out.push_back(c);
  }
  if (pending && !out.empty()) out.push_back(' ');
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace

bool is_abbreviation(std::string_view word) {
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), word) != kAbbreviations.end();
}

SegmentResult segment_transcript(std::string_view raw, std::string_view carry) {
  std::string joined(carry);
  if (!joined.empty() && !raw.empty() && !is_space(joined.back()) && !is_space(raw.front())) joined += ' ';
  joined += raw;
  const std::string text = collapse_whitespace(joined);

  SegmentResult result;
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_terminator(text[i])) {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < text.size() && is_terminator(text[end])) ++end;
    while (end < text.size() && is_closer(text[end])) ++end;

    bool boundary = false;
    if (trim(std::string_view(text).substr(end)).empty()) {
      boundary = true;
    } else if (is_space(text[end])) {
      std::size_t next = end;
      while (next < text.size() && is_space(text[next])) ++next;
      while (next < text.size() && (text[next] == '"' || text[next] == '\'' || text[next] == '(')) ++next;
      boundary = next < text.size() && std::isupper(static_cast<unsigned char>(text[next]));
    }
    if (boundary && text[i] == '.' && end == i + 1) {
      const auto word_start = text.rfind(' ', i);
      const std::size_t ws = word_start == std::string::npos ? 0 : word_start + 1;
      if (is_abbreviation(std::string_view(text).substr(ws, end - ws))) boundary = false;
    }
    if (boundary) {
      auto sentence = trim(std::string_view(text).substr(start, end - start));
      if (!sentence.empty()) result.sentences.emplace_back(sentence);
      start = end;
    }
    i = end;
  }
  result.leftover = std::string(trim(std::string_view(text).substr(start)));
  return result;
}

}  // namespace claimspot
