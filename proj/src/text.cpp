#include "claimspot/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace claimspot {

namespace {

constexpr std::array<std::string_view, 41> kNumberWords = {
    "one",      "two",       "three",    "four",     "five",     "six",
    "seven",    "eight",    "nine",      "ten",      "eleven",   "twelve",   "thirteen",
    "fourteen", "fifteen",  "sixteen",   "seventeen", "eighteen", "nineteen", "twenty",
    "thirty",   "forty",    "fifty",     "sixty",    "seventy",  "eighty",   "ninety",
    "hundred",  "thousand", "million",   "billion",  "first",    "second",   "third",
    "fourth",   "fifth",    "sixth",     "seventh",  "eighth",   "ninth",    "tenth"};

bool is_token_char(unsigned char ch) { return std::isalnum(ch) || ch >= 0x80; }

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char ch : text) {
    if (is_token_char(ch)) {
      current.push_back(static_cast<char>(ch < 0x80 ? std::tolower(ch) : ch));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

bool is_number_token(std::string_view token) {
  if (token.empty()) return false;
  // digit groups separated by single ',' or '.'
  bool expect_digit = true;
  bool numeric = true;
  for (char ch : token) {
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      expect_digit = false;
    } else if ((ch == ',' || ch == '.') && !expect_digit) {
      expect_digit = true;
    } else {
      numeric = false;
      break;
    }
  }
  if (numeric && !expect_digit) return true;
  std::string lower(token);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return std::find(kNumberWords.begin(), kNumberWords.end(), lower) != kNumberWords.end();
}

std::vector<std::string> mask_numbers(std::vector<std::string> tokens) {
  for (auto& t : tokens) {
    if (is_number_token(t)) t = std::string(kNumberToken);
  }
  return tokens;
}

}  // namespace claimspot
