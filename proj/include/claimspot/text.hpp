#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace claimspot {

inline constexpr std::string_view kNumberToken = "*NUMBER*";

/// Lowercased tokens split on every ASCII non-alphanumeric byte. Bytes of
/// multi-byte UTF-8 sequences count as token characters.
std::vector<std::string> tokenize(std::string_view text);

bool is_number_token(std::string_view token);

/// Replaces digit tokens, separated digit groups ("1,000", "5.2") and
/// cardinal/ordinal number words with `*NUMBER*`.
std::vector<std::string> mask_numbers(std::vector<std::string> tokens);

}  // namespace claimspot
