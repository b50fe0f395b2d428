#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace claimspot::config {

struct Value;
struct Table;

using Array = std::vector<Value>;
using TableArray = std::vector<Table>;

struct Table {
  std::map<std::string, Value> entries;

  const Value* find(std::string_view key) const;
  const Table* subtable(std::string_view key) const;
  const TableArray* table_array(std::string_view key) const;

  std::optional<std::string> get_string(std::string_view key) const;
  std::optional<std::int64_t> get_int(std::string_view key) const;
  std::optional<double> get_double(std::string_view key) const;  // accepts integers
  std::optional<bool> get_bool(std::string_view key) const;
  std::optional<std::vector<std::string>> get_strings(std::string_view key) const;
};

struct Value {
  std::variant<std::string, std::int64_t, double, bool, Array, Table, TableArray> data;
};

/// Subset of TOML: comments, `[table]`, `[[array.of.tables]]`, bare or quoted
/// keys, basic and literal strings, integers, floats, booleans, and (multi-line) arrays.
/// Dotted table headers nest. Throws Error(ConfigError) with line numbers.
Table parse(std::string_view text);
Table parse_file(const std::filesystem::path& path);

}  // namespace claimspot::config
