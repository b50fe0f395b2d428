#include "claimspot/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "claimspot/error.hpp"

namespace claimspot::config {

const Value* Table::find(std::string_view key) const {
  auto it = entries.find(std::string(key));
  return it == entries.end() ? nullptr : &it->second;
}

const Table* Table::subtable(std::string_view key) const {
  const auto* v = find(key);
  return v ? std::get_if<Table>(&v->data) : nullptr;
}

const TableArray* Table::table_array(std::string_view key) const {
  const auto* v = find(key);
  return v ? std::get_if<TableArray>(&v->data) : nullptr;
}

namespace {

[[noreturn]] void type_error(std::string_view key, std::string_view expected) {
  throw Error(ErrorCode::ConfigError, "key '" + std::string(key) + "' must be " + std::string(expected));
}

}  // namespace

std::optional<std::string> Table::get_string(std::string_view key) const {
  const auto* v = find(key);
  if (!v) return std::nullopt;
  if (const auto* s = std::get_if<std::string>(&v->data)) return *s;
  type_error(key, "a string");
}

std::optional<std::int64_t> Table::get_int(std::string_view key) const {
  const auto* v = find(key);
  if (!v) return std::nullopt;
  if (const auto* i = std::get_if<std::int64_t>(&v->data)) return *i;
  type_error(key, "an integer");
}

std::optional<double> Table::get_double(std::string_view key) const {
  const auto* v = find(key);
  if (!v) return std::nullopt;
  if (const auto* d = std::get_if<double>(&v->data)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&v->data)) return static_cast<double>(*i);
  type_error(key, "a number");
}

std::optional<bool> Table::get_bool(std::string_view key) const {
  const auto* v = find(key);
  if (!v) return std::nullopt;
  if (const auto* b = std::get_if<bool>(&v->data)) return *b;
  type_error(key, "a boolean");
}

std::optional<std::vector<std::string>> Table::get_strings(std::string_view key) const {
  const auto* v = find(key);
  if (!v) return std::nullopt;
  const auto* arr = std::get_if<Array>(&v->data);
  if (!arr) type_error(key, "an array of strings");
  std::vector<std::string> out;
  for (const auto& item : *arr) {
    const auto* s = std::get_if<std::string>(&item.data);
    if (!s) type_error(key, "an array of strings");
    out.push_back(*s);
  }
  return out;
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Table run() {
    Table root;
    Table* current = &root;
    while (!eof()) {
      skip_ws_and_comments(true);
      if (eof()) break;
      if (peek() == '[') {
        const bool array = text_.substr(pos_, 2) == "[[";
        pos_ += array ? 2 : 1;
        auto path = parse_key_path();
        skip_inline_ws();
        expect(']');
        if (array) expect(']');
        current = open_table(root, path, array);
      } else {
        auto path = parse_key_path();
        skip_inline_ws();
        expect('=');
        skip_inline_ws();
        Value value = parse_value();
        Table* target = current;
        for (std::size_t i = 0; i + 1 < path.size(); ++i) target = &descend(*target, path[i]);
        if (!target->entries.emplace(path.back(), std::move(value)).second) {
          fail("duplicate key '" + path.back() + "'");
        }
      }
      skip_inline_ws();
      if (!eof() && peek() == '#') skip_comment();
      if (!eof() && peek() != '\n' && peek() != '\r') fail("unexpected trailing characters");
    }
    return root;
  }

 private:
  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  [[noreturn]] void fail(const std::string& message) const {
    std::size_t line = 1;
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) line += text_[i] == '\n';
    throw Error(ErrorCode::ConfigError, message, line);
  }

  void expect(char ch) {
    if (eof() || peek() != ch) fail(std::string("expected '") + ch + "'");
    ++pos_;
  }

  void skip_comment() {
    while (!eof() && peek() != '\n') ++pos_;
  }

  void skip_inline_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  void skip_ws_and_comments(bool newlines) {
    while (!eof()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || (newlines && (c == '\n' || c == '\r'))) {
        ++pos_;
      } else if (c == '#') {
        skip_comment();
      } else {
        break;
      }
    }
  }

  std::string parse_key() {
    skip_inline_ws();
    if (!eof() && peek() == '"') return parse_string();
    if (!eof() && peek() == '\'') return parse_literal_string();
    std::string key;
    while (!eof()) {
      const char c = peek();
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') {
        key.push_back(c);
        ++pos_;
      } else {
        break;
      }
    }
    if (key.empty()) fail("expected a key");
    return key;
  }

  std::vector<std::string> parse_key_path() {
    std::vector<std::string> path{parse_key()};
    skip_inline_ws();
    while (!eof() && peek() == '.') {
      ++pos_;
      path.push_back(parse_key());
      skip_inline_ws();
    }
    return path;
  }

  std::string parse_literal_string() {
    expect('\'');
    std::string out;
    while (!eof() && peek() != '\'' && peek() != '\n') out.push_back(text_[pos_++]);
    if (eof() || peek() != '\'') fail("unterminated string");
    ++pos_;
    return out;
  }

  std::string parse_string() {
    expect('"');
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      const char c = text_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (eof()) fail("unterminated escape");
      const char e = text_[pos_++];
      switch (e) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        default: fail(std::string("unsupported escape \\") + e);
      }
    }
    return out;
  }

  Value parse_value() {
    if (eof()) fail("expected a value");
    const char c = peek();
    if (c == '"') return {parse_string()};
    if (c == '\'') return {parse_literal_string()};
    if (c == '[') return parse_array();
    if (text_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return {true};
    }
    if (text_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return {false};
    }
    std::string num;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '+' || peek() == '-' ||
                      peek() == '.' || peek() == '_')) {
      if (peek() != '_') num.push_back(peek());
      ++pos_;
    }
    if (num.empty()) fail("expected a value");
    const bool is_float = num.find_first_of(".eE") != std::string::npos;
    try {
      std::size_t used = 0;
      if (is_float) {
        double d = std::stod(num, &used);
        if (used == num.size()) return {d};
      } else {
        std::int64_t i = std::stoll(num, &used);
        if (used == num.size()) return {i};
      }
    } catch (const std::exception&) {
    }
    fail("invalid value '" + num + "'");
  }

  Value parse_array() {
    expect('[');
    Array items;
    while (true) {
      skip_ws_and_comments(true);
      if (eof()) fail("unterminated array");
      if (peek() == ']') {
        ++pos_;
        break;
      }
      items.push_back(parse_value());
      skip_ws_and_comments(true);
      if (!eof() && peek() == ',') {
        ++pos_;
      } else if (!eof() && peek() != ']') {
        fail("expected ',' or ']' in array");
      }
    }
    return {std::move(items)};
  }

  Table& descend(Table& table, const std::string& key) {
    auto [it, inserted] = table.entries.try_emplace(key, Value{Table{}});
    if (auto* t = std::get_if<Table>(&it->second.data)) return *t;
    if (auto* arr = std::get_if<TableArray>(&it->second.data); arr && !arr->empty()) return arr->back();
    fail("key '" + key + "' is not a table");
  }

  Table* open_table(Table& root, const std::vector<std::string>& path, bool array) {
    Table* t = &root;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) t = &descend(*t, path[i]);
    const auto& last = path.back();
    if (array) {
      auto [it, inserted] = t->entries.try_emplace(last, Value{TableArray{}});
      auto* arr = std::get_if<TableArray>(&it->second.data);
      if (!arr) fail("key '" + last + "' is not an array of tables");
      arr->emplace_back();
      return &arr->back();
    }
    return &descend(*t, last);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Table parse(std::string_view text) { return Parser(text).run(); }

Table parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

}  // namespace claimspot::config
