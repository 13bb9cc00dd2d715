#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace nnjump::cli {

/// Numbers keep their source token so integers such as seeds survive intact.
struct Number {
  std::string token;
  double value = 0.0;
  bool operator==(const Number& o) const { return value == o.value; }
};

struct Value;
using Array = std::vector<Value>;
using Record = std::vector<std::pair<std::string, Value>>;

struct Value {
  std::variant<Number, std::string, bool, Array, Record> v;

  static Value number(double d);
  static Value integer(std::uint64_t u);
  static Value string(std::string s) { return Value{std::move(s)}; }
  static Value boolean(bool b) { return Value{b}; }

  bool is_number() const { return std::holds_alternative<Number>(v); }
  bool is_string() const { return std::holds_alternative<std::string>(v); }
  bool is_bool() const { return std::holds_alternative<bool>(v); }
  bool is_array() const { return std::holds_alternative<Array>(v); }
  bool is_record() const { return std::holds_alternative<Record>(v); }

  /// Typed access; `key` names the config key in the error message.
  double as_double(const std::string& key) const;
  std::uint64_t as_u64(const std::string& key) const;
  const std::string& as_string(const std::string& key) const;
  bool as_bool(const std::string& key) const;
  const Array& as_array(const std::string& key) const;
  const Record& as_record(const std::string& key) const;

  bool operator==(const Value&) const = default;
};

/// Field lookup in a record; nullptr when absent.
const Value* find(const Record& r, const std::string& field);

/// Flat list of `dotted.key = value` entries in file order.
using Document = std::vector<std::pair<std::string, Value>>;

/// Parses the scenario text format: one `key = value` per line, values are
/// numbers, "strings", true/false, [arrays] and {inline = records}; `#`
/// starts a comment. Brackets may span lines. Throws Error(Config).
Document parse_document(const std::string& text);
std::string serialize_document(const Document& doc);
std::string serialize_value(const Value& v);

}  // namespace nnjump::cli
