#include "nnjump/cli/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>

#include "nnjump/error.hpp"

namespace nnjump::cli {

namespace {

std::string format_double(double d) {
  if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  std::string s = buf;
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

class Parser {
 public:
  Parser(const std::string& text, std::size_t line) : s_(text), line_(line) {}

  Value value() {
    skip();
    if (pos_ >= s_.size()) error("expected a value");
    const char c = s_[pos_];
    if (c == '"') return Value{string()};
    if (c == '[') return array();
    if (c == '{') return record();
    if (starts("true")) {
      pos_ += 4;
      return Value{true};
    }
    if (starts("false")) {
      pos_ += 5;
      return Value{false};
    }
    return number();
  }

  std::string key() {
    skip();
    const std::size_t b = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' || s_[pos_] == '.')) {
      ++pos_;
    }
    if (b == pos_) error("expected a key");
    return s_.substr(b, pos_ - b);
  }

  void expect(char c) {
    skip();
    if (pos_ >= s_.size() || s_[pos_] != c) error(std::string("expected '") + c + "'");
    ++pos_;
  }

  void end() {
    skip();
    if (pos_ != s_.size()) error("unexpected trailing text");
  }

  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorKind::Config, "line " + std::to_string(line_) + ": " + what);
  }

 private:
  const std::string& s_;
  std::size_t line_;
  std::size_t pos_ = 0;

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool starts(const char* w) const { return s_.compare(pos_, std::char_traits<char>::length(w), w) == 0; }

  std::string string() {
    ++pos_;
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) {
        ++pos_;
        out += s_[pos_] == 'n' ? '\n' : s_[pos_];
      } else {
        out += s_[pos_];
      }
      ++pos_;
    }
    if (pos_ >= s_.size()) error("unterminated string");
    ++pos_;
    return out;
  }

  Value number() {
    const std::size_t b = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.' ||
                                s_[pos_] == '-' || s_[pos_] == '+')) {
      ++pos_;
    }
    const std::string tok = s_.substr(b, pos_ - b);
    if (tok.empty()) error("expected a value");
    double d = 0.0;
    if (tok == "inf" || tok == "+inf") {
      d = INFINITY;
    } else if (tok == "-inf") {
      d = -INFINITY;
    } else {
      const char* first = tok.data() + (tok[0] == '+' ? 1 : 0);
      auto [p, ec] = std::from_chars(first, tok.data() + tok.size(), d);
      if (ec != std::errc() || p != tok.data() + tok.size()) error("malformed value '" + tok + "'");
    }
    return Value{Number{tok, d}};
  }

  Value array() {
    ++pos_;
    Array a;
    skip();
    if (pos_ < s_.size() && s_[pos_] == ']') {
      ++pos_;
      return Value{a};
    }
    for (;;) {
      a.push_back(value());
      skip();
      if (pos_ < s_.size() && s_[pos_] == ',') {
        ++pos_;
        skip();
        if (pos_ < s_.size() && s_[pos_] == ']') {
          ++pos_;
          break;
        }
        continue;
      }
      expect(']');
      break;
    }
    return Value{a};
  }

  Value record() {
    ++pos_;
    Record r;
    std::set<std::string> seen;
    skip();
    if (pos_ < s_.size() && s_[pos_] == '}') {
      ++pos_;
      return Value{r};
    }
    for (;;) {
      const std::string k = key();
      if (!seen.insert(k).second) error("duplicate field '" + k + "'");
      expect('=');
      r.emplace_back(k, value());
      skip();
      if (pos_ < s_.size() && s_[pos_] == ',') {
        ++pos_;
        skip();
        if (pos_ < s_.size() && s_[pos_] == '}') {
          ++pos_;
          break;
        }
        continue;
      }
      expect('}');
      break;
    }
    return Value{r};
  }
};

std::string strip_comment(const std::string& line) {
  bool in_str = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '\\' && in_str) {
      ++i;
    } else if (line[i] == '"') {
      in_str = !in_str;
    } else if (line[i] == '#' && !in_str) {
      return line.substr(0, i);
    }
  }
  return line;
}

int depth_change(const std::string& line) {
  int d = 0;
  bool in_str = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c == '\\' && in_str) {
      ++i;
    } else if (c == '"') {
      in_str = !in_str;
    } else if (!in_str && (c == '[' || c == '{')) {
      ++d;
    } else if (!in_str && (c == ']' || c == '}')) {
      --d;
    }
  }
  return d;
}

[[noreturn]] void type_error(const std::string& key, const char* want) {
  fail(ErrorKind::Config, key + ": expected " + want);
}

}  // namespace

Value Value::number(double d) { return Value{Number{format_double(d), d}}; }

Value Value::integer(std::uint64_t u) { return Value{Number{std::to_string(u), static_cast<double>(u)}}; }

double Value::as_double(const std::string& key) const {
  if (!is_number()) type_error(key, "a number");
  return std::get<Number>(v).value;
}

std::uint64_t Value::as_u64(const std::string& key) const {
  if (!is_number()) type_error(key, "an integer");
  const auto& tok = std::get<Number>(v).token;
  std::uint64_t u = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), u);
  if (ec != std::errc() || p != tok.data() + tok.size()) {
    const double d = std::get<Number>(v).value;
    if (d >= 0.0 && d < 1.8e19 && std::floor(d) == d) return static_cast<std::uint64_t>(d);
    type_error(key, "a non-negative integer");
  }
  return u;
}

const std::string& Value::as_string(const std::string& key) const {
  if (!is_string()) type_error(key, "a string");
  return std::get<std::string>(v);
}

bool Value::as_bool(const std::string& key) const {
  if (!is_bool()) type_error(key, "true or false");
  return std::get<bool>(v);
}

const Array& Value::as_array(const std::string& key) const {
  if (!is_array()) type_error(key, "an array");
  return std::get<Array>(v);
}

const Record& Value::as_record(const std::string& key) const {
  if (!is_record()) type_error(key, "a record");
  return std::get<Record>(v);
}

const Value* find(const Record& r, const std::string& field) {
  for (const auto& [k, v] : r) {
    if (k == field) return &v;
  }
  return nullptr;
}

Document parse_document(const std::string& text) {
  Document doc;
  std::set<std::string> seen;
  std::size_t line_no = 0, start = 0;
  std::string pending;
  int depth = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string raw = text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
    pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string line = strip_comment(raw);
    if (pending.empty()) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      start = line_no;
    }
    pending += line;
    pending += ' ';
    depth += depth_change(line);
    if (depth > 0) continue;
    Parser p(pending, start);
    const std::string key = p.key();
    p.expect('=');
    Value v = p.value();
    p.end();
    if (!seen.insert(key).second) p.error("duplicate key '" + key + "'");
    doc.emplace_back(key, std::move(v));
    pending.clear();
    depth = 0;
  }
  if (!pending.empty()) fail(ErrorKind::Config, "line " + std::to_string(start) + ": unbalanced brackets");
  return doc;
}

std::string serialize_value(const Value& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Number>) {
          return x.token;
        } else if constexpr (std::is_same_v<T, std::string>) {
          std::string out = "\"";
          for (char c : x) {
            if (c == '"' || c == '\\') out += '\\';
            if (c == '\n') {
              out += "\\n";
              continue;
            }
            out += c;
          }
          return out + "\"";
        } else if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else if constexpr (std::is_same_v<T, Array>) {
          std::string out = "[";
          for (std::size_t i = 0; i < x.size(); ++i) out += (i ? ", " : "") + serialize_value(x[i]);
          return out + "]";
        } else {
          std::string out = "{";
          for (std::size_t i = 0; i < x.size(); ++i) {
            out += (i ? ", " : "") + x[i].first + " = " + serialize_value(x[i].second);
          }
          return out + "}";
        }
      },
      v.v);
}

std::string serialize_document(const Document& doc) {
  std::string out;
  for (const auto& [k, v] : doc) out += k + " = " + serialize_value(v) + "\n";
  return out;
}

}  // namespace nnjump::cli
