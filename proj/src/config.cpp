#include "degen/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "degen/error.hpp"

namespace degen {

const char* to_string(ConfigValue::Type type) noexcept {
  switch (type) {
    case ConfigValue::Type::Number: return "number";
    case ConfigValue::Type::String: return "string";
    case ConfigValue::Type::Bool: return "boolean";
    case ConfigValue::Type::Array: return "array";
  }
  return "?";
}

class ConfigParser {
public:
  ConfigParser(const std::string& text, Config& out) : s_(text), out_(out) {}

  void run() {
    std::string section;
    for (;;) {
      skip_blank_lines();
      if (at_end()) return;
      if (peek() == '[') {
        section = header();
        if (out_.section_lines_.count(section)) out_.fail_at(line_, "duplicate section [" + section + "]");
        out_.section_lines_[section] = line_;
        out_.entries_[section];
      } else {
        const int key_line = line_;
        const std::string key = bare_key();
        skip_space();
        if (peek() != '=') out_.fail_at(line_, "expected '=' after key '" + key + "'");
        ++pos_;
        skip_space();
        ConfigValue v = value();
        v.line = key_line;
        auto& sec = out_.entries_[section];
        if (sec.count(key)) out_.fail_at(key_line, "duplicate key '" + key + "'");
        sec.emplace(key, std::move(v));
      }
      end_of_line();
    }
  }

private:
  const std::string& s_;
  Config& out_;
  std::size_t pos_ = 0;
  int line_ = 1;

  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return at_end() ? '\0' : s_[pos_]; }

  void skip_space() {
    while (!at_end() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r')) ++pos_;
  }
  void skip_comment() {
    if (peek() == '#')
      while (!at_end() && s_[pos_] != '\n') ++pos_;
  }
  void skip_blank_lines() {
    for (;;) {
      skip_space();
      skip_comment();
      if (peek() != '\n') return;
      ++pos_;
      ++line_;
    }
  }
  // Whitespace, comments and newlines inside arrays.
  void skip_array_space() {
    for (;;) {
      skip_space();
      skip_comment();
      if (peek() != '\n') return;
      ++pos_;
      ++line_;
    }
  }
  void end_of_line() {
    skip_space();
    skip_comment();
    if (at_end()) return;
    if (peek() != '\n') out_.fail_at(line_, std::string("unexpected '") + peek() + "' after value");
    ++pos_;
    ++line_;
  }

  static bool key_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
  }

  std::string bare_key() {
    const std::size_t start = pos_;
    while (!at_end() && key_char(s_[pos_])) ++pos_;
    if (pos_ == start) out_.fail_at(line_, std::string("expected a key, found '") + peek() + "'");
    return s_.substr(start, pos_ - start);
  }

  std::string header() {
    ++pos_;
    skip_space();
    std::string name = bare_key();
    while (peek() == '.') {
      ++pos_;
      name += "." + bare_key();
    }
    skip_space();
    if (peek() != ']') out_.fail_at(line_, "expected ']' to close section header");
    ++pos_;
    return name;
  }

  ConfigValue value() {
    ConfigValue v;
    v.line = line_;
    const char c = peek();
    if (c == '"') {
      v.type = ConfigValue::Type::String;
      v.text = quoted();
    } else if (c == '[') {
      v.type = ConfigValue::Type::Array;
      ++pos_;
      skip_array_space();
      while (peek() != ']') {
        if (at_end()) out_.fail_at(v.line, "unterminated array");
        v.items.push_back(value());
        skip_array_space();
        if (peek() == ',') {
          ++pos_;
          skip_array_space();
        } else if (peek() != ']') {
          out_.fail_at(line_, "expected ',' or ']' in array");
        }
      }
      ++pos_;
    } else if (s_.compare(pos_, 4, "true") == 0 && !key_char(pos_ + 4 < s_.size() ? s_[pos_ + 4] : ' ')) {
      v.type = ConfigValue::Type::Bool;
      v.flag = true;
      pos_ += 4;
    } else if (s_.compare(pos_, 5, "false") == 0 && !key_char(pos_ + 5 < s_.size() ? s_[pos_ + 5] : ' ')) {
      v.type = ConfigValue::Type::Bool;
      pos_ += 5;
    } else {
      number(v);
    }
    return v;
  }

  std::string quoted() {
    ++pos_;
    std::string out;
    for (;;) {
      if (at_end() || peek() == '\n') out_.fail_at(line_, "unterminated string");
      char c = s_[pos_++];
      if (c == '"') return out;
      if (c == '\\') {
        if (at_end()) out_.fail_at(line_, "unterminated string");
        const char e = s_[pos_++];
        switch (e) {
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          default: out_.fail_at(line_, std::string("unknown escape '\\") + e + "'");
        }
      } else {
        out += c;
      }
    }
  }

  void number(ConfigValue& v) {
    std::size_t end = pos_;
    while (end < s_.size() && (key_char(s_[end]) || s_[end] == '.' || s_[end] == '+')) ++end;
    std::string tok = s_.substr(pos_, end - pos_);
    if (tok.empty()) out_.fail_at(line_, std::string("expected a value, found '") + peek() + "'");
    const char* first = tok.data();
    if (*first == '+') ++first;
    double x = 0.0;
    const auto res = std::from_chars(first, tok.data() + tok.size(), x);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || !std::isfinite(x))
      out_.fail_at(line_, "invalid value '" + tok + "'");
    v.type = ConfigValue::Type::Number;
    v.number = x;
    v.integral = tok.find_first_of(".eE") == std::string::npos;
    pos_ = end;
  }
};

Config Config::parse(const std::string& text, const std::string& origin) {
  Config c;
  c.origin_ = origin;
  c.entries_[""];
  ConfigParser(text, c).run();
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Config, path + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

void Config::fail_at(int line, const std::string& message) const {
  fail(ErrorKind::Config, origin_ + ":" + std::to_string(line) + ": " + message);
}

bool Config::has_section(const std::string& section) const { return section_lines_.count(section) > 0; }

const ConfigValue* Config::find(const std::string& section, const std::string& key) const {
  const auto s = entries_.find(section);
  if (s == entries_.end()) return nullptr;
  const auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

namespace {

std::string field(const std::string& section, const std::string& key) {
  return section.empty() ? key : section + "." + key;
}

}  // namespace

double Config::number(const std::string& section, const std::string& key, double fallback) const {
  const ConfigValue* v = find(section, key);
  if (!v) return fallback;
  if (v->type != ConfigValue::Type::Number)
    fail_at(v->line, field(section, key) + " must be a number, got " + to_string(v->type));
  return v->number;
}

int Config::integer(const std::string& section, const std::string& key, int fallback) const {
  const ConfigValue* v = find(section, key);
  if (!v) return fallback;
  if (v->type != ConfigValue::Type::Number || !v->integral || std::abs(v->number) > 1e9)
    fail_at(v->line, field(section, key) + " must be an integer");
  return static_cast<int>(v->number);
}

std::string Config::string(const std::string& section, const std::string& key, const std::string& fallback) const {
  const ConfigValue* v = find(section, key);
  if (!v) return fallback;
  if (v->type != ConfigValue::Type::String)
    fail_at(v->line, field(section, key) + " must be a string, got " + to_string(v->type));
  return v->text;
}

bool Config::boolean(const std::string& section, const std::string& key, bool fallback) const {
  const ConfigValue* v = find(section, key);
  if (!v) return fallback;
  if (v->type != ConfigValue::Type::Bool)
    fail_at(v->line, field(section, key) + " must be true or false, got " + to_string(v->type));
  return v->flag;
}

std::vector<double> Config::numbers(const std::string& section, const std::string& key,
                                    const std::vector<double>& fallback) const {
  const ConfigValue* v = find(section, key);
  if (!v) return fallback;
  if (v->type != ConfigValue::Type::Array) fail_at(v->line, field(section, key) + " must be an array of numbers");
  std::vector<double> out;
  for (const ConfigValue& item : v->items) {
    if (item.type != ConfigValue::Type::Number)
      fail_at(item.line, field(section, key) + " must be an array of numbers");
    out.push_back(item.number);
  }
  return out;
}

std::vector<int> Config::integers(const std::string& section, const std::string& key,
                                  const std::vector<int>& fallback) const {
  const ConfigValue* v = find(section, key);
  if (!v) return fallback;
  if (v->type != ConfigValue::Type::Array) fail_at(v->line, field(section, key) + " must be an array of integers");
  std::vector<int> out;
  for (const ConfigValue& item : v->items) {
    if (item.type != ConfigValue::Type::Number || !item.integral || std::abs(item.number) > 1e9)
      fail_at(item.line, field(section, key) + " must be an array of integers");
    out.push_back(static_cast<int>(item.number));
  }
  return out;
}

std::vector<std::vector<int>> Config::integer_rows(const std::string& section, const std::string& key) const {
  const ConfigValue* v = find(section, key);
  if (!v) return {};
  if (v->type != ConfigValue::Type::Array) fail_at(v->line, field(section, key) + " must be an array of arrays");
  std::vector<std::vector<int>> out;
  for (const ConfigValue& row : v->items) {
    if (row.type != ConfigValue::Type::Array)
      fail_at(row.line, field(section, key) + " must be an array of integer arrays");
    std::vector<int> r;
    for (const ConfigValue& item : row.items) {
      if (item.type != ConfigValue::Type::Number || !item.integral || std::abs(item.number) > 1e9)
        fail_at(item.line, field(section, key) + " entries must be integers");
      r.push_back(static_cast<int>(item.number));
    }
    out.push_back(std::move(r));
  }
  return out;
}

double Config::positive(const std::string& section, const std::string& key, double fallback) const {
  const double x = number(section, key, fallback);
  if (!(x > 0.0)) {
    const ConfigValue* v = find(section, key);
    fail_at(v ? v->line : 0, field(section, key) + " must be positive");
  }
  return x;
}

void Config::check_schema(const std::map<std::string, std::vector<std::string>>& schema) const {
  for (const auto& [section, keys] : entries_) {
    const auto allowed = schema.find(section);
    if (allowed == schema.end()) {
      const auto line = section_lines_.find(section);
      if (section.empty() && keys.empty()) continue;
      if (section.empty()) fail_at(keys.begin()->second.line, "key '" + keys.begin()->first + "' outside a section");
      fail_at(line == section_lines_.end() ? 0 : line->second, "unknown section [" + section + "]");
    }
    for (const auto& [key, v] : keys) {
      bool known = false;
      for (const std::string& k : allowed->second) known = known || k == key;
      if (!known) fail_at(v.line, "unknown key '" + key + "' in [" + section + "]");
    }
  }
}

}  // namespace degen
