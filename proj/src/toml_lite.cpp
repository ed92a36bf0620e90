#include "gkm/toml_lite.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gkm {

namespace {

[[noreturn]] void fail(int line, const std::string& what) {
  throw std::runtime_error("toml: line " + std::to_string(line) + ": " + what);
}

std::string strip(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Removes a trailing comment that is not inside a string literal.
std::string strip_comment(const std::string& s) {
  bool in_str = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_str = !in_str;
    if (s[i] == '#' && !in_str) return s.substr(0, i);
  }
  return s;
}

TomlValue parse_scalar(const std::string& tok, int line) {
  TomlValue v;
  if (tok.size() >= 2 && tok.front() == '"' && tok.back() == '"') {
    v.kind = TomlValue::Kind::String;
    v.s = tok.substr(1, tok.size() - 2);
    return v;
  }
  if (tok == "true" || tok == "false") {
    v.kind = TomlValue::Kind::Bool;
    v.b = tok == "true";
    return v;
  }
  try {
    std::size_t used = 0;
    v.i = std::stoll(tok, &used);
    if (used != tok.size()) fail(line, "trailing characters in number '" + tok + "'");
    v.kind = TomlValue::Kind::Int;
    return v;
  } catch (const std::invalid_argument&) {
    fail(line, "unrecognized value '" + tok + "'");
  }
}

TomlValue parse_value(const std::string& raw, int line) {
  std::string s = strip(raw);
  if (s.empty()) fail(line, "missing value");
  if (s.front() != '[') return parse_scalar(s, line);
  if (s.back() != ']') fail(line, "unterminated array");
  std::string inner = s.substr(1, s.size() - 2);
  TomlValue v;
  v.kind = TomlValue::Kind::IntList;
  std::vector<std::string> toks;
  std::string cur;
  bool in_str = false;
  for (char ch : inner) {
    if (ch == '"') in_str = !in_str;
    if (ch == ',' && !in_str) {
      toks.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!strip(cur).empty()) toks.push_back(cur);
  for (std::size_t k = 0; k < toks.size(); ++k) {
    TomlValue e = parse_scalar(strip(toks[k]), line);
    if (k == 0 && e.kind == TomlValue::Kind::String)
      v.kind = TomlValue::Kind::StringList;
    if (v.kind == TomlValue::Kind::IntList) {
      if (e.kind != TomlValue::Kind::Int) fail(line, "mixed array element types");
      v.ints.push_back(e.i);
    } else {
      if (e.kind != TomlValue::Kind::String) fail(line, "mixed array element types");
      v.strings.push_back(e.s);
    }
  }
  return v;
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k)
    if (!std::isalnum((unsigned char)c) && c != '_' && c != '-') return false;
  return true;
}

} // namespace

TomlDoc toml_parse(const std::string& text) {
  TomlDoc doc;
  TomlTable* current = &doc.root;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = strip(strip_comment(raw));
    if (s.empty()) continue;
    if (s.rfind("[[", 0) == 0) {
      if (s.size() < 5 || s.substr(s.size() - 2) != "]]")
        fail(line, "malformed table-array header");
      std::string name = strip(s.substr(2, s.size() - 4));
      if (!valid_key(name)) fail(line, "bad table-array name '" + name + "'");
      doc.arrays[name].emplace_back();
      current = &doc.arrays[name].back();
      continue;
    }
    if (s.front() == '[') fail(line, "plain [table] headers are not supported");
    std::size_t eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected key = value");
    std::string key = strip(s.substr(0, eq));
    if (!valid_key(key)) fail(line, "bad key '" + key + "'");
    if (current->count(key)) fail(line, "duplicate key '" + key + "'");
    (*current)[key] = parse_value(s.substr(eq + 1), line);
  }
  return doc;
}

TomlDoc toml_parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("toml: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return toml_parse(buf.str());
}

} // namespace gkm
