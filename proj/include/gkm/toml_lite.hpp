#pragma once

#include <map>
#include <string>
#include <vector>

namespace gkm {

/// Minimal TOML subset for the golden-table fixtures: comments, bare root
/// key/values, [[array-of-tables]] headers, and values that are strings,
/// integers, booleans, or homogeneous arrays of integers/strings.
struct TomlValue {
  enum class Kind { String, Int, Bool, IntList, StringList };
  Kind kind = Kind::String;
  std::string s;
  long long i = 0;
  bool b = false;
  std::vector<long long> ints;
  std::vector<std::string> strings;
};

using TomlTable = std::map<std::string, TomlValue>;

struct TomlDoc {
  TomlTable root;
  std::map<std::string, std::vector<TomlTable>> arrays; // [[name]] entries in order
};

/// Throws std::runtime_error with a line number on malformed input.
TomlDoc toml_parse(const std::string& text);
TomlDoc toml_parse_file(const std::string& path);

} // namespace gkm
