#pragma once

#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <string>

#include "json.hpp"

#include "biaslang/error.hpp"

namespace biaslang {

using json = nlohmann::json;

// Calls `fn(object, line_number)` for every non-blank line. Parse failures
// and exceptions thrown by `fn` for a bad record surface as FormatError
// carrying the line number.
inline void for_each_jsonl(std::istream& in, const std::function<void(const json&, std::size_t)>& fn) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw FormatError(std::string("invalid JSON: ") + e.what(), lineno);
    }
    try {
      fn(j, lineno);
    } catch (const json::exception& e) {
      throw FormatError(std::string("bad record: ") + e.what(), lineno);
    }
  }
}

inline void for_each_jsonl(const std::string& path, const std::function<void(const json&, std::size_t)>& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  for_each_jsonl(in, fn);
}

// Ids arrive as JSON strings or integers; both are kept as text.
inline std::string id_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw ValidationError("id must be a string or integer, got " + v.dump());
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  return out;
}

}  // namespace biaslang
