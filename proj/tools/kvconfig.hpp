#pragma once

#include <map>
#include <optional>
#include <string>

namespace cvi_cli {

// Plain-text configuration: one `key = value` per line, dotted section keys
// (e.g. hsv.lower), full-line comments starting with '#', blank lines
// ignored, later entries override earlier ones.
class KvConfig {
 public:
  KvConfig() = default;

  // Throws std::runtime_error with "<origin>:<line>: ..." on bad syntax.
  static KvConfig parse(const std::string& text, const std::string& origin);
  static KvConfig load(const std::string& path);

  std::optional<std::string> get(const std::string& key) const;
  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace cvi_cli
