#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace rodom {

// Flat `key = value` text file. '#' starts a comment, keys may repeat
// (repeated keys accumulate, e.g. `landmark = ...` lines in scene files).
class KvFile {
 public:
  KvFile() = default;

  static KvFile parse_file(const std::filesystem::path& path);
  static KvFile parse_string(const std::string& text);

  bool has(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key, long fallback) const;

  /// All values recorded for a repeated key, in file order.
  std::vector<std::string> get_all(const std::string& key) const;

  void set(const std::string& key, const std::string& value);

  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace rodom
