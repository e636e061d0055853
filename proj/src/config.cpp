#include "rodom/config.hpp"

#include <fstream>
#include <sstream>

#include "rodom/errors.hpp"

namespace rodom {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

KvFile KvFile::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

KvFile KvFile::parse_string(const std::string& text) {
  KvFile out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    out.entries_.emplace_back(key, value);
  }
  return out;
}

bool KvFile::has(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return true;
  return false;
}

std::string KvFile::get_string(const std::string& key,
                              const std::string& fallback) const {
  const std::string* last = nullptr;
  for (const auto& [k, v] : entries_)
    if (k == key) last = &v;
  return last ? *last : fallback;
}

double KvFile::get_double(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  const std::string s = get_string(key, "");
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not a number: " + s);
  }
}

long KvFile::get_int(const std::string& key, long fallback) const {
  if (!has(key)) return fallback;
  const std::string s = get_string(key, "");
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not an integer: " + s);
  }
}

std::vector<std::string> KvFile::get_all(const std::string& key) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_)
    if (k == key) out.push_back(v);
  return out;
}

void KvFile::set(const std::string& key, const std::string& value) {
  entries_.emplace_back(key, value);
}

}  // namespace rodom
