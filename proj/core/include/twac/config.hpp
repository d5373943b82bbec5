#pragma once

#include <map>
#include <string>
#include <vector>

namespace twac {

/// Flat structured-text config:  `[section]` headers, `key = value` entries,
/// `#` comments. Values keep full decimal precision; key order is preserved
/// for byte-stable round trips.
class Config {
 public:
  Config() = default;

  /// Parse from text. Throws ParseError with the offending line number.
  static Config parse(const std::string& text);
  static Config load(const std::string& path);

  std::string serialize() const;
  void save(const std::string& path) const;

  bool has(const std::string& section, const std::string& key) const;
  /// Raw string access; throws ValidationError when missing.
  const std::string& get(const std::string& section, const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;

  double get_double(const std::string& section, const std::string& key) const;
  double get_double_or(const std::string& section, const std::string& key, double fallback) const;
  long get_int(const std::string& section, const std::string& key) const;
  long get_int_or(const std::string& section, const std::string& key, long fallback) const;
  bool get_bool_or(const std::string& section, const std::string& key, bool fallback) const;
  /// Whitespace-separated list of doubles.
  std::vector<double> get_doubles(const std::string& section, const std::string& key) const;

  void set(const std::string& section, const std::string& key, const std::string& value);
  void set_double(const std::string& section, const std::string& key, double value);
  void set_int(const std::string& section, const std::string& key, long value);

  std::vector<std::string> sections() const;
  std::vector<std::pair<std::string, std::string>> entries(const std::string& section) const;

 private:
  struct Section {
    std::string name;
    std::vector<std::pair<std::string, std::string>> kv;
  };
  std::vector<Section> sections_;
  Section* find(const std::string& name);
  const Section* find(const std::string& name) const;
};

/// Full-precision decimal formatting ("%.17g"); round-trips doubles exactly.
std::string format_double(double v);

/// FNV-1a 64-bit hash, used for config/manifest fingerprints.
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace twac
