#include "twac/config.hpp"

#include <cstdio>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "twac/errors.hpp"

namespace twac {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

Config Config::parse(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  long lineno = 0;
  std::size_t offset = 0;
  Section* cur = nullptr;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t line_start = offset;
    offset += line.size() + 1;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[') {
      if (t.back() != ']' || t.size() < 3)
        throw ParseError("malformed section header: " + t, line_start, lineno);
      cfg.sections_.push_back({trim(t.substr(1, t.size() - 2)), {}});
      cur = &cfg.sections_.back();
      continue;
    }
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected 'key = value': " + t, line_start, lineno);
    if (!cur) throw ParseError("entry before any [section]: " + t, line_start, lineno);
    cur->kv.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

std::string Config::serialize() const {
  std::ostringstream out;
  for (const auto& s : sections_) {
    out << '[' << s.name << "]\n";
    for (const auto& [k, v] : s.kv) out << k << " = " << v << '\n';
    out << '\n';
  }
  return out.str();
}

void Config::save(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot write config file: " + path);
  f << serialize();
}

Config::Section* Config::find(const std::string& name) {
  for (auto& s : sections_)
    if (s.name == name) return &s;
  return nullptr;
}

const Config::Section* Config::find(const std::string& name) const {
  for (const auto& s : sections_)
    if (s.name == name) return &s;
  return nullptr;
}

bool Config::has(const std::string& section, const std::string& key) const {
  const Section* s = find(section);
  if (!s) return false;
  for (const auto& [k, v] : s->kv)
    if (k == key) return true;
  return false;
}

const std::string& Config::get(const std::string& section, const std::string& key) const {
  const Section* s = find(section);
  if (s)
    for (const auto& [k, v] : s->kv)
      if (k == key) return v;
  throw ValidationError("missing config entry [" + section + "] " + key);
}

std::string Config::get_or(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
  return has(section, key) ? get(section, key) : fallback;
}

double Config::get_double(const std::string& section, const std::string& key) const {
  const std::string& v = get(section, key);
  std::size_t pos = 0;
  double d = std::stod(v, &pos);
  if (pos == 0) throw ValidationError("not a number: [" + section + "] " + key + " = " + v);
  return d;
}

double Config::get_double_or(const std::string& section, const std::string& key,
                             double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

long Config::get_int(const std::string& section, const std::string& key) const {
  return std::stol(get(section, key));
}

long Config::get_int_or(const std::string& section, const std::string& key, long fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

bool Config::get_bool_or(const std::string& section, const std::string& key, bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string& v = get(section, key);
  return v == "true" || v == "1" || v == "yes" || v == "on";
}

std::vector<double> Config::get_doubles(const std::string& section, const std::string& key) const {
  std::istringstream in(get(section, key));
  std::vector<double> out;
  double d;
  while (in >> d) out.push_back(d);
  return out;
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  Section* s = find(section);
  if (!s) {
    sections_.push_back({section, {}});
    s = &sections_.back();
  }
  for (auto& [k, v] : s->kv)
    if (k == key) {
      v = value;
      return;
    }
  s->kv.emplace_back(key, value);
}

void Config::set_double(const std::string& section, const std::string& key, double value) {
  set(section, key, format_double(value));
}

void Config::set_int(const std::string& section, const std::string& key, long value) {
  set(section, key, std::to_string(value));
}

std::vector<std::string> Config::sections() const {
  std::vector<std::string> out;
  out.reserve(sections_.size());
  for (const auto& s : sections_) out.push_back(s.name);
  return out;
}

std::vector<std::pair<std::string, std::string>> Config::entries(const std::string& section) const {
  const Section* s = find(section);
  return s ? s->kv : std::vector<std::pair<std::string, std::string>>{};
}

}  // namespace twac
