#include "qprep/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <type_traits>
#include <fstream>
#include <limits>
#include <sstream>

namespace qprep::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

IniDocument IniDocument::parse(const std::string& text, const std::string& source) {
  IniDocument doc;
  doc.source_ = source;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  auto error = [&](const std::string& why) { throw ConfigError(source + ":" + std::to_string(line) + ": " + why); };
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') error("unterminated section header '" + s + "'");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) error("empty section name");
      if (doc.section_lines_.count(section)) error("section [" + section + "] appears twice");
      doc.section_lines_[section] = line;
      doc.sections_[section];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) error("expected 'key = value', got '" + s + "'");
    if (section.empty()) error("key outside of any [section]");
    const std::string key = trim(s.substr(0, eq));
    if (key.empty()) error("empty key");
    auto& sec = doc.sections_[section];
    if (sec.count(key)) {
      error("[" + section + "] " + key + ": duplicate key (first set on line " + std::to_string(sec[key].line) + ")");
    }
    sec[key] = Entry{trim(s.substr(eq + 1)), line, false};
  }
  return doc;
}

IniDocument IniDocument::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(path + ": cannot open configuration file");
  std::ostringstream os;
  os << f.rdbuf();
  return parse(os.str(), path);
}

bool IniDocument::has(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key);
}

std::optional<std::string> IniDocument::take(const std::string& section, const std::string& key) {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return std::nullopt;
  const auto e = s->second.find(key);
  if (e == s->second.end()) return std::nullopt;
  e->second.used = true;
  return e->second.value;
}

int IniDocument::line_of(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return 0;
  const auto e = s->second.find(key);
  return e == s->second.end() ? section_lines_.at(section) : e->second.line;
}

void IniDocument::reject_unused() const {
  for (const auto& [name, entries] : sections_) {
    for (const auto& [key, e] : entries) {
      if (!e.used) {
        throw ConfigError(source_ + ":" + std::to_string(e.line) + ": [" + name + "] " + key + ": unknown key");
      }
    }
  }
}

void IniDocument::fail(const std::string& section, const std::string& key, const std::string& why) const {
  const int line = line_of(section, key);
  const std::string where = line > 0 ? source_ + ":" + std::to_string(line) : source_;
  throw ConfigError(where + ": [" + section + "] " + key + ": " + why);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

namespace {

template <typename T>
bool parse_number(const std::string& s, T& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto r = std::from_chars(first, last, out);
  return r.ec == std::errc() && r.ptr == last;
}

bool parse_double(const std::string& s, double& out) {
  if (s == "nan") {
    out = std::numeric_limits<double>::quiet_NaN();
    return true;
  }
  if (s == "inf") {
    out = std::numeric_limits<double>::infinity();
    return true;
  }
  // from_chars for double is unavailable in older libstdc++
  std::size_t idx = 0;
  try {
    out = std::stod(s, &idx);
  } catch (const std::exception&) {
    return false;
  }
  return idx == s.size();
}

template <typename T>
void read_scalar(IniDocument& doc, const std::string& section, const std::string& key, T& out, const char* what) {
  const auto v = doc.take(section, key);
  if (!v) return;
  T parsed{};
  if (!parse_number(*v, parsed)) doc.fail(section, key, std::string("expected ") + what + ", got '" + *v + "'");
  out = parsed;
}

template <typename T>
void read_numbers(IniDocument& doc, const std::string& section, const std::string& key, std::vector<T>& out,
                  const char* what) {
  const auto v = doc.take(section, key);
  if (!v) return;
  std::vector<T> parsed;
  for (const auto& item : split_list(*v)) {
    T x{};
    bool ok;
    if constexpr (std::is_same_v<T, double>) {
      ok = parse_double(item, x);
    } else {
      ok = parse_number(item, x);
    }
    if (!ok) doc.fail(section, key, std::string("expected a comma-separated list of ") + what + ", got '" + item + "'");
    parsed.push_back(x);
  }
  out = std::move(parsed);
}

}  // namespace

void read(IniDocument& doc, const std::string& section, const std::string& key, std::string& out) {
  if (const auto v = doc.take(section, key)) out = *v;
}

void read(IniDocument& doc, const std::string& section, const std::string& key, double& out) {
  const auto v = doc.take(section, key);
  if (!v) return;
  double x = 0.0;
  if (!parse_double(*v, x)) doc.fail(section, key, "expected a number, got '" + *v + "'");
  out = x;
}

void read(IniDocument& doc, const std::string& section, const std::string& key, int& out) {
  read_scalar(doc, section, key, out, "an integer");
}

void read(IniDocument& doc, const std::string& section, const std::string& key, std::int64_t& out) {
  read_scalar(doc, section, key, out, "an integer");
}

void read(IniDocument& doc, const std::string& section, const std::string& key, std::uint64_t& out) {
  read_scalar(doc, section, key, out, "a non-negative integer");
}

void read(IniDocument& doc, const std::string& section, const std::string& key, bool& out) {
  const auto v = doc.take(section, key);
  if (!v) return;
  if (*v == "true" || *v == "1" || *v == "yes") {
    out = true;
  } else if (*v == "false" || *v == "0" || *v == "no") {
    out = false;
  } else {
    doc.fail(section, key, "expected true or false, got '" + *v + "'");
  }
}

void read(IniDocument& doc, const std::string& section, const std::string& key, std::vector<std::string>& out) {
  if (const auto v = doc.take(section, key)) out = split_list(*v);
}

void read(IniDocument& doc, const std::string& section, const std::string& key, std::vector<int>& out) {
  read_numbers(doc, section, key, out, "integers");
}

void read(IniDocument& doc, const std::string& section, const std::string& key, std::vector<double>& out) {
  read_numbers(doc, section, key, out, "numbers");
}

void read(IniDocument& doc, const std::string& section, const std::string& key, std::vector<std::uint64_t>& out) {
  read_numbers(doc, section, key, out, "non-negative integers");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace qprep::cli
