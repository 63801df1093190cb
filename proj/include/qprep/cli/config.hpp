#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qprep/core/error.hpp"

namespace qprep::cli {

/// Configuration problems; the message carries "source:line: [section] key: why".
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Parsed key = value text with [section] headers. '#' and ';' start comments
/// at the beginning of a line; keys are unique within a section.
class IniDocument {
 public:
  struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
  };

  static IniDocument parse(const std::string& text, const std::string& source = "<config>");
  static IniDocument load(const std::string& path);

  const std::string& source() const { return source_; }
  bool has(const std::string& section, const std::string& key) const;

  /// Marks the entry as consumed.
  std::optional<std::string> take(const std::string& section, const std::string& key);
  int line_of(const std::string& section, const std::string& key) const;

  /// Throws on the first entry nobody consumed.
  void reject_unused() const;

  [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& why) const;

 private:
  std::string source_;
  std::map<std::string, std::map<std::string, Entry>> sections_;
  std::map<std::string, int> section_lines_;
};

/// Typed readers that leave `out` unchanged when the key is absent.
void read(IniDocument& doc, const std::string& section, const std::string& key, std::string& out);
void read(IniDocument& doc, const std::string& section, const std::string& key, double& out);
void read(IniDocument& doc, const std::string& section, const std::string& key, int& out);
void read(IniDocument& doc, const std::string& section, const std::string& key, std::int64_t& out);
void read(IniDocument& doc, const std::string& section, const std::string& key, std::uint64_t& out);
void read(IniDocument& doc, const std::string& section, const std::string& key, bool& out);
void read(IniDocument& doc, const std::string& section, const std::string& key, std::vector<std::string>& out);
void read(IniDocument& doc, const std::string& section, const std::string& key, std::vector<int>& out);
void read(IniDocument& doc, const std::string& section, const std::string& key, std::vector<double>& out);
void read(IniDocument& doc, const std::string& section, const std::string& key, std::vector<std::uint64_t>& out);

/// Round-trip formatting: shortest text that parses back to the same double.
std::string format_double(double v);

std::vector<std::string> split_list(const std::string& s);

}  // namespace qprep::cli
