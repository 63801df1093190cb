#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "qprep/eval/distance.hpp"
#include "qprep/eval/report.hpp"
#include "qprep/eval/scaling.hpp"
#include "qprep/rl/trainer.hpp"

namespace qprep::cli {

// Every CSV artifact starts with a comment line
//   # qprep-csv schema=<name> version=<n> key=value ...
// followed by a header row. Numbers use the shortest round-trip form; missing
// values are "nan".

inline constexpr int kCurvesVersion = 1;
inline constexpr int kDistanceVersion = 1;
inline constexpr int kDistanceSeriesVersion = 1;
inline constexpr int kFitVersion = 1;
inline constexpr int kFitPointsVersion = 1;
inline constexpr int kSweepVersion = 1;
inline constexpr int kTggeVersion = 1;
inline constexpr int kTrajectoryVersion = 1;
inline constexpr int kProtocolVersion = 1;

struct CsvTable {
  std::string schema;
  int version = 0;
  std::map<std::string, std::string> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  /// Column index; throws naming the file when absent.
  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
  const std::string& text(std::size_t row, const std::string& name) const;

  std::string source;
};

/// Parses and checks the schema name and version.
CsvTable parse_csv(const std::string& text, const std::string& expected_schema, int expected_version,
                   const std::string& source = "<csv>");
CsvTable read_csv(const std::filesystem::path& path, const std::string& expected_schema, int expected_version);

/// Writes through a temporary file and renames it into place.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

std::string curves_csv(const std::vector<rl::CurveRow>& rows, const std::vector<std::string>& observables,
                       const std::string& hash);
std::string curves_header(const std::vector<std::string>& observables, const std::string& hash);
std::string curves_row(const rl::CurveRow& row);

std::string distance_csv(const std::vector<eval::DistanceRow>& rows, const std::string& hash);
std::vector<eval::DistanceRow> parse_distance_rows(const CsvTable& t);

std::string distance_series_csv(const std::vector<eval::DistanceSeries>& series, const std::string& hash);

struct FitRow {
  int la = 0;
  std::string x;
  eval::ScalingFit fit;
};
std::string fit_csv(const std::vector<FitRow>& rows, const std::string& hash);

struct FitPoint {
  int la = 0;
  std::string x;
  int n_sites = 0;
  double abscissa = 0.0;
  double dbar = 0.0;
  double sigma = 0.0;
  /// False for d <= 1 or a repeated abscissa, as in the shell sweep.
  bool included = true;
};
std::string fit_points_csv(const std::vector<FitPoint>& points, const std::string& hash);

struct SweepBlock {
  int la = 0;
  std::vector<eval::ShellSweepRow> rows;
};
std::string sweep_csv(const std::vector<SweepBlock>& blocks, const std::string& hash);

struct TggeTableRow {
  int n_sites = 0;
  int n_local = 0;
  eval::TggeRow row;
};
std::string tgge_csv(const std::vector<TggeTableRow>& rows, const std::string& hash);

std::string trajectory_csv(const eval::TrajectoryReport& r, const std::string& hash);

/// protocol.txt: a comment line, the action names, then one index per line.
std::string protocol_text(const std::vector<int>& actions, const std::vector<std::string>& names,
                          const std::string& hash);
std::vector<int> parse_protocol(const std::string& text, const std::string& source, std::string* hash = nullptr);

}  // namespace qprep::cli
