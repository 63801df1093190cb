#include "qprep/cli/csv.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "qprep/cli/config.hpp"
#include "qprep/core/error.hpp"

namespace qprep::cli {

namespace {

std::string header_line(const std::string& schema, int version, const std::string& hash) {
  return "# qprep-csv schema=" + schema + " version=" + std::to_string(version) + " config_hash=" + hash + "\n";
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string num(double v) { return format_double(v); }

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw InvalidArgument(source + ": missing column '" + name + "' in schema " + schema);
}

const std::string& CsvTable::text(std::size_t row, const std::string& name) const { return rows.at(row).at(column(name)); }

double CsvTable::number(std::size_t row, const std::string& name) const {
  const std::string& s = text(row, name);
  if (s == "nan") return std::nan("");
  std::size_t idx = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &idx);
  } catch (const std::exception&) {
    idx = 0;
  }
  if (idx != s.size() || s.empty()) {
    throw InvalidArgument(source + ": row " + std::to_string(row + 1) + ", column '" + name + "': '" + s +
                          "' is not a number");
  }
  return v;
}

CsvTable parse_csv(const std::string& text, const std::string& expected_schema, int expected_version,
                   const std::string& source) {
  CsvTable t;
  t.source = source;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# qprep-csv ", 0) != 0) {
    throw InvalidArgument(source + ": not a qprep CSV artifact (missing '# qprep-csv' schema line)");
  }
  std::istringstream meta(line.substr(12));
  std::string kv;
  while (meta >> kv) {
    const auto eq = kv.find('=');
    if (eq != std::string::npos) t.meta[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  t.schema = t.meta["schema"];
  try {
    t.version = std::stoi(t.meta["version"]);
  } catch (const std::exception&) {
    throw InvalidArgument(source + ": schema line has no valid version");
  }
  if (t.schema != expected_schema) {
    throw InvalidArgument(source + ": schema '" + t.schema + "', expected '" + expected_schema + "'");
  }
  if (t.version != expected_version) {
    throw InvalidArgument(source + ": schema " + t.schema + " version " + std::to_string(t.version) +
                          ", this build reads version " + std::to_string(expected_version));
  }
  if (!std::getline(in, line)) throw InvalidArgument(source + ": missing header row");
  t.columns = split_row(line);
  int n = 2;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    auto cells = split_row(line);
    if (cells.size() != t.columns.size()) {
      throw InvalidArgument(source + ":" + std::to_string(n) + ": expected " + std::to_string(t.columns.size()) +
                            " cells, got " + std::to_string(cells.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  return t;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument(path.string() + ": cannot open");
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

CsvTable read_csv(const std::filesystem::path& path, const std::string& expected_schema, int expected_version) {
  return parse_csv(read_text_file(path), expected_schema, expected_version, path.string());
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(tmp.string() + ": cannot open for writing");
    f << text;
    if (!f.flush()) throw Error(tmp.string() + ": write failed");
  }
  std::filesystem::rename(tmp, path);
}

std::string curves_header(const std::vector<std::string>& observables, const std::string& hash) {
  std::string s = header_line("curves", kCurvesVersion, hash) + "update,episodes,env_steps,epsilon,loss,eval_total_reward";
  for (const auto& o : observables) s += ",deviation_" + o;
  return s + "\n";
}

std::string curves_row(const rl::CurveRow& r) {
  std::string s = std::to_string(r.update) + "," + std::to_string(r.episodes) + "," + std::to_string(r.env_steps) +
                  "," + num(r.epsilon) + "," + num(r.loss) + "," + num(r.eval_total_reward);
  for (double d : r.eval_deviation) s += "," + num(d);
  return s + "\n";
}

std::string curves_csv(const std::vector<rl::CurveRow>& rows, const std::vector<std::string>& observables,
                       const std::string& hash) {
  std::string s = curves_header(observables, hash);
  for (const auto& r : rows) s += curves_row(r);
  return s;
}

std::string distance_csv(const std::vector<eval::DistanceRow>& rows, const std::string& hash) {
  std::string s = header_line("distance", kDistanceVersion, hash) + "L,LA,seed,dbar,sigma\n";
  for (const auto& r : rows) {
    s += std::to_string(r.n_sites) + "," + std::to_string(r.la) + "," + r.seed + "," + num(r.dbar) + "," +
         num(r.sigma) + "\n";
  }
  return s;
}

std::vector<eval::DistanceRow> parse_distance_rows(const CsvTable& t) {
  std::vector<eval::DistanceRow> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    eval::DistanceRow r;
    r.n_sites = static_cast<int>(t.number(i, "L"));
    r.la = static_cast<int>(t.number(i, "LA"));
    r.seed = t.text(i, "seed");
    r.dbar = t.number(i, "dbar");
    r.sigma = t.number(i, "sigma");
    out.push_back(r);
  }
  return out;
}

std::string distance_series_csv(const std::vector<eval::DistanceSeries>& series, const std::string& hash) {
  std::string s = header_line("distance-series", kDistanceSeriesVersion, hash) + "L,LA,seed,t,distance\n";
  for (const auto& x : series) {
    for (std::size_t i = 0; i < x.values.size(); ++i) {
      s += std::to_string(x.n_sites) + "," + std::to_string(x.la) + "," + std::to_string(x.seed) + "," +
           num(x.times[i]) + "," + num(x.values[i]) + "\n";
    }
  }
  return s;
}

std::string fit_csv(const std::vector<FitRow>& rows, const std::string& hash) {
  std::string s = header_line("fit", kFitVersion, hash) + "LA,x,points,a,a_err,b,b_err,residual\n";
  for (const auto& r : rows) {
    s += std::to_string(r.la) + "," + r.x + "," + std::to_string(r.fit.xs.size()) + "," + num(r.fit.a) + "," +
         num(r.fit.a_err) + "," + num(r.fit.b) + "," + num(r.fit.b_err) + "," + num(r.fit.residual) + "\n";
  }
  return s;
}

std::string fit_points_csv(const std::vector<FitPoint>& points, const std::string& hash) {
  std::string s = header_line("fit-points", kFitPointsVersion, hash) + "LA,x,L,abscissa,dbar,sigma,included\n";
  for (const auto& p : points) {
    s += std::to_string(p.la) + "," + p.x + "," + std::to_string(p.n_sites) + "," + num(p.abscissa) + "," +
         num(p.dbar) + "," + num(p.sigma) + "," + (p.included ? "1" : "0") + "\n";
  }
  return s;
}

std::string sweep_csv(const std::vector<SweepBlock>& blocks, const std::string& hash) {
  std::string s = header_line("sweep", kSweepVersion, hash) + "width,L,LA,d,included,b,b_err\n";
  for (const auto& blk : blocks) {
    for (const auto& r : blk.rows) {
      s += num(r.width) + "," + std::to_string(r.n_sites) + "," + std::to_string(blk.la) + "," + std::to_string(r.d) +
           "," + (r.included ? "1" : "0") + "," + num(r.b) + "," + num(r.b_err) + "\n";
    }
  }
  return s;
}

std::string tgge_csv(const std::vector<TggeTableRow>& rows, const std::string& hash) {
  std::string s = header_line("tgge", kTggeVersion, hash) + "L,n_local,LA,distance\n";
  for (const auto& r : rows) {
    s += std::to_string(r.n_sites) + "," + std::to_string(r.n_local) + "," + std::to_string(r.row.la) + "," +
         num(r.row.distance) + "\n";
  }
  return s;
}

std::string trajectory_csv(const eval::TrajectoryReport& r, const std::string& hash) {
  std::string s = header_line("trajectory", kTrajectoryVersion, hash) + "t,action";
  for (const auto& o : r.observables) s += "," + o + "," + o + "_target," + o + "_abs_error," + o + "_relevant_gibbs";
  s += "\n";
  for (Eigen::Index i = 0; i < r.values.rows(); ++i) {
    s += num(r.times[static_cast<std::size_t>(i)]) + "," + std::to_string(r.actions[static_cast<std::size_t>(i)]);
    for (Eigen::Index k = 0; k < r.values.cols(); ++k) {
      const double v = r.values(i, k);
      s += "," + num(v) + "," + num(r.target[k]) + "," + num(std::abs(v - r.target[k])) + "," + num(r.relevant_gibbs[k]);
    }
    s += "\n";
  }
  return s;
}

std::string protocol_text(const std::vector<int>& actions, const std::vector<std::string>& names,
                          const std::string& hash) {
  std::string s = "# qprep-protocol version=" + std::to_string(kProtocolVersion) + " config_hash=" + hash +
                  " steps=" + std::to_string(actions.size()) + "\n# actions:";
  for (std::size_t i = 0; i < names.size(); ++i) s += " " + std::to_string(i) + "=" + names[i];
  s += "\n";
  for (int a : actions) s += std::to_string(a) + "\n";
  return s;
}

std::vector<int> parse_protocol(const std::string& text, const std::string& source, std::string* hash) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# qprep-protocol ", 0) != 0) {
    throw InvalidArgument(source + ": not a qprep protocol file");
  }
  const auto h = line.find("config_hash=");
  if (hash && h != std::string::npos) *hash = line.substr(h + 12, 16);
  std::vector<int> out;
  int n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty() || line[0] == '#') continue;
    try {
      std::size_t idx = 0;
      out.push_back(std::stoi(line, &idx));
      if (idx != line.size()) throw std::invalid_argument(line);
    } catch (const std::exception&) {
      throw InvalidArgument(source + ":" + std::to_string(n) + ": '" + line + "' is not an action index");
    }
  }
  return out;
}

}  // namespace qprep::cli
