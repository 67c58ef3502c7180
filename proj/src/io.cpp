#include "spinwigner/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace spinwigner::io {

namespace {

using nlohmann::json;

std::string render_metadata(const Metadata& meta) {
  std::string out;
  for (const auto& [key, value] : meta) {
    out += "# " + key + "=" + value + "\n";
  }
  return out;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << content;
    if (!f.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

double parse_double(const std::string& token, const std::filesystem::path& path, std::size_t row) {
  double v = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end) {
    throw std::runtime_error(path.string() + ": row " + std::to_string(row) + ": bad number '" + token + "'");
  }
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string token;
  std::stringstream ss(line);
  while (std::getline(ss, token, ',')) out.push_back(token);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

struct CsvTable {
  Metadata meta;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> row_numbers;  // 1-based line numbers for messages
};

CsvTable read_csv(const std::filesystem::path& path, std::size_t expected_columns) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(f, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos) {
        std::string key = line.substr(1, eq - 1);
        key.erase(0, key.find_first_not_of(' '));
        key.erase(key.find_last_not_of(' ') + 1);
        table.meta[key] = line.substr(eq + 1);
      }
      continue;
    }
    if (!have_header) {
      table.header = split_csv(line);
      have_header = true;
      continue;
    }
    const auto tokens = split_csv(line);
    if (expected_columns != 0 && tokens.size() != expected_columns) {
      throw std::runtime_error(path.string() + ": row " + std::to_string(line_no) + ": expected " +
                               std::to_string(expected_columns) + " columns, got " +
                               std::to_string(tokens.size()));
    }
    std::vector<double> row;
    row.reserve(tokens.size());
    for (const auto& t : tokens) row.push_back(parse_double(t, path, line_no));
    table.rows.push_back(std::move(row));
    table.row_numbers.push_back(line_no);
  }
  if (!have_header) throw std::runtime_error(path.string() + ": missing header row");
  return table;
}

// Rebuild the (theta, phi) node lists of a row-major grid dump.
SphereGrid grid_from_rows(const std::vector<std::vector<double>>& rows,
                          const std::filesystem::path& path) {
  if (rows.empty()) throw std::runtime_error(path.string() + ": no data rows");
  std::vector<double> phi;
  for (const auto& row : rows) {
    if (!phi.empty() && row[1] == phi.front()) break;
    phi.push_back(row[1]);
  }
  if (rows.size() % phi.size() != 0) {
    throw std::runtime_error(path.string() + ": row count " + std::to_string(rows.size()) +
                             " is not a multiple of the phi count " + std::to_string(phi.size()));
  }
  std::vector<double> theta;
  for (std::size_t i = 0; i < rows.size(); i += phi.size()) theta.push_back(rows[i][0]);
  const SphereGrid grid = SphereGrid::make(std::move(theta), std::move(phi));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double t = grid.theta[i / grid.phi.size()];
    const double p = grid.phi[i % grid.phi.size()];
    if (rows[i][0] != t || rows[i][1] != p) {
      throw std::runtime_error(path.string() + ": rows are not in row-major grid order near data row " +
                               std::to_string(i + 1));
    }
  }
  return grid;
}

long long meta_ll(const Metadata& meta, const std::string& key, long long fallback) {
  const auto it = meta.find(key);
  return it == meta.end() ? fallback : std::stoll(it->second);
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_wigner_csv(const std::filesystem::path& path, const WignerMap& map, const Metadata& extra) {
  Metadata meta = extra;
  meta["j_twice"] = std::to_string(map.j.twice());
  meta["shots"] = std::to_string(map.shots);
  std::string out = render_metadata(meta);
  out += "theta_rad,phi_rad,w\n";
  for (std::size_t it = 0; it < map.grid.theta.size(); ++it) {
    for (std::size_t ip = 0; ip < map.grid.phi.size(); ++ip) {
      out += format_double(map.grid.theta[it]) + "," + format_double(map.grid.phi[ip]) + "," +
             format_double(map.values[map.grid.index(it, ip)]) + "\n";
    }
  }
  atomic_write(path, out);
}

WignerMap read_wigner_csv(const std::filesystem::path& path, Metadata* meta) {
  const CsvTable table = read_csv(path, 3);
  WignerMap map;
  map.grid = grid_from_rows(table.rows, path);
  map.values.reserve(table.rows.size());
  for (const auto& row : table.rows) map.values.push_back(row[2]);
  map.j = HalfInt::from_twice(static_cast<int>(meta_ll(table.meta, "j_twice", 1)));
  map.shots = meta_ll(table.meta, "shots", 0);
  if (meta) *meta = table.meta;
  return map;
}

void write_probability_csv(const std::filesystem::path& path, const ProbabilityGrid& pg,
                           const Metadata& extra) {
  Metadata meta = extra;
  meta["j_twice"] = std::to_string(pg.j.twice());
  meta["shots"] = std::to_string(pg.shots);
  meta["seed"] = std::to_string(pg.seed);
  meta["m_order"] = "j..-j";
  std::string out = render_metadata(meta);
  out += "theta_rad,phi_rad";
  for (int i = 0; i < pg.levels(); ++i) out += ",p" + std::to_string(i);
  out += "\n";
  for (std::size_t node = 0; node < pg.grid.point_count(); ++node) {
    out += format_double(pg.grid.theta[node / pg.grid.phi.size()]) + "," +
           format_double(pg.grid.phi[node % pg.grid.phi.size()]);
    for (double p : pg.at(node)) out += "," + format_double(p);
    out += "\n";
  }
  atomic_write(path, out);
}

ProbabilityGrid read_probability_csv(const std::filesystem::path& path, Metadata* meta) {
  const CsvTable table = read_csv(path, 0);
  if (table.rows.empty()) throw std::runtime_error(path.string() + ": no data rows");
  const std::size_t columns = table.header.size();
  if (columns < 3) throw std::runtime_error(path.string() + ": too few columns for a probability grid");
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (table.rows[i].size() != columns) {
      throw std::runtime_error(path.string() + ": row " + std::to_string(table.row_numbers[i]) +
                               ": expected " + std::to_string(columns) + " columns, got " +
                               std::to_string(table.rows[i].size()));
    }
  }
  const int levels = static_cast<int>(columns) - 2;
  const int j_twice = static_cast<int>(meta_ll(table.meta, "j_twice", levels - 1));
  if (j_twice + 1 != levels) {
    throw std::runtime_error(path.string() + ": j_twice=" + std::to_string(j_twice) + " implies " +
                             std::to_string(j_twice + 1) + " probability columns, found " +
                             std::to_string(levels));
  }
  ProbabilityGrid pg;
  pg.grid = grid_from_rows(table.rows, path);
  pg.j = HalfInt::from_twice(j_twice);
  pg.shots = meta_ll(table.meta, "shots", 0);
  pg.seed = static_cast<std::uint64_t>(meta_ll(table.meta, "seed", 0));
  pg.probs.reserve(table.rows.size() * levels);
  for (const auto& row : table.rows) {
    for (int c = 0; c < levels; ++c) pg.probs.push_back(row[2 + c]);
  }
  if (meta) *meta = table.meta;
  return pg;
}

void write_ramsey_csv(const std::filesystem::path& path, const RamseyData& data, const Metadata& extra) {
  Metadata meta = extra;
  meta["detuning_mhz"] = format_double(data.detuning_hint_mhz);
  meta["shots"] = std::to_string(data.shots);
  meta["seed"] = std::to_string(data.seed);
  std::string out = render_metadata(meta);
  out += "tau_us,signal\n";
  for (std::size_t i = 0; i < data.taus_us.size(); ++i) {
    out += format_double(data.taus_us[i]) + "," + format_double(data.signals[i]) + "\n";
  }
  atomic_write(path, out);
}

RamseyData read_ramsey_csv(const std::filesystem::path& path, Metadata* meta) {
  const CsvTable table = read_csv(path, 2);
  RamseyData data;
  for (const auto& row : table.rows) {
    data.taus_us.push_back(row[0]);
    data.signals.push_back(row[1]);
  }
  const auto it = table.meta.find("detuning_mhz");
  if (it != table.meta.end()) data.detuning_hint_mhz = std::stod(it->second);
  data.shots = meta_ll(table.meta, "shots", 0);
  data.seed = static_cast<std::uint64_t>(meta_ll(table.meta, "seed", 0));
  if (meta) *meta = table.meta;
  return data;
}

void write_fit_json(const std::filesystem::path& path, const FitResult& fit) {
  json params = json::object();
  json sigmas = json::object();
  for (std::size_t i = 0; i < fit.param_names.size(); ++i) {
    params[fit.param_names[i]] = fit.params[static_cast<Eigen::Index>(i)];
    sigmas[fit.param_names[i]] = fit.sigma(fit.param_names[i]);
  }
  const json doc = {{"params", params},
                    {"sigmas", sigmas},
                    {"residual_norm", fit.residual_norm},
                    {"converged", fit.converged},
                    {"iterations", fit.iterations}};
  atomic_write(path, doc.dump(2) + "\n");
}

void write_density_matrix_json(const std::filesystem::path& path, const DensityMatrix& rho) {
  json re = json::array();
  json im = json::array();
  for (int r = 0; r < rho.dim(); ++r) {
    json re_row = json::array();
    json im_row = json::array();
    for (int c = 0; c < rho.dim(); ++c) {
      re_row.push_back(rho(r, c).real());
      im_row.push_back(rho(r, c).imag());
    }
    re.push_back(re_row);
    im.push_back(im_row);
  }
  const json doc = {{"j_twice", rho.j().twice()}, {"re", re}, {"im", im}};
  atomic_write(path, doc.dump(2) + "\n");
}

DensityMatrix read_density_matrix_json(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  json doc;
  f >> doc;
  const int j_twice = doc.at("j_twice").get<int>();
  const int dim = j_twice + 1;
  Eigen::MatrixXcd m(dim, dim);
  const auto& re = doc.at("re");
  const auto& im = doc.at("im");
  if (static_cast<int>(re.size()) != dim || static_cast<int>(im.size()) != dim) {
    throw std::runtime_error(path.string() + ": matrix size does not match j_twice");
  }
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) {
      m(r, c) = std::complex<double>(re.at(r).at(c).get<double>(), im.at(r).at(c).get<double>());
    }
  }
  return DensityMatrix::create(HalfInt::from_twice(j_twice), std::move(m));
}

void write_analysis_json(const std::filesystem::path& path, const AnalysisResult& analysis) {
  json doc = {{"fidelity", analysis.fidelity},
              {"purity", analysis.purity},
              {"wmin",
               {{"value", analysis.wmin.value},
                {"theta_rad", analysis.wmin.theta},
                {"phi_rad", analysis.wmin.phi}}},
              {"J", {analysis.angular_momentum[0], analysis.angular_momentum[1],
                     analysis.angular_momentum[2]}},
              {"normalization_check", analysis.normalization_check}};
  if (analysis.tau_us) doc["tau_us"] = *analysis.tau_us;
  atomic_write(path, doc.dump(2) + "\n");
}

void write_series_csv(const std::filesystem::path& path, const std::vector<AnalysisResult>& series) {
  std::string out = "tau_us,fidelity,purity,wmin\n";
  for (const auto& a : series) {
    out += format_double(a.tau_us.value_or(0.0)) + "," + format_double(a.fidelity) + "," +
           format_double(a.purity) + "," + format_double(a.wmin.value) + "\n";
  }
  atomic_write(path, out);
}

}  // namespace spinwigner::io
