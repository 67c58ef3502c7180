// spinwigner: spherical Wigner-function tomography of spin states.
//
// Subcommands: forward | simulate | reconstruct | analyze | ramsey | pipeline
// Exit codes: 0 success, 1 compute/data error, 2 usage error.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <numbers>
#include <optional>
#include <string>

#include "spinwigner/fitting.hpp"
#include "spinwigner/io.hpp"
#include "spinwigner/simulator.hpp"
#include "spinwigner/wigner.hpp"

namespace sw = spinwigner;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Flag-combination problems detected after CLI11 parsing; mapped to exit 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SharedFlags {
  int j_twice = 1;
  std::string state = "y";
  double t2star_us = 2.64;
  double tau_us = 0.0;
  std::string tau_series;
  long long shots = 0;
  std::uint64_t seed = 1;
  int theta_steps = 60;
  int phi_steps = 20;
  std::string grid_kind = "paper";  // paper | gauss
  std::string readout;              // "bright,dark"
  long long reference_shots = 1000000;
  std::string reference = "y";
  std::string in_path;
  std::vector<std::string> in_paths;
  std::string out_path;
  std::string format = "csv";
  int threads = 1;
};

void add_grid_flags(CLI::App* cmd, SharedFlags& f) {
  cmd->add_option("--theta-steps", f.theta_steps, "theta steps (paper grid) or nodes (gauss grid)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--phi-steps", f.phi_steps, "phi nodes")->check(CLI::PositiveNumber);
  cmd->add_option("--grid", f.grid_kind, "grid kind: paper (uniform trapezoid) or gauss")
      ->check(CLI::IsMember({"paper", "gauss"}));
}

void add_state_flags(CLI::App* cmd, SharedFlags& f, bool state_required = false) {
  auto* opt = cmd->add_option("--state", f.state, "initial state: y|x|z|mixed|custom:eps,eta");
  if (state_required) opt->required();
  cmd->add_option("--j", f.j_twice, "twice the spin length (1 = qubit)")->check(CLI::PositiveNumber);
}

struct GridSpec {
  sw::SphereGrid grid;
  bool gauss = false;

  sw::SphereQuadrature quadrature() const {
    if (gauss) {
      return sw::product_quadrature(static_cast<int>(grid.theta.size()),
                                    static_cast<int>(grid.phi.size()));
    }
    return sw::grid_quadrature(grid);
  }
};

GridSpec make_grid(const SharedFlags& f) {
  if (f.grid_kind == "gauss") {
    auto quad = sw::product_quadrature(f.theta_steps, f.phi_steps);
    return {std::move(quad.grid), true};
  }
  return {sw::SphereGrid::uniform(f.theta_steps, f.phi_steps), false};
}

GridSpec grid_from_meta(const sw::SphereGrid& grid, const sw::io::Metadata& meta) {
  const auto it = meta.find("grid");
  return {grid, it != meta.end() && it->second == "gauss"};
}

// Parses y|x|z|mixed|custom:eps,eta into a state for spin j.
sw::DensityMatrix make_state(const std::string& name, sw::HalfInt j) {
  const int dim = j.twice() + 1;
  double eps = 0.0, eta = 0.0;
  if (name == "mixed") {
    return sw::DensityMatrix::create(
        j, Eigen::MatrixXcd::Identity(dim, dim) / static_cast<double>(dim));
  } else if (name == "y") {
    eps = std::numbers::pi / 2.0;
    eta = std::numbers::pi / 2.0;
  } else if (name == "x") {
    eps = std::numbers::pi / 2.0;
  } else if (name == "z") {
    // poles already zero
  } else if (name.rfind("custom:", 0) == 0) {
    const std::string args = name.substr(7);
    const auto comma = args.find(',');
    if (comma == std::string::npos) throw UsageError("--state custom takes 'custom:eps,eta'");
    try {
      eps = std::stod(args.substr(0, comma));
      eta = std::stod(args.substr(comma + 1));
    } catch (const std::exception&) {
      throw UsageError("--state custom: cannot parse angles in '" + args + "'");
    }
  } else if (fs::exists(name)) {
    return sw::io::read_density_matrix_json(name);
  } else {
    throw UsageError("unknown state '" + name + "'");
  }
  return sw::spin_coherent(j, eps, eta);
}

std::optional<sw::ReadoutParams> make_readout(const SharedFlags& f) {
  if (f.readout.empty()) return std::nullopt;
  const auto comma = f.readout.find(',');
  if (comma == std::string::npos) throw UsageError("--readout takes 'bright,dark'");
  try {
    return sw::ReadoutParams::make(std::stod(f.readout.substr(0, comma)),
                                   std::stod(f.readout.substr(comma + 1)), f.reference_shots);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--readout: ") + e.what());
  }
}

std::vector<double> parse_tau_series(const std::string& series) {
  double start = 0.0, stop = 0.0, step = 0.0;
  const auto c1 = series.find(':');
  const auto c2 = series.find(':', c1 == std::string::npos ? 0 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos) {
    throw UsageError("--tau-series takes 'start:stop:step'");
  }
  try {
    start = std::stod(series.substr(0, c1));
    stop = std::stod(series.substr(c1 + 1, c2 - c1 - 1));
    step = std::stod(series.substr(c2 + 1));
  } catch (const std::exception&) {
    throw UsageError("--tau-series: cannot parse '" + series + "'");
  }
  if (!(step > 0.0) || stop < start || start < 0.0) {
    throw UsageError("--tau-series: need start >= 0, stop >= start, step > 0");
  }
  std::vector<double> taus;
  for (int i = 0;; ++i) {
    const double tau = start + i * step;
    if (tau > stop + 1e-12) break;
    taus.push_back(tau);
  }
  return taus;
}

sw::ExperimentSpec make_spec(const SharedFlags& f, const GridSpec& grid, double tau_us) {
  sw::ExperimentSpec spec;
  spec.j = sw::HalfInt::from_twice(f.j_twice);
  spec.initial_rho = make_state(f.state, spec.j);
  spec.tau_us = tau_us;
  spec.model = sw::DephasingModel::make(f.t2star_us);
  spec.grid = grid.grid;
  spec.shots = f.shots;
  spec.seed = f.seed;
  if (tau_us > 0.0 && f.j_twice != 1) {
    throw UsageError("dephasing (--tau-us > 0) requires --j 1 (a qubit)");
  }
  return spec;
}

sw::io::Metadata run_metadata(const SharedFlags& f, const GridSpec& grid, double tau_us) {
  sw::io::Metadata meta;
  meta["tau_us"] = sw::io::format_double(tau_us);
  meta["t2star_us"] = sw::io::format_double(f.t2star_us);
  meta["state"] = f.state;
  meta["grid"] = grid.gauss ? "gauss" : "uniform";
  return meta;
}

sw::io::AnalysisResult analyze_map(const sw::WignerMap& map, const GridSpec& grid,
                                   const std::string& reference,
                                   std::optional<double> tau_us) {
  const sw::SphereQuadrature quad = grid.quadrature();
  const sw::DensityMatrix ref = make_state(reference, map.j);
  const sw::WignerMap ref_map = sw::wigner_from_rho(ref, map.grid);

  sw::io::AnalysisResult out;
  out.fidelity = sw::wigner_fidelity_to_pure(map, ref_map, quad);
  out.purity = sw::wigner_purity(map, quad);
  out.wmin = sw::wigner_min(map);
  out.angular_momentum = sw::angular_momentum(map, quad);
  out.normalization_check = sw::integrate(std::span<const double>(map.values), quad);
  out.tau_us = tau_us;
  return out;
}

std::optional<double> tau_from_meta(const sw::io::Metadata& meta) {
  const auto it = meta.find("tau_us");
  if (it == meta.end()) return std::nullopt;
  return std::stod(it->second);
}

// ---------------------------------------------------------------------------
// Subcommand bodies
// ---------------------------------------------------------------------------

int cmd_forward(const SharedFlags& f) {
  const GridSpec grid = make_grid(f);
  const sw::HalfInt j = sw::HalfInt::from_twice(f.j_twice);
  sw::DensityMatrix rho = make_state(f.state, j);
  if (f.tau_us > 0.0) {
    if (f.j_twice != 1) throw UsageError("dephasing (--tau-us > 0) requires --j 1 (a qubit)");
    rho = sw::dephase_qubit(rho, f.tau_us, sw::DephasingModel::make(f.t2star_us));
  }
  const sw::WignerMap map = sw::wigner_from_rho(rho, grid.grid);
  const fs::path out = f.out_path.empty() ? "wigner_map.csv" : f.out_path;
  sw::io::write_wigner_csv(out, map, run_metadata(f, grid, f.tau_us));
  std::cout << "wrote " << out.string() << " (" << map.values.size() << " nodes)\n";
  return 0;
}

int cmd_simulate(const SharedFlags& f) {
  const GridSpec grid = make_grid(f);
  const sw::ExperimentSpec spec = make_spec(f, grid, f.tau_us);
  const auto readout = make_readout(f);
  const sw::ProbabilityGrid pg = sw::run_tomography(spec, readout, f.threads);
  const fs::path out = f.out_path.empty() ? "probabilities.csv" : f.out_path;
  sw::io::write_probability_csv(out, pg, run_metadata(f, grid, f.tau_us));
  std::cout << "wrote " << out.string() << " (" << pg.grid.point_count() << " nodes, shots="
            << pg.shots << ")\n";
  return 0;
}

int cmd_reconstruct(const SharedFlags& f) {
  if (f.in_path.empty()) throw UsageError("reconstruct requires --in PROBABILITY_CSV");
  sw::io::Metadata meta;
  const sw::ProbabilityGrid pg = sw::io::read_probability_csv(f.in_path, &meta);
  const sw::WignerMap map = sw::reconstruct(pg);
  sw::io::Metadata pass;
  for (const char* key : {"tau_us", "t2star_us", "state", "grid"}) {
    if (auto it = meta.find(key); it != meta.end()) pass[key] = it->second;
  }
  const fs::path out = f.out_path.empty() ? "wigner_map.csv" : f.out_path;
  sw::io::write_wigner_csv(out, map, pass);
  std::cout << "wrote " << out.string() << "\n";
  return 0;
}

int cmd_analyze(const SharedFlags& f) {
  std::vector<std::string> inputs = f.in_paths;
  if (!f.in_path.empty()) inputs.push_back(f.in_path);
  if (inputs.empty()) throw UsageError("analyze requires at least one --in WIGNER_CSV");

  std::vector<sw::io::AnalysisResult> series;
  for (const auto& input : inputs) {
    sw::io::Metadata meta;
    const sw::WignerMap map = sw::io::read_wigner_csv(input, &meta);
    const GridSpec grid = grid_from_meta(map.grid, meta);
    const sw::io::AnalysisResult result = analyze_map(map, grid, f.reference, tau_from_meta(meta));
    series.push_back(result);

    fs::path out;
    if (inputs.size() == 1 && !f.out_path.empty()) {
      out = f.out_path;
    } else {
      out = input + ".analysis.json";
    }
    sw::io::write_analysis_json(out, result);
    std::cout << "wrote " << out.string() << "\n";
  }
  if (inputs.size() > 1 && !f.out_path.empty()) {
    std::sort(series.begin(), series.end(), [](const auto& a, const auto& b) {
      return a.tau_us.value_or(0.0) < b.tau_us.value_or(0.0);
    });
    sw::io::write_series_csv(f.out_path, series);
    std::cout << "wrote " << f.out_path << "\n";
  }
  return 0;
}

struct RamseyFlags {
  double detuning_mhz = 0.5;
  double tau_max_us = 6.0;
  int points = 48;
  std::string curve_out;
  std::string data_out;
};

int cmd_ramsey(const SharedFlags& f, const RamseyFlags& rf) {
  sw::RamseyData data;
  if (!f.in_path.empty()) {
    data = sw::io::read_ramsey_csv(f.in_path);
  } else {
    if (rf.points < 8) throw UsageError("--points must be >= 8");
    std::vector<double> taus(rf.points);
    for (int i = 0; i < rf.points; ++i) taus[i] = rf.tau_max_us * i / (rf.points - 1);
    data = sw::ramsey_sequence(std::move(taus), rf.detuning_mhz,
                               sw::DephasingModel::make(f.t2star_us), f.shots, f.seed);
    if (!rf.data_out.empty()) {
      sw::io::write_ramsey_csv(rf.data_out, data, {{"t2star_us", sw::io::format_double(f.t2star_us)}});
      std::cout << "wrote " << rf.data_out << "\n";
    }
  }

  const sw::FitResult fit = sw::fit_ramsey(data);
  const fs::path out = f.out_path.empty() ? "ramsey_fit.json" : f.out_path;
  sw::io::write_fit_json(out, fit);
  std::cout << "wrote " << out.string() << " (T2* = " << fit.param("t2_star_us") << " +- "
            << fit.sigma("t2_star_us") << " us)\n";

  if (!rf.curve_out.empty()) {
    sw::RamseyData curve;
    const double tmax = data.taus_us.empty() ? 0.0 : data.taus_us.back();
    const int n = 512;
    for (int i = 0; i < n; ++i) {
      const double tau = tmax * i / (n - 1);
      const double ratio = tau / fit.param("t2_star_us");
      curve.taus_us.push_back(tau);
      curve.signals.push_back(fit.param("offset") +
                              fit.param("amplitude") * std::exp(-ratio * ratio) *
                                  std::cos(2.0 * std::numbers::pi * fit.param("f_mhz") * tau));
    }
    curve.detuning_hint_mhz = fit.param("f_mhz");
    sw::io::write_ramsey_csv(rf.curve_out, curve, {{"kind", "fitted_model"}});
    std::cout << "wrote " << rf.curve_out << "\n";
  }
  return 0;
}

int cmd_pipeline(const SharedFlags& f, const std::string& out_dir) {
  if (f.tau_series.empty()) throw UsageError("pipeline requires --tau-series start:stop:step");
  const std::vector<double> taus = parse_tau_series(f.tau_series);
  const GridSpec grid = make_grid(f);
  const fs::path dir = out_dir.empty() ? "pipeline_out" : out_dir;
  fs::create_directories(dir);

  std::vector<sw::io::AnalysisResult> series;
  json steps = json::array();
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const double tau = taus[i];
    const sw::ExperimentSpec spec = make_spec(f, grid, tau);
    const sw::ProbabilityGrid pg = sw::run_tomography(spec, make_readout(f), f.threads);

    char tag[32];
    std::snprintf(tag, sizeof(tag), "tau_%05.2f", tau);
    const fs::path prob_path = dir / (std::string(tag) + "_probabilities.csv");
    const fs::path map_path = dir / (std::string(tag) + "_wigner.csv");
    const fs::path analysis_path = dir / (std::string(tag) + "_analysis.json");

    sw::io::write_probability_csv(prob_path, pg, run_metadata(f, grid, tau));
    const sw::WignerMap map = sw::reconstruct(pg);
    sw::io::write_wigner_csv(map_path, map, run_metadata(f, grid, tau));
    const sw::io::AnalysisResult result = analyze_map(map, grid, f.reference, tau);
    sw::io::write_analysis_json(analysis_path, result);
    series.push_back(result);

    steps.push_back({{"tau_us", tau},
                     {"probabilities", prob_path.string()},
                     {"wigner", map_path.string()},
                     {"analysis", analysis_path.string()},
                     {"fidelity", result.fidelity},
                     {"purity", result.purity},
                     {"wmin", result.wmin.value}});
  }
  const fs::path series_path = dir / "series.csv";
  sw::io::write_series_csv(series_path, series);

  const json summary = {{"state", f.state},
                        {"j_twice", f.j_twice},
                        {"t2star_us", f.t2star_us},
                        {"shots", f.shots},
                        {"seed", f.seed},
                        {"grid", grid.gauss ? "gauss" : "uniform"},
                        {"reference", f.reference},
                        {"series_csv", series_path.string()},
                        {"steps", steps}};
  std::ofstream summary_file(dir / "summary.json");
  summary_file << summary.dump(2) << "\n";
  std::cout << "wrote " << (dir / "summary.json").string() << " (" << taus.size() << " tau values)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spherical Wigner-function tomography of spin states"};
  app.require_subcommand(1);

  SharedFlags f;
  RamseyFlags rf;
  std::string out_dir;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", f.out_path, "output path");
    cmd->add_option("--format", f.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--seed", f.seed, "RNG master seed");
    cmd->add_option("--threads", f.threads, "worker threads")->check(CLI::PositiveNumber);
  };

  CLI::App* forward = app.add_subcommand("forward", "analytic Wigner map of a state");
  add_state_flags(forward, f, /*state_required=*/true);
  add_grid_flags(forward, f);
  add_common(forward);
  forward->add_option("--tau-us", f.tau_us, "dephasing time before the map (qubit only)");
  forward->add_option("--t2star-us", f.t2star_us, "dephasing time constant");

  CLI::App* simulate = app.add_subcommand("simulate", "simulated tomography scan");
  add_state_flags(simulate, f);
  add_grid_flags(simulate, f);
  add_common(simulate);
  simulate->add_option("--tau-us", f.tau_us, "idle (dephasing) time");
  simulate->add_option("--t2star-us", f.t2star_us, "dephasing time constant");
  simulate->add_option("--shots", f.shots, "repetitions per node (0 = exact)")
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("--readout", f.readout, "photon readout rates 'bright,dark'");
  simulate->add_option("--reference-shots", f.reference_shots, "readout calibration shots");

  CLI::App* reconstruct = app.add_subcommand("reconstruct", "Wigner map from probabilities");
  reconstruct->add_option("--in", f.in_path, "probability grid CSV")->required();
  add_common(reconstruct);

  CLI::App* analyze = app.add_subcommand("analyze", "fidelity/purity/W_min/<J> of Wigner maps");
  analyze->add_option("--in", f.in_paths, "Wigner map CSV(s)");
  analyze->add_option("--reference", f.reference, "pure reference state (default y)");
  add_common(analyze);

  CLI::App* ramsey = app.add_subcommand("ramsey", "Ramsey fringe simulation and T2* fit");
  ramsey->add_option("--in", f.in_path, "existing Ramsey CSV to fit");
  ramsey->add_option("--detuning-mhz", rf.detuning_mhz, "microwave detuning");
  ramsey->add_option("--t2star-us", f.t2star_us, "dephasing time constant");
  ramsey->add_option("--tau-max-us", rf.tau_max_us, "maximum free-precession time");
  ramsey->add_option("--points", rf.points, "number of tau samples");
  ramsey->add_option("--shots", f.shots, "repetitions per point (0 = exact)")
      ->check(CLI::NonNegativeNumber);
  ramsey->add_option("--curve-out", rf.curve_out, "fitted model curve CSV");
  ramsey->add_option("--data-out", rf.data_out, "simulated data CSV");
  add_common(ramsey);

  CLI::App* pipeline = app.add_subcommand("pipeline", "simulate -> reconstruct -> analyze over a tau series");
  add_state_flags(pipeline, f);
  add_grid_flags(pipeline, f);
  add_common(pipeline);
  pipeline->add_option("--tau-series", f.tau_series, "tau values 'start:stop:step' (us)")->required();
  pipeline->add_option("--t2star-us", f.t2star_us, "dephasing time constant");
  pipeline->add_option("--shots", f.shots, "repetitions per node (0 = exact)")
      ->check(CLI::NonNegativeNumber);
  pipeline->add_option("--readout", f.readout, "photon readout rates 'bright,dark'");
  pipeline->add_option("--reference", f.reference, "pure reference state");
  pipeline->add_option("--out-dir", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(forward)) return cmd_forward(f);
    if (app.got_subcommand(simulate)) return cmd_simulate(f);
    if (app.got_subcommand(reconstruct)) return cmd_reconstruct(f);
    if (app.got_subcommand(analyze)) return cmd_analyze(f);
    if (app.got_subcommand(ramsey)) return cmd_ramsey(f, rf);
    if (app.got_subcommand(pipeline)) return cmd_pipeline(f, out_dir);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
