#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "spinwigner/fitting.hpp"
#include "spinwigner/wigner.hpp"

namespace spinwigner::io {

// Leading "# key=value" comment lines carried by the CSV schemas.
using Metadata = std::map<std::string, std::string>;

// All writes are atomic (write to a temp file in the same directory, then
// rename). Numbers are serialized with 17 significant digits so write->read
// round-trips reproduce doubles exactly.

// Wigner map CSV: theta_rad,phi_rad,w (row-major, theta outer).
void write_wigner_csv(const std::filesystem::path& path, const WignerMap& map,
                      const Metadata& extra = {});
WignerMap read_wigner_csv(const std::filesystem::path& path, Metadata* meta = nullptr);

// Probability grid CSV: theta_rad,phi_rad,p0..p_{2j} with the p columns
// ordered m = j..-j, plus shots/seed metadata.
void write_probability_csv(const std::filesystem::path& path, const ProbabilityGrid& pg,
                           const Metadata& extra = {});
ProbabilityGrid read_probability_csv(const std::filesystem::path& path, Metadata* meta = nullptr);

// Ramsey CSV: tau_us,signal.
void write_ramsey_csv(const std::filesystem::path& path, const RamseyData& data,
                      const Metadata& extra = {});
RamseyData read_ramsey_csv(const std::filesystem::path& path, Metadata* meta = nullptr);

// Fit result JSON: {"params": {...}, "sigmas": {...}, "residual_norm": r,
// "converged": bool, "iterations": n}.
void write_fit_json(const std::filesystem::path& path, const FitResult& fit);

// Density matrix JSON: {"j_twice": int, "re": [[...]], "im": [[...]]}.
void write_density_matrix_json(const std::filesystem::path& path, const DensityMatrix& rho);
DensityMatrix read_density_matrix_json(const std::filesystem::path& path);

// Per-map analysis JSON (fidelity, purity, wmin, J, normalization_check).
struct AnalysisResult {
  double fidelity = 0.0;
  double purity = 0.0;
  WignerExtremum wmin{0.0, 0.0, 0.0};
  std::array<double, 3> angular_momentum{0.0, 0.0, 0.0};
  double normalization_check = 0.0;
  std::optional<double> tau_us;
};
void write_analysis_json(const std::filesystem::path& path, const AnalysisResult& analysis);

// Series CSV for the dephasing reproduction: tau_us,fidelity,purity,wmin.
void write_series_csv(const std::filesystem::path& path, const std::vector<AnalysisResult>& series);

// 17-significant-digit formatting used by every writer.
std::string format_double(double v);

}  // namespace spinwigner::io
