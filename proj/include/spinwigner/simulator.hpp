#pragma once

#include <cstdint>
#include <numbers>
#include <optional>
#include <random>

#include "spinwigner/wigner.hpp"

namespace spinwigner {

// One tomography run: prepare, dephase for tau, rotate by the analysis pulse
// at each grid node, read out.
struct ExperimentSpec {
  HalfInt j = HalfInt::half();
  std::optional<DensityMatrix> initial_rho;  // overrides (epsilon, eta) when set
  double epsilon = std::numbers::pi / 2.0;
  double eta = std::numbers::pi / 2.0;  // defaults prepare |y>
  double tau_us = 0.0;
  DephasingModel model{2.64};
  SphereGrid grid = SphereGrid::paper_grid();
  long long shots = 0;  // 0 = exact probabilities
  std::uint64_t seed = 0;
};

// Photon-counting readout layer. Rates are mean photons per shot; the
// defaults mimic typical NV contrast and are artifact configuration only.
struct ReadoutParams {
  double bright_rate = 0.03;  // |1>
  double dark_rate = 0.02;    // |0>
  long long reference_shots = 1000000;

  static ReadoutParams make(double bright, double dark, long long reference_shots = 1000000);
};

struct RamseyData {
  std::vector<double> taus_us;
  std::vector<double> signals;  // in [0, 1]
  double detuning_hint_mhz = 0.0;
  long long shots = 0;
  std::uint64_t seed = 0;
};

// Deterministic per-node RNG stream: the node index is mixed into the master
// seed with a splitmix64 chain, so results do not depend on evaluation order.
std::mt19937_64 node_rng(std::uint64_t master_seed, std::uint64_t node_index);

// Spin projection probabilities along the measurement axis (theta, phi):
// p_m = diag(U^dag rho U) with U = rotation_unitary(j, theta, phi + pi/2).
// The phase offset makes the grid coordinates coincide with the (theta, phi)
// of the spherical harmonics, which is exactly the convention under which
// reconstruct() reproduces wigner_from_rho() nodewise.
std::vector<double> ideal_probabilities(const DensityMatrix& rho, double theta, double phi);

// Empirical frequencies of a single multinomial draw of `shots` outcomes.
std::vector<double> sample_probabilities(const DensityMatrix& rho, double theta, double phi,
                                         long long shots, std::mt19937_64& rng);

// Poisson photon-counting estimate of the qubit populations. shots = 0 is the
// analytic (infinite-shot) mode and returns the populations unchanged.
std::vector<double> photon_readout(std::span<const double> populations, long long shots,
                                   const ReadoutParams& params, std::mt19937_64& rng);

// Full tomography scan. Nodes may be evaluated on several threads; the output
// is identical for any thread count.
ProbabilityGrid run_tomography(const ExperimentSpec& spec,
                               const std::optional<ReadoutParams>& readout = std::nullopt,
                               int threads = 1);

// Ramsey fringe: signal(tau) = (1 + exp[-(tau/T2*)^2] cos(2 pi f tau))/2,
// sampled with `shots` binomial draws per point when shots > 0.
RamseyData ramsey_sequence(std::vector<double> taus_us, double detuning_mhz,
                           const DephasingModel& model, long long shots, std::uint64_t seed);

}  // namespace spinwigner
