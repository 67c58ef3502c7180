#include "spinwigner/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace spinwigner {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::mt19937_64 node_rng(std::uint64_t master_seed, std::uint64_t node_index) {
  return std::mt19937_64(splitmix64(splitmix64(master_seed) ^ splitmix64(node_index + 1)));
}

ReadoutParams ReadoutParams::make(double bright, double dark, long long reference_shots) {
  if (!(bright > dark) || dark < 0.0) {
    throw std::invalid_argument("ReadoutParams: need bright_rate > dark_rate >= 0");
  }
  if (reference_shots < 1) throw std::invalid_argument("ReadoutParams: reference_shots must be >= 1");
  return ReadoutParams{bright, dark, reference_shots};
}

std::vector<double> ideal_probabilities(const DensityMatrix& rho, double theta, double phi) {
  const UnitaryMatrix u = rotation_unitary(rho.j(), theta, phi + std::numbers::pi / 2.0);
  const Eigen::MatrixXcd rotated = u.entries.adjoint() * rho.entries() * u.entries;
  std::vector<double> p(rho.dim());
  for (int i = 0; i < rho.dim(); ++i) p[i] = std::max(rotated(i, i).real(), 0.0);
  return p;
}

std::vector<double> sample_probabilities(const DensityMatrix& rho, double theta, double phi,
                                         long long shots, std::mt19937_64& rng) {
  if (shots < 1) throw std::invalid_argument("sample_probabilities: shots must be >= 1");
  const std::vector<double> p = ideal_probabilities(rho, theta, phi);
  // Multinomial draw as a chain of binomials over the remaining mass.
  std::vector<double> freq(p.size(), 0.0);
  long long remaining = shots;
  double mass = 1.0;
  for (std::size_t m = 0; m + 1 < p.size() && remaining > 0; ++m) {
    const double cond = std::clamp(p[m] / mass, 0.0, 1.0);
    std::binomial_distribution<long long> binom(remaining, cond);
    const long long c = binom(rng);
    freq[m] = static_cast<double>(c) / shots;
    remaining -= c;
    mass = std::max(mass - p[m], 1e-300);
  }
  freq.back() = static_cast<double>(remaining) / shots;
  return freq;
}

std::vector<double> photon_readout(std::span<const double> populations, long long shots,
                                   const ReadoutParams& params, std::mt19937_64& rng) {
  if (populations.size() != 2) {
    throw std::invalid_argument("photon_readout: qubit populations expected");
  }
  if (shots == 0) return {populations[0], populations[1]};  // analytic mode
  if (shots < 0) throw std::invalid_argument("photon_readout: negative shots");

  const double p0 = populations[0], p1 = populations[1];
  const double signal_mean = shots * (p1 * params.bright_rate + p0 * params.dark_rate);
  std::poisson_distribution<long long> signal_dist(signal_mean);
  std::poisson_distribution<long long> bright_dist(params.reference_shots * params.bright_rate);
  std::poisson_distribution<long long> dark_dist(params.reference_shots * params.dark_rate);

  const double mean_counts = static_cast<double>(signal_dist(rng)) / shots;
  const double bright = static_cast<double>(bright_dist(rng)) / params.reference_shots;
  const double dark = static_cast<double>(dark_dist(rng)) / params.reference_shots;
  if (bright <= dark) {
    throw std::runtime_error("photon_readout: degenerate calibration (bright " + std::to_string(bright) +
                             " <= dark " + std::to_string(dark) + ")");
  }
  const double p1_hat = std::clamp((mean_counts - dark) / (bright - dark), 0.0, 1.0);
  return {1.0 - p1_hat, p1_hat};
}

ProbabilityGrid run_tomography(const ExperimentSpec& spec, const std::optional<ReadoutParams>& readout,
                               int threads) {
  if (spec.shots < 0) throw std::invalid_argument("run_tomography: negative shots");
  if (spec.grid.point_count() == 0) throw std::invalid_argument("run_tomography: empty grid");

  DensityMatrix rho = spec.initial_rho ? *spec.initial_rho
                                       : spin_coherent(spec.j, spec.epsilon, spec.eta);
  if (spec.tau_us > 0.0) rho = dephase_qubit(rho, spec.tau_us, spec.model);

  ProbabilityGrid pg;
  pg.grid = spec.grid;
  pg.j = rho.j();
  pg.shots = spec.shots;
  pg.seed = spec.seed;
  const int levels = pg.levels();
  const std::size_t n = spec.grid.point_count();
  pg.probs.assign(n * levels, 0.0);

  std::exception_ptr failure;
  std::mutex failure_lock;
  auto worker = [&](std::size_t begin, std::size_t end) {
    try {
      for (std::size_t node = begin; node < end; ++node) {
        const double theta = spec.grid.theta[node / spec.grid.phi.size()];
        const double phi = spec.grid.phi[node % spec.grid.phi.size()];
        std::vector<double> p;
        if (spec.shots == 0) {
          p = ideal_probabilities(rho, theta, phi);
        } else {
          auto rng = node_rng(spec.seed, node);
          if (readout) {
            p = photon_readout(ideal_probabilities(rho, theta, phi), spec.shots, *readout, rng);
          } else {
            p = sample_probabilities(rho, theta, phi, spec.shots, rng);
          }
        }
        std::copy(p.begin(), p.end(), pg.probs.begin() + node * levels);
      }
    } catch (...) {
      std::lock_guard guard(failure_lock);
      if (!failure) failure = std::current_exception();
    }
  };

  threads = std::max(1, threads);
  if (threads == 1 || n < 2) {
    worker(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const std::size_t begin = t * chunk;
      if (begin >= n) break;
      pool.emplace_back(worker, begin, std::min(begin + chunk, n));
    }
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return pg;
}

RamseyData ramsey_sequence(std::vector<double> taus_us, double detuning_mhz,
                           const DephasingModel& model, long long shots, std::uint64_t seed) {
  if (detuning_mhz < 0.0) throw std::invalid_argument("ramsey_sequence: negative detuning");
  RamseyData data;
  data.detuning_hint_mhz = detuning_mhz;
  data.shots = shots;
  data.seed = seed;
  data.signals.reserve(taus_us.size());
  for (std::size_t i = 0; i < taus_us.size(); ++i) {
    const double tau = taus_us[i];
    if (tau < 0.0) throw std::invalid_argument("ramsey_sequence: negative tau");
    if (i > 0 && tau < taus_us[i - 1]) {
      throw std::invalid_argument("ramsey_sequence: taus must be nondecreasing");
    }
    const double ratio = tau / model.t2_star_us;
    double s = 0.5 * (1.0 + std::exp(-ratio * ratio) * std::cos(2.0 * std::numbers::pi * detuning_mhz * tau));
    if (shots > 0) {
      auto rng = node_rng(seed, i);
      std::binomial_distribution<long long> binom(shots, std::clamp(s, 0.0, 1.0));
      s = static_cast<double>(binom(rng)) / shots;
    }
    data.signals.push_back(s);
  }
  data.taus_us = std::move(taus_us);
  return data;
}

}  // namespace spinwigner
