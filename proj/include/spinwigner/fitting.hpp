#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spinwigner/simulator.hpp"

namespace spinwigner {

struct FitResult {
  std::vector<std::string> param_names;
  Eigen::VectorXd params;
  Eigen::MatrixXd covariance;  // reduced-chi^2 scaled
  double residual_norm = 0.0;  // sqrt(sum((y - model)/sigma)^2) at the optimum
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;

  double param(const std::string& name) const;
  double sigma(const std::string& name) const;
};

using ModelFn = std::function<double(double x, const Eigen::VectorXd& p)>;

// Damped Gauss-Newton: plain Gauss-Newton steps with a Levenberg damping
// term that engages on the first rejected step and is scaled by x10 per
// failure /÷10 per success. Jacobians by central finite differences with
// relative step 1e-6.
FitResult least_squares(const ModelFn& model, std::span<const double> x, std::span<const double> y,
                        std::span<const double> sigma, Eigen::VectorXd init,
                        std::vector<std::string> names, int max_iterations = 200);

// Ramsey model: signal = offset + A exp[-(tau/T2*)^2] cos(2 pi f tau) with
// parameters (amplitude, offset, f_mhz, t2_star_us). Initial values default
// to a periodogram peak for f and a moving-max envelope drop for T2*.
FitResult fit_ramsey(const RamseyData& data, std::optional<Eigen::Vector4d> init = std::nullopt);

}  // namespace spinwigner
