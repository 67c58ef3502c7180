#include "spinwigner/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace spinwigner {

double FitResult::param(const std::string& name) const {
  for (std::size_t i = 0; i < param_names.size(); ++i) {
    if (param_names[i] == name) return params[static_cast<Eigen::Index>(i)];
  }
  throw std::invalid_argument("FitResult: unknown parameter " + name);
}

double FitResult::sigma(const std::string& name) const {
  for (std::size_t i = 0; i < param_names.size(); ++i) {
    if (param_names[i] == name) {
      return std::sqrt(std::max(covariance(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)), 0.0));
    }
  }
  throw std::invalid_argument("FitResult: unknown parameter " + name);
}

namespace {

double chi2(const ModelFn& model, std::span<const double> x, std::span<const double> y,
            std::span<const double> sigma, const Eigen::VectorXd& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = (y[i] - model(x[i], p)) / sigma[i];
    s += r * r;
  }
  return s;
}

Eigen::VectorXd residuals(const ModelFn& model, std::span<const double> x, std::span<const double> y,
                          std::span<const double> sigma, const Eigen::VectorXd& p) {
  Eigen::VectorXd r(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    r[static_cast<Eigen::Index>(i)] = (y[i] - model(x[i], p)) / sigma[i];
  }
  return r;
}

Eigen::MatrixXd jacobian(const ModelFn& model, std::span<const double> x,
                         std::span<const double> sigma, const Eigen::VectorXd& p) {
  const Eigen::Index n = static_cast<Eigen::Index>(x.size());
  const Eigen::Index np = p.size();
  Eigen::MatrixXd jac(n, np);  // d(model)/dp scaled by 1/sigma
  for (Eigen::Index k = 0; k < np; ++k) {
    const double h = 1e-6 * std::max(std::abs(p[k]), 1.0);
    Eigen::VectorXd plus = p, minus = p;
    plus[k] += h;
    minus[k] -= h;
    for (Eigen::Index i = 0; i < n; ++i) {
      jac(i, k) = (model(x[i], plus) - model(x[i], minus)) / (2.0 * h * sigma[i]);
    }
  }
  return jac;
}

}  // namespace

FitResult least_squares(const ModelFn& model, std::span<const double> x, std::span<const double> y,
                        std::span<const double> sigma, Eigen::VectorXd init,
                        std::vector<std::string> names, int max_iterations) {
  const std::size_t n = x.size();
  const Eigen::Index np = init.size();
  if (y.size() != n || sigma.size() != n) {
    throw std::invalid_argument("least_squares: x, y, sigma lengths differ");
  }
  if (static_cast<Eigen::Index>(n) < np) {
    throw std::invalid_argument("least_squares: underdetermined (" + std::to_string(n) + " points, " +
                                std::to_string(np) + " parameters)");
  }
  if (names.size() != static_cast<std::size_t>(np)) {
    throw std::invalid_argument("least_squares: parameter name count mismatch");
  }
  for (double s : sigma) {
    if (!(s > 0.0)) throw std::invalid_argument("least_squares: sigma must be positive");
  }

  Eigen::VectorXd p = std::move(init);
  double s_cur = chi2(model, x, y, sigma, p);
  double lambda = 0.0;  // pure Gauss-Newton until a step is rejected
  double grad_norm = 0.0;
  bool converged = false;
  bool stuck = false;
  int iter = 0;

  for (; iter < max_iterations && !converged && !stuck; ++iter) {
    const Eigen::MatrixXd jac = jacobian(model, x, sigma, p);
    const Eigen::VectorXd r = residuals(model, x, y, sigma, p);
    const Eigen::MatrixXd normal = jac.transpose() * jac;
    const Eigen::VectorXd g = jac.transpose() * r;
    grad_norm = g.lpNorm<Eigen::Infinity>();
    if (grad_norm < 1e-12 * std::max(1.0, s_cur)) {
      converged = true;
      break;
    }

    bool accepted = false;
    while (!accepted && !stuck) {
      Eigen::MatrixXd damped = normal;
      damped.diagonal().array() += lambda;
      const Eigen::VectorXd step = damped.ldlt().solve(g);
      if (step.allFinite()) {
        const Eigen::VectorXd trial = p + step;
        const double s_trial = chi2(model, x, y, sigma, trial);
        if (std::isfinite(s_trial) && s_trial <= s_cur) {
          const double drop = s_cur - s_trial;
          const double step_size = step.lpNorm<Eigen::Infinity>();
          p = trial;
          s_cur = s_trial;
          lambda = lambda > 1e-12 ? lambda / 10.0 : 0.0;
          accepted = true;
          if (drop <= 1e-12 * std::max(1.0, s_cur) ||
              step_size <= 1e-12 * (1.0 + p.lpNorm<Eigen::Infinity>())) {
            converged = true;
          }
          continue;
        }
      }
      // Rejected: engage/boost damping; give up once it saturates.
      lambda = lambda == 0.0 ? 1e-4 * std::max(normal.trace() / np, 1e-30) : lambda * 10.0;
      if (!std::isfinite(lambda) || lambda > 1e30 * std::max(normal.trace() / np, 1.0)) stuck = true;
    }
  }

  // Covariance from the undamped normal matrix at the optimum, scaled by
  // reduced chi^2 (the data carry no absolute error scale otherwise).
  const Eigen::MatrixXd jac = jacobian(model, x, sigma, p);
  const Eigen::MatrixXd normal = jac.transpose() * jac;
  Eigen::MatrixXd cov = normal.fullPivLu().inverse();
  if (!cov.allFinite() || normal.fullPivLu().rank() < np) {
    throw std::runtime_error("least_squares: singular normal matrix at the optimum");
  }
  const double dof_scale = static_cast<Eigen::Index>(n) > np
                               ? s_cur / static_cast<double>(static_cast<Eigen::Index>(n) - np)
                               : 1.0;
  cov *= dof_scale;

  FitResult out;
  out.param_names = std::move(names);
  out.params = std::move(p);
  out.covariance = 0.5 * (cov + cov.transpose());
  out.residual_norm = std::sqrt(s_cur);
  out.gradient_norm = grad_norm;
  out.iterations = std::min(iter, max_iterations);
  out.converged = converged;
  return out;
}

namespace {

double ramsey_model(double tau, const Eigen::VectorXd& p) {
  const double amplitude = p[0], offset = p[1], f = p[2], t2 = p[3];
  double envelope;
  if (t2 == 0.0) {
    envelope = (tau == 0.0) ? 1.0 : 0.0;
  } else {
    const double ratio = tau / t2;
    envelope = std::exp(-ratio * ratio);
  }
  return offset + amplitude * envelope * std::cos(2.0 * std::numbers::pi * f * tau);
}

// Peak of the detrended periodogram on a fine frequency grid up to Nyquist.
double periodogram_peak(std::span<const double> taus, std::span<const double> y) {
  const std::size_t n = taus.size();
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= n;

  double min_dt = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < n; ++i) min_dt = std::min(min_dt, taus[i] - taus[i - 1]);
  const double span = taus[n - 1] - taus[0];
  if (!(min_dt > 0.0) || !(span > 0.0)) {
    throw std::invalid_argument("fit_ramsey: degenerate tau axis");
  }
  const double f_max = 0.5 / min_dt;
  const double df = 1.0 / (8.0 * span);

  double best_f = 0.0, best_power = -1.0;
  for (double f = 0.0; f <= f_max; f += df) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double w = 2.0 * std::numbers::pi * f * taus[i];
      re += (y[i] - mean) * std::cos(w);
      im -= (y[i] - mean) * std::sin(w);
    }
    const double power = re * re + im * im;
    if (power > best_power) {
      best_power = power;
      best_f = f;
    }
  }
  return best_f;
}

}  // namespace

FitResult fit_ramsey(const RamseyData& data, std::optional<Eigen::Vector4d> init) {
  const std::size_t n = data.taus_us.size();
  if (n < 8) throw std::invalid_argument("fit_ramsey: need at least 8 points");
  if (data.signals.size() != n) throw std::invalid_argument("fit_ramsey: taus/signals length mismatch");

  const auto [min_it, max_it] = std::minmax_element(data.signals.begin(), data.signals.end());
  const double range = *max_it - *min_it;

  Eigen::VectorXd p0(4);
  if (init) {
    p0 = *init;
  } else {
    if (range < 1e-9) {
      throw std::runtime_error("fit_ramsey: flat signal, spectral initialization impossible");
    }
    const double offset0 = 0.5 * (*max_it + *min_it);
    const double amplitude0 = 0.5 * range;
    const double f0 = periodogram_peak(data.taus_us, data.signals);

    // Envelope via moving max of |y - offset|; T2* guess = first tau where it
    // has dropped to 1/e of the amplitude.
    const int window = std::max<int>(2, static_cast<int>(n) / 8);
    double t2_guess = data.taus_us.back();
    for (std::size_t i = 0; i < n; ++i) {
      double env = 0.0;
      const std::size_t lo = i > static_cast<std::size_t>(window) ? i - window : 0;
      const std::size_t hi = std::min(n - 1, i + window);
      for (std::size_t k = lo; k <= hi; ++k) env = std::max(env, std::abs(data.signals[k] - offset0));
      if (env <= amplitude0 * std::exp(-1.0) && data.taus_us[i] > 0.0) {
        t2_guess = data.taus_us[i];
        break;
      }
    }
    p0 << amplitude0, offset0, f0, t2_guess;
  }

  // sigma from binomial counting statistics when shots are known.
  std::vector<double> sigma(n, 1.0);
  if (data.shots > 0) {
    for (std::size_t i = 0; i < n; ++i) {
      const double s = std::clamp(data.signals[i], 0.0, 1.0);
      sigma[i] = std::max(std::sqrt(s * (1.0 - s) / data.shots), 0.5 / data.shots);
    }
  }

  FitResult fit = least_squares(ramsey_model, data.taus_us, data.signals, sigma, p0,
                                {"amplitude", "offset", "f_mhz", "t2_star_us"});
  // The model is even in T2*; report the positive branch.
  fit.params[3] = std::abs(fit.params[3]);
  return fit;
}

}  // namespace spinwigner
