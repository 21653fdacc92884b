#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sgcv/rng.hpp"

namespace sgcv {

/// Observation noise: pure zero-mean Gaussian, or a two-component zero-mean
/// Gaussian mixture where a Bernoulli(p_i) indicator selects a rare
/// high-variance impulsive component per sample.
struct NoiseModel {
  enum class Kind { gaussian, mixture };

  Kind kind = Kind::gaussian;
  double sigma_w_sq = 1.0;
  double sigma_i_sq = 0.0;
  double p_i = 0.0;

  static NoiseModel gaussian(double sigma_w_sq) {
    if (!(sigma_w_sq >= 0.0)) {
      throw std::invalid_argument("NoiseModel: sigma_w_sq must be >= 0");
    }
    return NoiseModel{Kind::gaussian, sigma_w_sq, 0.0, 0.0};
  }

  static NoiseModel mixture(double sigma_w_sq, double sigma_i_sq, double p_i) {
    if (!(sigma_w_sq >= 0.0)) {
      throw std::invalid_argument("NoiseModel: sigma_w_sq must be >= 0");
    }
    if (!(sigma_i_sq > sigma_w_sq)) {
      throw std::invalid_argument("NoiseModel: mixture needs sigma_i_sq > sigma_w_sq");
    }
    if (!(p_i >= 0.0 && p_i <= 1.0)) {
      throw std::invalid_argument("NoiseModel: p_i must be in [0, 1]");
    }
    return NoiseModel{Kind::mixture, sigma_w_sq, sigma_i_sq, p_i};
  }

  double total_variance() const {
    return (1.0 - p_i) * sigma_w_sq + p_i * sigma_i_sq;
  }
};

/// i.i.d. draws from the model, bit-reproducible for a given (model, n, seed).
///
/// Every sample consumes the same number of stream values regardless of kind
/// (one Bernoulli uniform plus one Box-Muller pair), so a mixture with
/// p_i = 0 produces the exact bits of the pure-Gaussian model.
inline Eigen::VectorXd draw_noise(const NoiseModel& model, int n, std::uint64_t seed) {
  if (n < 0) throw std::invalid_argument("draw_noise: negative count");
  const double sd_w = std::sqrt(model.sigma_w_sq);
  const double sd_i = std::sqrt(model.sigma_i_sq);
  CounterRng rng(mix64(seed));
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) {
    const double ub = rng.next_unit();
    const double z = rng.next_normal();
    const bool impulsive = ub <= model.p_i;  // never fires when p_i == 0
    out(i) = z * (impulsive ? sd_i : sd_w);
  }
  return out;
}

/// Centered integer sampling grid: [-N/2, N/2-1] for even N and
/// [-(N-1)/2, (N-1)/2] for odd N (unit sampling period).
inline Eigen::VectorXd cubic_grid(int n) {
  if (n < 3) throw std::invalid_argument("cubic_grid: need n >= 3");
  const int lo = (n % 2 == 0) ? -n / 2 : -(n - 1) / 2;
  Eigen::VectorXd g(n);
  for (int i = 0; i < n; ++i) g(i) = static_cast<double>(lo + i);
  return g;
}

/// x(t) = 0.01 t^3 + 1 sampled on the centered grid.
inline Eigen::VectorXd sample_cubic(int n) {
  const Eigen::VectorXd g = cubic_grid(n);
  return 0.01 * g.array().cube() + 1.0;
}

/// Position of the tracked object: unit velocity on [0,6], deceleration
/// -0.125 m/s^2 on [6,14], at rest at 10 m on [14,20]. C^1 by construction.
inline double sample_kinematic(double t) {
  if (!(t >= 0.0 && t <= 20.0)) {
    throw std::domain_error("sample_kinematic: t outside [0, 20]");
  }
  if (t <= 6.0) return t;
  if (t <= 14.0) {
    const double u = t - 6.0;
    return 6.0 + u - 0.0625 * u * u;
  }
  return 10.0;
}

/// Test-signal description used by the experiment configs.
struct SignalSpec {
  enum class Kind { cubic, kinematic, custom };

  Kind kind = Kind::cubic;
  double sample_period = 1.0;
  std::vector<double> custom_coeffs;  // ascending powers

  double eval(double t) const {
    switch (kind) {
      case Kind::cubic:
        return 0.01 * t * t * t + 1.0;
      case Kind::kinematic:
        return sample_kinematic(t);
      case Kind::custom: {
        double v = 0.0;
        for (auto it = custom_coeffs.rbegin(); it != custom_coeffs.rend(); ++it) {
          v = v * t + *it;
        }
        return v;
      }
    }
    return 0.0;
  }
};

}  // namespace sgcv
