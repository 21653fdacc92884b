#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "sgcv/design.hpp"
#include "sgcv/rng.hpp"
#include "sgcv/select.hpp"
#include "sgcv/signal.hpp"

namespace sgcv {

enum class Method { cv, bic_n, bic_snr };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::cv: return "cv";
    case Method::bic_n: return "bic_n";
    case Method::bic_snr: return "bic_snr";
  }
  return "?";
}

/// Worker count for trial-level parallelism: SG_CV_THREADS if set (>= 1),
/// otherwise the machine parallelism. Results never depend on this value.
inline int thread_count() {
  if (const char* env = std::getenv("SG_CV_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) {
      return static_cast<int>(std::min<long>(v, 256));
    }
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

struct MethodStats {
  Method method = Method::cv;
  double prob = 0.0;
  double stderr_value = 0.0;
  std::vector<long long> histogram;  // counts per selected order, sums to trials
};

struct SweepPoint {
  double axis_value = 0.0;
  std::string axis_text;  // printable axis value (used for pair axes)
  int window_len = 0;
  NoiseModel noise;
  long long trials = 0;
  std::vector<MethodStats> methods;
};

struct ExperimentReport {
  std::string experiment;
  std::string axis_name;
  std::uint64_t base_seed = 0;
  long long trials = 0;
  int true_order = 3;
  std::vector<SweepPoint> points;
};

enum class SweepAxis { window_len, noise_variance, impulse_prob, impulse_pair };

/// One Monte Carlo study: an axis, a fixed remainder of the noise/signal
/// setting, and the methods to score. Every trial draws y = x + w with a
/// per-trial substream seed, scores it with each method at P_max = N-2, and
/// the report records the fraction of exact true-order detections.
struct ExperimentConfig {
  SweepAxis axis = SweepAxis::window_len;
  std::vector<double> axis_values;
  std::vector<std::pair<double, double>> pair_values;  // (sigma_i_sq, p_i)

  int window_len = 16;      // fixed N for non-window axes
  double sigma_w_sq = 1.0;
  double sigma_i_sq = 0.0;  // mixture component, used when mixture = true
  double p_i = 0.0;
  bool mixture = false;

  long long trials = 2000;
  std::uint64_t seed = 1;
  int true_order = 3;
  SignalSpec signal{};
  std::vector<Method> methods{Method::cv, Method::bic_n, Method::bic_snr};
};

namespace detail {

inline Eigen::VectorXd detection_signal(const SignalSpec& sig, int n) {
  if (sig.kind == SignalSpec::Kind::kinematic) {
    throw std::invalid_argument("detection experiments need a polynomial signal");
  }
  if (sig.kind == SignalSpec::Kind::cubic && sig.sample_period == 1.0) {
    return sample_cubic(n);
  }
  const Eigen::VectorXd g = cubic_grid(n);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = sig.eval(g(i) * sig.sample_period);
  return x;
}

struct PointSetting {
  double axis_value;
  std::string axis_text;
  int window_len;
  NoiseModel noise;
};

inline std::string fmt_axis(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

inline std::vector<PointSetting> expand_axis(const ExperimentConfig& cfg) {
  std::vector<PointSetting> points;
  auto base_noise = [&](double sigi, double pi) {
    return cfg.mixture ? NoiseModel::mixture(cfg.sigma_w_sq, sigi, pi)
                       : NoiseModel::gaussian(cfg.sigma_w_sq);
  };
  switch (cfg.axis) {
    case SweepAxis::window_len:
      for (double v : cfg.axis_values) {
        const int n = static_cast<int>(std::lround(v));
        if (static_cast<double>(n) != v) {
          throw std::invalid_argument("window-length axis values must be integers");
        }
        points.push_back({v, fmt_axis(v), n, base_noise(cfg.sigma_i_sq, cfg.p_i)});
      }
      break;
    case SweepAxis::noise_variance:
      for (double v : cfg.axis_values) {
        if (!(v >= 0.0)) throw std::invalid_argument("negative noise variance");
        points.push_back({v, fmt_axis(v), cfg.window_len, NoiseModel::gaussian(v)});
      }
      break;
    case SweepAxis::impulse_prob:
      for (double v : cfg.axis_values) {
        points.push_back({v, fmt_axis(v), cfg.window_len,
                          NoiseModel::mixture(cfg.sigma_w_sq, cfg.sigma_i_sq, v)});
      }
      break;
    case SweepAxis::impulse_pair:
      for (const auto& [sigi, pi] : cfg.pair_values) {
        points.push_back({pi, fmt_axis(sigi) + ":" + fmt_axis(pi), cfg.window_len,
                          NoiseModel::mixture(cfg.sigma_w_sq, sigi, pi)});
      }
      break;
  }
  if (points.empty()) throw std::invalid_argument("empty sweep axis");
  return points;
}

}  // namespace detail

/// Core sweep driver. Trials are independent; they are partitioned across
/// threads and aggregated by integer counts, so the report is identical for
/// any SG_CV_THREADS value.
inline ExperimentReport run_detection_sweep(const ExperimentConfig& cfg,
                                            std::string experiment,
                                            std::string axis_name) {
  if (cfg.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (cfg.true_order < 0) throw std::invalid_argument("negative true order");

  ExperimentReport report;
  report.experiment = std::move(experiment);
  report.axis_name = std::move(axis_name);
  report.base_seed = cfg.seed;
  report.trials = cfg.trials;
  report.true_order = cfg.true_order;

  const std::vector<detail::PointSetting> settings = detail::expand_axis(cfg);
  const int n_methods = static_cast<int>(cfg.methods.size());
  if (n_methods == 0) throw std::invalid_argument("no methods selected");

  for (const auto& setting : settings) {
    const int n = setting.window_len;
    if (n < cfg.true_order + 2) {
      throw std::invalid_argument(
          "window length " + std::to_string(n) + " cannot detect order " +
          std::to_string(cfg.true_order) + " (need N >= order + 2)");
    }
    const int pmax = n - 2;
    const DesignSpec spec(n, pmax);
    const NestedBasis basis = build_nested_basis(spec);
    const Eigen::VectorXd x = detail::detection_signal(cfg.signal, n);

    const int workers =
        static_cast<int>(std::min<long long>(thread_count(), cfg.trials));
    const long long chunk = (cfg.trials + workers - 1) / workers;

    std::vector<std::vector<std::vector<long long>>> hists(
        workers, std::vector<std::vector<long long>>(
                     n_methods, std::vector<long long>(pmax + 1, 0)));

    auto worker = [&](int w) {
      SelectionScratch scratch;
      SelectionResult sel;
      Eigen::VectorXd y(n);
      const long long lo = w * chunk;
      const long long hi = std::min<long long>(cfg.trials, lo + chunk);
      for (long long trial = lo; trial < hi; ++trial) {
        y = x + draw_noise(setting.noise, n, substream_seed(cfg.seed, trial));
        select_order_cv(y, basis, scratch, sel);
        const BaselineScores bic =
            score_bic_from_residuals(sel.residual_norm_by_order, n);
        for (int m = 0; m < n_methods; ++m) {
          int order = 0;
          switch (cfg.methods[m]) {
            case Method::cv: order = sel.best_order; break;
            case Method::bic_n: order = bic.best_order_bic_n; break;
            case Method::bic_snr: order = bic.best_order_bic_snr; break;
          }
          ++hists[w][m][order];
        }
      }
    };

    if (workers == 1) {
      worker(0);
    } else {
      std::vector<std::thread> pool;
      pool.reserve(workers);
      for (int w = 0; w < workers; ++w) pool.emplace_back(worker, w);
      for (auto& th : pool) th.join();
    }

    SweepPoint point;
    point.axis_value = setting.axis_value;
    point.axis_text = setting.axis_text;
    point.window_len = n;
    point.noise = setting.noise;
    point.trials = cfg.trials;
    for (int m = 0; m < n_methods; ++m) {
      MethodStats stats;
      stats.method = cfg.methods[m];
      stats.histogram.assign(pmax + 1, 0);
      for (int w = 0; w < workers; ++w) {
        for (int p = 0; p <= pmax; ++p) stats.histogram[p] += hists[w][m][p];
      }
      const long long correct =
          cfg.true_order <= pmax ? stats.histogram[cfg.true_order] : 0;
      stats.prob = static_cast<double>(correct) / static_cast<double>(cfg.trials);
      stats.stderr_value =
          std::sqrt(stats.prob * (1.0 - stats.prob) / static_cast<double>(cfg.trials));
      point.methods.push_back(std::move(stats));
    }
    report.points.push_back(std::move(point));
  }
  return report;
}

/// Detection probability versus window length at fixed noise variance.
inline ExperimentReport run_detection_vs_n(const ExperimentConfig& cfg) {
  if (cfg.axis != SweepAxis::window_len) {
    throw std::invalid_argument("run_detection_vs_n: axis must be window_len");
  }
  if (cfg.mixture) {
    throw std::invalid_argument("run_detection_vs_n: plain Gaussian noise only");
  }
  for (double v : cfg.axis_values) {
    if (v < 5.0) {
      throw std::invalid_argument("run_detection_vs_n: N < 5 cannot detect order 3");
    }
  }
  return run_detection_sweep(cfg, "vs-n", "N");
}

/// Detection probability versus noise variance at fixed window length.
inline ExperimentReport run_detection_vs_variance(const ExperimentConfig& cfg) {
  if (cfg.axis != SweepAxis::noise_variance) {
    throw std::invalid_argument("run_detection_vs_variance: axis must be noise_variance");
  }
  return run_detection_sweep(cfg, "vs-var", "sigma_w_sq");
}

/// Impulsive-noise robustness sweeps: axis may be the
/// impulse probability, the window length, or (sigma_i_sq, p_i) pairs.
inline ExperimentReport run_robustness_sweep(const ExperimentConfig& cfg) {
  if (!cfg.mixture) {
    throw std::invalid_argument("run_robustness_sweep: mixture noise required");
  }
  switch (cfg.axis) {
    case SweepAxis::impulse_prob:
      return run_detection_sweep(cfg, "robustness", "p_i");
    case SweepAxis::window_len:
      return run_detection_sweep(cfg, "robustness", "N");
    case SweepAxis::impulse_pair:
      return run_detection_sweep(cfg, "robustness", "sigma_i_sq:p_i");
    case SweepAxis::noise_variance:
      break;
  }
  throw std::invalid_argument("run_robustness_sweep: unsupported axis");
}

/// Residual / weight / CV-score trace of a single noisy-cubic realization.
/// Raw per-order values: no order exclusion, so the monotone trade-off is
/// visible over the entire order range.
struct BiasVarianceTrace {
  int window_len = 0;
  Eigen::VectorXd resid_sq;    // non-increasing
  Eigen::VectorXd mean_gamma;  // non-decreasing
  Eigen::VectorXd tpe;
};

inline BiasVarianceTrace run_bias_variance_trace(int n, std::uint64_t seed,
                                                 double sigma_w_sq = 1.0) {
  const DesignSpec spec(n, n - 2);
  const NestedBasis basis = build_nested_basis(spec);
  const Eigen::VectorXd x =
      sample_cubic(n) + draw_noise(NoiseModel::gaussian(sigma_w_sq), n, seed);

  const int orders = n - 1;
  BiasVarianceTrace trace;
  trace.window_len = n;
  trace.resid_sq.resize(orders);
  trace.mean_gamma.resize(orders);
  trace.tpe.resize(orders);

  const Eigen::MatrixXd& q = basis.q_columns();
  const Eigen::MatrixXd& lev = basis.leverage_by_order();
  Eigen::VectorXd eps = x;
  double prev = std::numeric_limits<double>::infinity();
  for (int p = 0; p < orders; ++p) {
    const auto qp = q.col(p);
    eps.noalias() -= qp * qp.dot(x);
    double r = eps.squaredNorm();
    if (r > prev) r = prev;
    prev = r;
    trace.resid_sq(p) = r;
    const Eigen::ArrayXd gamma = (1.0 - lev.col(p).array()).inverse();
    trace.mean_gamma(p) = gamma.mean();
    trace.tpe(p) = (eps.array() * gamma).matrix().squaredNorm();
  }
  const double zero_bound = detail::residual_zero_bound(n, x.norm());
  for (int p = 0; p < orders; ++p) {
    if (trace.resid_sq(p) <= zero_bound) trace.resid_sq(p) = 0.0;
    const double gap = basis.min_leverage_gap(p);
    if (trace.tpe(p) <= zero_bound / (gap * gap)) trace.tpe(p) = 0.0;
  }
  return trace;
}

/// Sliding-window smoothing of the noisy kinematic signal: per interior
/// sample, the CV-selected order and the smoothed value. Edge
/// samples without a full window are marked (order -1, NaN output).
struct KinematicDemo {
  Eigen::VectorXd t;
  Eigen::VectorXd x_true;
  Eigen::VectorXd y;
  std::vector<int> order;    // -1 where no full window exists
  Eigen::VectorXd y_smooth;  // NaN where no full window exists
  int window_len = 0;
  int p_max = 0;
};

inline KinematicDemo run_kinematic_demo(int window_len, int p_max,
                                        double sample_period,
                                        const NoiseModel& noise,
                                        std::uint64_t seed) {
  if (window_len % 2 == 0) {
    throw std::invalid_argument("run_kinematic_demo: window must be odd");
  }
  if (!(sample_period > 0.0)) {
    throw std::invalid_argument("run_kinematic_demo: sample period must be > 0");
  }
  const int count = static_cast<int>(std::floor(20.0 / sample_period + 1e-9)) + 1;
  if (count < window_len) {
    throw std::invalid_argument("run_kinematic_demo: series shorter than window");
  }
  const DesignSpec spec(window_len, p_max);
  const NestedBasis basis = build_nested_basis(spec);

  KinematicDemo demo;
  demo.window_len = window_len;
  demo.p_max = p_max;
  demo.t.resize(count);
  demo.x_true.resize(count);
  for (int i = 0; i < count; ++i) {
    demo.t(i) = i * sample_period;
    demo.x_true(i) = sample_kinematic(demo.t(i));
  }
  demo.y = demo.x_true + draw_noise(noise, count, seed);
  demo.order.assign(count, -1);
  demo.y_smooth =
      Eigen::VectorXd::Constant(count, std::numeric_limits<double>::quiet_NaN());

  const int half = window_len / 2;
  for (int i = half; i < count - half; ++i) {
    const Eigen::VectorXd window = demo.y.segment(i - half, window_len);
    const auto [value, order] = smooth_with_selected_order(window, basis, half);
    demo.order[i] = order;
    demo.y_smooth(i) = value;
  }
  return demo;
}

}  // namespace sgcv
