// Command-line front end: sliding-window smoothing with per-window CV order
// selection, the Monte Carlo experiment harness, and the runtime benchmark.
//
// Exit codes: 0 success; 1 usage error (bad flags, unknown experiment name);
// 2 series unusable for smoothing (non-uniform spacing, shorter than the
// window); 3 malformed series CSV; 4 benchmark equality pre-check failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sgcv/sgcv.hpp"

namespace {

struct SmoothArgs {
  std::string input;
  std::string out;
  int window = 5;
  int pmax = 3;
  int target_index = -1;  // -1: center
};

struct ExperimentArgs {
  std::string name;
  std::string out;
  long long trials = 2000;
  std::uint64_t seed = 1;
  std::vector<double> sizes;
  std::vector<double> vars;
  std::vector<double> pi_values;
  std::vector<std::string> pairs;
  std::string axis = "pi";
  int n = 0;  // 0: per-experiment default
  double sigw2 = -1.0;
  double sigi2 = 10.0;
  int window = 5;
  int pmax = 3;
  double period = 0.5;
};

struct BenchArgs {
  std::vector<int> sizes{5, 10, 15, 20};
  int reps = 1000;
  std::uint64_t seed = 1;
  std::string out = "sgcv_bench.csv";
};

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << contents;
}

int run_smooth(const SmoothArgs& args) {
  if (args.window % 2 == 0) {
    std::cerr << "smooth: --window must be odd\n";
    return 1;
  }
  sgcv::Series series;
  try {
    series = sgcv::read_series_csv_file(args.input);
  } catch (const sgcv::series_format_error& e) {
    std::cerr << "smooth: " << e.what() << "\n";
    return 3;
  }
  try {
    sgcv::validate_series_for_smoothing(series, args.window);
  } catch (const sgcv::series_spacing_error& e) {
    std::cerr << "smooth: " << e.what() << "\n";
    return 2;
  }

  const int rows = static_cast<int>(series.t.size());
  if (args.target_index < -1 || args.target_index >= args.window) {
    std::cerr << "smooth: --target-index must be in [0, window)\n";
    return 1;
  }
  const int t0 = args.target_index < 0 ? args.window / 2 : args.target_index;
  const sgcv::DesignSpec spec(args.window, args.pmax);
  const sgcv::NestedBasis basis = sgcv::build_nested_basis(spec);

  Eigen::Map<const Eigen::VectorXd> y(series.y.data(), rows);
  std::ostringstream csv;
  csv << "t,y,order,y_smooth\n";
  int smoothed = 0;
  for (int i = 0; i < rows; ++i) {
    csv << sgcv::fmt(series.t[i], "%.10g") << ',' << sgcv::fmt(series.y[i], "%.10g")
        << ',';
    const int start = i - t0;
    if (start >= 0 && start + args.window <= rows) {
      const Eigen::VectorXd window = y.segment(start, args.window);
      const auto [value, order] = sgcv::smooth_with_selected_order(window, basis, t0);
      csv << order << ',' << sgcv::fmt(value, "%.10g");
      ++smoothed;
    } else {
      csv << ',';
    }
    csv << '\n';
  }
  write_file(args.out, csv.str());
  std::cout << "smoothed " << smoothed << "/" << rows << " samples (window "
            << args.window << ", P_max " << args.pmax << ") -> " << args.out << "\n";
  return 0;
}

std::vector<std::pair<double, double>> parse_pairs(const std::vector<std::string>& raw) {
  std::vector<std::pair<double, double>> pairs;
  for (const auto& tok : raw) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos) {
      throw std::invalid_argument("--pairs entries must look like SIGI2:PI");
    }
    pairs.emplace_back(std::stod(tok.substr(0, colon)), std::stod(tok.substr(colon + 1)));
  }
  return pairs;
}

void print_detection_summary(const sgcv::ExperimentReport& report) {
  std::cout << report.experiment << " (" << report.trials << " trials/point, seed "
            << report.base_seed << ")\n";
  for (const auto& point : report.points) {
    std::cout << "  " << report.axis_name << "=" << point.axis_text << ":";
    for (const auto& stats : point.methods) {
      std::cout << "  " << sgcv::method_name(stats.method) << "="
                << sgcv::fmt(stats.prob, "%.4f");
    }
    std::cout << "\n";
  }
}

int run_experiment(const ExperimentArgs& args) {
  static const std::set<std::string> known{"vs-n", "vs-var", "biasvar",
                                           "robustness", "demo"};
  if (known.count(args.name) == 0) {
    std::cerr << "experiment: unknown name '" << args.name
              << "' (expected vs-n, vs-var, biasvar, robustness or demo)\n";
    return 1;
  }
  const std::string prefix = args.out.empty() ? "sgcv_" + args.name : args.out;
  const std::string csv_path = prefix + ".csv";
  const std::string json_path = prefix + ".json";

  std::ostringstream csv;
  std::ostringstream json;

  if (args.name == "vs-n" || args.name == "vs-var" || args.name == "robustness") {
    sgcv::ExperimentConfig cfg;
    cfg.trials = args.trials;
    cfg.seed = args.seed;
    cfg.sigma_w_sq = args.sigw2 < 0.0 ? 1.0 : args.sigw2;

    sgcv::ExperimentReport report;
    if (args.name == "vs-n") {
      cfg.axis = sgcv::SweepAxis::window_len;
      cfg.axis_values = args.sizes.empty()
                            ? std::vector<double>{6, 8, 10, 12, 16, 20, 24, 32, 40}
                            : args.sizes;
      report = sgcv::run_detection_vs_n(cfg);
    } else if (args.name == "vs-var") {
      cfg.axis = sgcv::SweepAxis::noise_variance;
      cfg.window_len = args.n > 0 ? args.n : 6;
      if (args.vars.empty()) {
        for (int d = 1; d <= 10; ++d) cfg.axis_values.push_back(std::pow(10.0, -d));
      } else {
        cfg.axis_values = args.vars;
      }
      report = sgcv::run_detection_vs_variance(cfg);
    } else {
      cfg.mixture = true;
      cfg.window_len = args.n > 0 ? args.n : 16;
      cfg.sigma_i_sq = args.sigi2;
      if (args.axis == "pi") {
        cfg.axis = sgcv::SweepAxis::impulse_prob;
        cfg.axis_values = args.pi_values.empty()
                              ? std::vector<double>{0.0, 0.01, 0.05, 0.1}
                              : args.pi_values;
      } else if (args.axis == "n") {
        cfg.axis = sgcv::SweepAxis::window_len;
        cfg.p_i = args.pi_values.empty() ? 0.1 : args.pi_values.front();
        cfg.axis_values = args.sizes.empty()
                              ? std::vector<double>{6, 8, 10, 12, 16, 20, 24, 32, 40}
                              : args.sizes;
      } else if (args.axis == "pairs") {
        cfg.axis = sgcv::SweepAxis::impulse_pair;
        cfg.pair_values = parse_pairs(
            args.pairs.empty()
                ? std::vector<std::string>{"10:0.01", "10:0.1", "100:0.01", "100:0.1"}
                : args.pairs);
      } else {
        std::cerr << "experiment: --axis must be pi, n or pairs\n";
        return 1;
      }
      report = sgcv::run_robustness_sweep(cfg);
    }
    sgcv::write_detection_csv(report, csv);
    sgcv::write_detection_json(report, json);
    print_detection_summary(report);
  } else if (args.name == "biasvar") {
    const int n = args.n > 0 ? args.n : 16;
    const double sigw2 = args.sigw2 < 0.0 ? 1.0 : args.sigw2;
    const sgcv::BiasVarianceTrace trace =
        sgcv::run_bias_variance_trace(n, args.seed, sigw2);
    sgcv::write_biasvar_csv(trace, csv);
    sgcv::write_biasvar_json(trace, json);
    std::cout << "biasvar: N=" << n << ", orders 0.." << n - 2 << ", resid "
              << sgcv::fmt(trace.resid_sq(0), "%.4g") << " -> "
              << sgcv::fmt(trace.resid_sq(n - 2), "%.4g") << "\n";
  } else {  // demo
    const double sigw2 = args.sigw2 < 0.0 ? 0.04 : args.sigw2;
    const sgcv::KinematicDemo demo = sgcv::run_kinematic_demo(
        args.window, args.pmax, args.period, sgcv::NoiseModel::gaussian(sigw2),
        args.seed);
    sgcv::write_demo_csv(demo, csv);
    sgcv::write_demo_json(demo, json);
    std::cout << "demo: " << demo.t.size() << " samples, window " << args.window
              << ", P_max " << args.pmax << "\n";
  }

  write_file(csv_path, csv.str());
  write_file(json_path, json.str());
  std::cout << "wrote " << csv_path << " and " << json_path << "\n";
  return 0;
}

int run_bench_cmd(const BenchArgs& args) {
  sgcv::BenchReport report;
  try {
    report = sgcv::run_bench(args.sizes, args.reps, args.seed);
  } catch (const std::invalid_argument& e) {
    std::cerr << "bench: " << e.what() << "\n";
    return 1;
  } catch (const std::runtime_error& e) {
    std::cerr << "bench: " << e.what() << "\n";
    return 4;
  }
  std::ostringstream csv;
  sgcv::write_bench_csv(report, csv);
  write_file(args.out, csv.str());
  std::cout << "bench (" << report.reps << " reps, seed " << report.seed << ", "
            << report.environment << ")\n";
  for (const auto& row : report.rows) {
    std::cout << "  N=" << row.n << ": conventional "
              << sgcv::fmt(row.conventional_us, "%.2f") << "us, precomputed "
              << sgcv::fmt(row.efficient_nogs_us, "%.3f") << "us ("
              << sgcv::fmt(row.speedup_nogs, "%.0f") << "x), with basis build "
              << sgcv::fmt(row.efficient_gs_us, "%.3f") << "us ("
              << sgcv::fmt(row.speedup_gs, "%.0f") << "x)\n";
  }
  std::cout << "wrote " << args.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Savitzky-Golay smoothing with N-fold CV polynomial order selection"};
  app.require_subcommand(1);

  SmoothArgs smooth_args;
  auto* smooth = app.add_subcommand("smooth", "smooth a CSV time series (t,y)");
  smooth->add_option("--input", smooth_args.input, "input CSV with header t,y[,x_true]")
      ->required();
  smooth->add_option("--window", smooth_args.window, "window length (odd)")->required();
  smooth->add_option("--pmax", smooth_args.pmax, "max polynomial order (<= window-2)")
      ->required();
  smooth->add_option("--out", smooth_args.out, "output CSV path")->required();
  smooth->add_option("--target-index", smooth_args.target_index,
                     "0-based target position in the window (default: center)");

  ExperimentArgs exp_args;
  auto* experiment =
      app.add_subcommand("experiment", "run a Monte Carlo study or demo");
  experiment->add_option("name", exp_args.name,
                         "one of: vs-n, vs-var, biasvar, robustness, demo")
      ->required();
  experiment->add_option("--trials", exp_args.trials, "Monte Carlo trials per point");
  experiment->add_option("--seed", exp_args.seed, "base seed");
  experiment->add_option("--out", exp_args.out, "output prefix (PREFIX.csv, PREFIX.json)");
  experiment->add_option("--sizes", exp_args.sizes, "window lengths")->delimiter(',');
  experiment->add_option("--vars", exp_args.vars, "noise variances")->delimiter(',');
  experiment->add_option("--pi", exp_args.pi_values, "impulse probabilities")
      ->delimiter(',');
  experiment->add_option("--pairs", exp_args.pairs, "sigma_i_sq:p_i pairs")
      ->delimiter(',');
  experiment->add_option("--axis", exp_args.axis, "robustness axis: pi, n or pairs");
  experiment->add_option("--n", exp_args.n, "fixed window length");
  experiment->add_option("--sigw2", exp_args.sigw2, "nominal noise variance");
  experiment->add_option("--sigi2", exp_args.sigi2, "impulsive noise variance");
  experiment->add_option("--window", exp_args.window, "demo window length (odd)");
  experiment->add_option("--pmax", exp_args.pmax, "demo max order");
  experiment->add_option("--period", exp_args.period, "demo sampling period");

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "time conventional vs recursive CV");
  bench->add_option("--sizes", bench_args.sizes, "window lengths (>= 5)")
      ->delimiter(',');
  bench->add_option("--reps", bench_args.reps, "repetitions per median");
  bench->add_option("--seed", bench_args.seed, "input seed");
  bench->add_option("--out", bench_args.out, "output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (smooth->parsed()) return run_smooth(smooth_args);
    if (experiment->parsed()) return run_experiment(exp_args);
    if (bench->parsed()) return run_bench_cmd(bench_args);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
