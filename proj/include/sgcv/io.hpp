#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgcv/bench.hpp"
#include "sgcv/experiments.hpp"

namespace sgcv {

class series_format_error : public std::runtime_error {
 public:
  explicit series_format_error(const std::string& what) : std::runtime_error(what) {}
};

class series_spacing_error : public std::runtime_error {
 public:
  explicit series_spacing_error(const std::string& what) : std::runtime_error(what) {}
};

/// printf-style formatting; every writer goes through this so identical
/// values always serialize to identical bytes.
inline std::string fmt(double v, const char* spec = "%.17g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

// ---------------------------------------------------------------------------
// User time series (CSV with header: t,y[,x_true]; extra columns ignored)

struct Series {
  std::vector<double> t;
  std::vector<double> y;
  std::vector<double> x_true;  // empty when the column is absent
  bool has_truth() const { return !x_true.empty(); }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_double(const std::string& tok, int row) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0') {
    throw series_format_error("unparsable number '" + tok + "' in data row " +
                              std::to_string(row));
  }
  return v;
}

}  // namespace detail

inline Series read_series_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw series_format_error("empty file");
  const auto header = detail::split_csv_line(line);
  int col_t = -1, col_y = -1, col_truth = -1;
  for (int i = 0; i < static_cast<int>(header.size()); ++i) {
    if (header[i] == "t") col_t = i;
    else if (header[i] == "y") col_y = i;
    else if (header[i] == "x_true") col_truth = i;
  }
  if (col_t < 0 || col_y < 0) {
    throw series_format_error("header must contain columns 't' and 'y'");
  }

  Series series;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto tokens = detail::split_csv_line(line);
    const int needed = std::max(col_t, std::max(col_y, col_truth)) + 1;
    if (static_cast<int>(tokens.size()) < needed) {
      throw series_format_error("short data row " + std::to_string(row));
    }
    series.t.push_back(detail::parse_double(tokens[col_t], row));
    series.y.push_back(detail::parse_double(tokens[col_y], row));
    if (col_truth >= 0) {
      series.x_true.push_back(detail::parse_double(tokens[col_truth], row));
    }
  }
  if (series.t.empty()) throw series_format_error("no data rows");
  return series;
}

inline Series read_series_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw series_format_error("cannot open '" + path + "'");
  return read_series_csv(in);
}

/// Windowed smoothing needs uniform, strictly increasing abscissas and at
/// least one full window of rows.
inline void validate_series_for_smoothing(const Series& series, int window_len) {
  const int rows = static_cast<int>(series.t.size());
  if (rows < window_len) {
    throw series_spacing_error("series shorter than the processing window");
  }
  for (int i = 0; i + 1 < rows; ++i) {
    if (!(series.t[i] < series.t[i + 1])) {
      throw series_spacing_error("t must be strictly increasing");
    }
  }
  const double dt = series.t[1] - series.t[0];
  for (int i = 1; i + 1 < rows; ++i) {
    const double step = series.t[i + 1] - series.t[i];
    if (std::abs(step - dt) > 1e-9 * std::abs(dt)) {
      throw series_spacing_error("non-uniform sample spacing");
    }
  }
}

// ---------------------------------------------------------------------------
// Report serialization. CSV carries the plot-ready columns; JSON carries the
// full report including histograms.

inline void write_detection_csv(const ExperimentReport& report, std::ostream& out) {
  out << "axis_value,method,prob,stderr,trials\n";
  for (const auto& point : report.points) {
    for (const auto& stats : point.methods) {
      out << point.axis_text << ',' << method_name(stats.method) << ','
          << fmt(stats.prob, "%.6f") << ',' << fmt(stats.stderr_value, "%.6f")
          << ',' << point.trials << '\n';
    }
  }
}

inline nlohmann::ordered_json noise_to_json(const NoiseModel& noise) {
  nlohmann::ordered_json j;
  j["kind"] = noise.kind == NoiseModel::Kind::gaussian ? "gaussian" : "mixture";
  j["sigma_w_sq"] = noise.sigma_w_sq;
  if (noise.kind == NoiseModel::Kind::mixture) {
    j["sigma_i_sq"] = noise.sigma_i_sq;
    j["p_i"] = noise.p_i;
  }
  return j;
}

inline void write_detection_json(const ExperimentReport& report, std::ostream& out) {
  nlohmann::ordered_json j;
  j["experiment"] = report.experiment;
  j["axis"] = report.axis_name;
  j["seed"] = report.base_seed;
  j["trials"] = report.trials;
  j["true_order"] = report.true_order;
  j["points"] = nlohmann::ordered_json::array();
  for (const auto& point : report.points) {
    nlohmann::ordered_json jp;
    jp["axis_value"] = point.axis_text;
    jp["window_len"] = point.window_len;
    jp["noise"] = noise_to_json(point.noise);
    jp["methods"] = nlohmann::ordered_json::array();
    for (const auto& stats : point.methods) {
      nlohmann::ordered_json jm;
      jm["method"] = method_name(stats.method);
      jm["prob"] = stats.prob;
      jm["stderr"] = stats.stderr_value;
      jm["histogram"] = stats.histogram;
      jp["methods"].push_back(std::move(jm));
    }
    j["points"].push_back(std::move(jp));
  }
  out << j.dump(2) << '\n';
}

inline void write_biasvar_csv(const BiasVarianceTrace& trace, std::ostream& out) {
  out << "order,resid_sq,mean_gamma,tpe\n";
  for (int p = 0; p < trace.resid_sq.size(); ++p) {
    out << p << ',' << fmt(trace.resid_sq(p), "%.10e") << ','
        << fmt(trace.mean_gamma(p), "%.10e") << ',' << fmt(trace.tpe(p), "%.10e")
        << '\n';
  }
}

inline void write_biasvar_json(const BiasVarianceTrace& trace, std::ostream& out) {
  nlohmann::ordered_json j;
  j["experiment"] = "biasvar";
  j["window_len"] = trace.window_len;
  j["resid_sq"] = std::vector<double>(trace.resid_sq.begin(), trace.resid_sq.end());
  j["mean_gamma"] =
      std::vector<double>(trace.mean_gamma.begin(), trace.mean_gamma.end());
  j["tpe"] = std::vector<double>(trace.tpe.begin(), trace.tpe.end());
  out << j.dump(2) << '\n';
}

inline void write_demo_csv(const KinematicDemo& demo, std::ostream& out) {
  out << "t,y,x_true,order,y_smooth\n";
  for (int i = 0; i < demo.t.size(); ++i) {
    out << fmt(demo.t(i), "%.10g") << ',' << fmt(demo.y(i), "%.10g") << ','
        << fmt(demo.x_true(i), "%.10g") << ',';
    if (demo.order[i] >= 0) {
      out << demo.order[i] << ',' << fmt(demo.y_smooth(i), "%.10g");
    } else {
      out << ',';  // edge sample: no full window
    }
    out << '\n';
  }
}

inline void write_demo_json(const KinematicDemo& demo, std::ostream& out) {
  nlohmann::ordered_json j;
  j["experiment"] = "demo";
  j["window_len"] = demo.window_len;
  j["p_max"] = demo.p_max;
  j["samples"] = nlohmann::ordered_json::array();
  for (int i = 0; i < demo.t.size(); ++i) {
    nlohmann::ordered_json js;
    js["t"] = demo.t(i);
    js["y"] = demo.y(i);
    js["x_true"] = demo.x_true(i);
    if (demo.order[i] >= 0) {
      js["order"] = demo.order[i];
      js["y_smooth"] = demo.y_smooth(i);
    } else {
      js["order"] = nullptr;
      js["y_smooth"] = nullptr;
    }
    j["samples"].push_back(std::move(js));
  }
  out << j.dump(2) << '\n';
}

inline void write_bench_csv(const BenchReport& report, std::ostream& out) {
  out << "N,conventional_us,efficient_nogs_us,efficient_gs_us,speedup_nogs,speedup_gs\n";
  for (const auto& row : report.rows) {
    out << row.n << ',' << fmt(row.conventional_us, "%.4f") << ','
        << fmt(row.efficient_nogs_us, "%.4f") << ','
        << fmt(row.efficient_gs_us, "%.4f") << ','
        << fmt(row.speedup_nogs, "%.2f") << ',' << fmt(row.speedup_gs, "%.2f")
        << '\n';
  }
}

}  // namespace sgcv
