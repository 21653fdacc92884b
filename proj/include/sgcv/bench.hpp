#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgcv/design.hpp"
#include "sgcv/rng.hpp"
#include "sgcv/select.hpp"

namespace sgcv {

struct BenchRow {
  int n = 0;
  double conventional_us = 0.0;
  double efficient_nogs_us = 0.0;  // precomputed basis
  double efficient_gs_us = 0.0;    // basis rebuilt per call
  double speedup_nogs = 0.0;
  double speedup_gs = 0.0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  int reps = 0;
  std::uint64_t seed = 0;
  std::string environment;
};

namespace detail {

inline void keep(double v) {
#if defined(__GNUC__) || defined(__clang__)
  asm volatile("" : : "g"(v) : "memory");
#else
  static volatile double sink;
  sink = v;
#endif
}

/// Median per-call time in microseconds over `reps` measurements. Calls are
/// batched until one measurement spans at least ~20us so the timer
/// resolution cannot dominate the smallest kernels.
template <typename F>
double median_call_us(F&& fn, int reps) {
  using clock = std::chrono::steady_clock;

  for (int i = 0; i < 3; ++i) fn();  // warm-up

  auto t0 = clock::now();
  fn();
  auto t1 = clock::now();
  double once = std::chrono::duration<double, std::micro>(t1 - t0).count();
  int batch = 1;
  if (once < 20.0) {
    batch = static_cast<int>(std::ceil(20.0 / std::max(once, 1e-3)));
    batch = std::min(batch, 1 << 20);
  }

  std::vector<double> samples(reps);
  for (int r = 0; r < reps; ++r) {
    t0 = clock::now();
    for (int b = 0; b < batch; ++b) fn();
    t1 = clock::now();
    samples[r] =
        std::chrono::duration<double, std::micro>(t1 - t0).count() / batch;
  }
  auto mid = samples.begin() + samples.size() / 2;
  std::nth_element(samples.begin(), mid, samples.end());
  return *mid;
}

inline bool tpe_matches(const SelectionResult& a, const SelectionResult& b,
                        double rel_tol) {
  if (a.num_scored_orders != b.num_scored_orders) return false;
  if (a.tpe_by_order.size() != b.tpe_by_order.size()) return false;
  for (int p = 0; p < a.num_scored_orders; ++p) {
    const double x = a.tpe_by_order(p);
    const double y = b.tpe_by_order(p);
    const double scale = std::max({std::abs(x), std::abs(y), 1e-300});
    if (std::abs(x - y) > rel_tol * scale) return false;
  }
  return true;
}

}  // namespace detail

/// Times the conventional per-fold CV against the order-recursive
/// implementation, with and without the basis build, on identical seeded
/// inputs at P_max = N-2. Both implementations are first cross-validated for
/// equality on every benchmark input; timing mismatched implementations
/// would be meaningless, so that raises an error instead.
inline BenchReport run_bench(const std::vector<int>& sizes, int reps,
                             std::uint64_t seed) {
  if (sizes.empty()) throw std::invalid_argument("run_bench: no sizes");
  for (int n : sizes) {
    if (n < 5) throw std::invalid_argument("run_bench: sizes must be >= 5");
  }
  if (reps < 1) throw std::invalid_argument("run_bench: reps must be >= 1");

  BenchReport report;
  report.reps = reps;
  report.seed = seed;
  report.environment = std::string("g++ ") + __VERSION__ + ", steady_clock, single-threaded";

  for (int n : sizes) {
    const DesignSpec spec(n, n - 2);
    const NestedBasis basis = build_nested_basis(spec);

    CounterRng rng(substream_seed(seed, static_cast<std::uint64_t>(n)));
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = rng.next_normal();

    const SelectionResult efficient = select_order_cv(x, basis);
    const SelectionResult conventional = conventional_cv(x, spec);
    if (!detail::tpe_matches(efficient, conventional, 1e-9)) {
      throw std::runtime_error(
          "run_bench: implementations disagree at N = " + std::to_string(n));
    }

    BenchRow row;
    row.n = n;
    row.conventional_us = detail::median_call_us(
        [&] { detail::keep(conventional_cv(x, spec).tpe_by_order(0)); }, reps);
    row.efficient_gs_us = detail::median_call_us(
        [&] {
          const NestedBasis fresh = build_nested_basis(spec);
          detail::keep(select_order_cv(x, fresh).tpe_by_order(0));
        },
        reps);
    {
      SelectionScratch scratch;
      SelectionResult out;
      row.efficient_nogs_us = detail::median_call_us(
          [&] {
            select_order_cv(x, basis, scratch, out);
            detail::keep(out.tpe_by_order(0));
          },
          reps);
    }
    row.speedup_nogs = row.conventional_us / row.efficient_nogs_us;
    row.speedup_gs = row.conventional_us / row.efficient_gs_us;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace sgcv
