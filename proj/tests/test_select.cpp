#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "sgcv/design.hpp"
#include "sgcv/select.hpp"
#include "sgcv/signal.hpp"
#include "oracles.hpp"

using sgcv::DesignSpec;
using sgcv::NestedBasis;
using sgcv::SelectionResult;

namespace {

Eigen::VectorXd quadratic_table_data() {
  Eigen::VectorXd x(5);
  x << 25, 4, -3, 4, 25;
  return x;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("5-fold CV walk-through on the quadratic window") {
  const DesignSpec spec(5, 2);
  const NestedBasis basis = sgcv::build_nested_basis(spec);
  const Eigen::VectorXd x = quadratic_table_data();

  const SelectionResult sel = sgcv::select_order_cv(x, basis);
  REQUIRE(sel.tpe_by_order.size() == 3);

  // order 0, fold 0: mean of the others is 15/2, error 35/2, and the
  // leverage weight is gamma = 1/(1 - 1/5)
  CHECK(sel.gamma_by_order(0, 0) == Catch::Approx(1.25).epsilon(1e-14));
  const double eps0 = x(0) - 11.0;  // residual against the window mean
  CHECK(sel.gamma_by_order(0, 0) * eps0 == Catch::Approx(17.5).margin(1e-12));

  CHECK(sel.tpe_by_order(0) == Catch::Approx(1071.875).margin(1e-9));
  CHECK(sel.tpe_by_order(2) == 0.0);  // quadratic data, exactly in subspace
  CHECK(sel.best_order == 2);

  // brute-force refit oracle confirms the scored orders
  CHECK(sel.tpe_by_order(0) ==
        Catch::Approx(oracles::fold_refit_tpe(x, spec, 0)).epsilon(1e-10));
  CHECK(sel.tpe_by_order(1) ==
        Catch::Approx(oracles::fold_refit_tpe(x, spec, 1)).epsilon(1e-10));
}

TEST_CASE("constant input selects order zero with zero score") {
  const NestedBasis basis = sgcv::build_nested_basis(DesignSpec(6, 4));
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(6, 4.75);
  const SelectionResult sel = sgcv::select_order_cv(x, basis);
  CHECK(sel.tpe_by_order(0) == 0.0);
  CHECK(sel.best_order == 0);

  const auto [value, order] = sgcv::smooth_with_selected_order(x, basis, 3);
  CHECK(order == 0);
  CHECK(value == Catch::Approx(4.75).margin(1e-12));
}

TEST_CASE("noiseless cubic zeroes every order from three up") {
  const DesignSpec spec(8, 6);
  const NestedBasis basis = sgcv::build_nested_basis(spec);
  const Eigen::VectorXd x0 = sgcv::sample_cubic(8);
  // shift onto the window nodes: values are the same cubic samples
  const SelectionResult sel = sgcv::select_order_cv(x0, basis);
  for (int p = 3; p <= 6; ++p) CHECK(sel.tpe_by_order(p) == 0.0);
  CHECK(sel.tpe_by_order(2) > 0.0);
  CHECK(sel.best_order == 3);

  const SelectionResult conv = sgcv::conventional_cv(x0, spec);
  for (int p = 3; p <= 6; ++p) CHECK(conv.tpe_by_order(p) == 0.0);
  CHECK(conv.best_order == 3);
}

TEST_CASE("noiseless line ties break to the smaller order") {
  const NestedBasis basis = sgcv::build_nested_basis(DesignSpec(7, 5));
  Eigen::VectorXd x(7);
  for (int i = 0; i < 7; ++i) x(i) = 3.0 * (i + 1) - 2.0;
  const SelectionResult sel = sgcv::select_order_cv(x, basis);
  CHECK(sel.best_order == 1);
  for (int p = 1; p <= 5; ++p) CHECK(sel.tpe_by_order(p) == 0.0);
}

TEST_CASE("recursive and conventional CV agree on random inputs") {
  sgcv::CounterRng rng(2024);
  double worst = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 5 + static_cast<int>(rng.next_u64() % 8);  // 5..12
    const int pmax = static_cast<int>(rng.next_u64() % (n - 1));
    const double scale = std::pow(10.0, static_cast<double>(
                                            static_cast<int>(rng.next_u64() % 7)) - 3);
    const DesignSpec spec(n, pmax);
    const NestedBasis basis = sgcv::build_nested_basis(spec);
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = scale * rng.next_normal();

    const SelectionResult a = sgcv::select_order_cv(x, basis);
    const SelectionResult b = sgcv::conventional_cv(x, spec);
    REQUIRE(a.num_scored_orders == b.num_scored_orders);
    for (int p = 0; p < a.num_scored_orders; ++p) {
      const double denom =
          std::max({std::abs(a.tpe_by_order(p)), std::abs(b.tpe_by_order(p)), 1e-300});
      const double rel = std::abs(a.tpe_by_order(p) - b.tpe_by_order(p)) / denom;
      worst = std::max(worst, rel);
      CHECK(rel <= 1e-9);
      const double rdenom = std::max({a.residual_norm_by_order(p),
                                      b.residual_norm_by_order(p), 1e-300});
      CHECK(std::abs(a.residual_norm_by_order(p) - b.residual_norm_by_order(p)) /
                rdenom <= 1e-9);
    }
  }
  INFO("worst relative deviation " << worst);
}

TEST_CASE("scores scale quadratically and ignore constant shifts") {
  const DesignSpec spec(9, 6);
  const NestedBasis basis = sgcv::build_nested_basis(spec);
  sgcv::CounterRng rng(5);
  Eigen::VectorXd x(9);
  for (int i = 0; i < 9; ++i) x(i) = rng.next_normal();

  const SelectionResult base = sgcv::select_order_cv(x, basis);

  SECTION("scale equivariance") {
    for (double c : {4.0, -3.0, 1000.0}) {
      const SelectionResult scaled = sgcv::select_order_cv(c * x, basis);
      CHECK(scaled.best_order == base.best_order);
      for (int p = 0; p < base.num_scored_orders; ++p) {
        CHECK(scaled.tpe_by_order(p) ==
              Catch::Approx(c * c * base.tpe_by_order(p)).epsilon(1e-10));
      }
    }
  }
  SECTION("shift invariance") {
    const SelectionResult shifted =
        sgcv::select_order_cv(x.array() + 7.25, basis);
    for (int p = 0; p < base.num_scored_orders; ++p) {
      CHECK(shifted.tpe_by_order(p) ==
            Catch::Approx(base.tpe_by_order(p)).epsilon(1e-9).margin(1e-12));
    }
  }
}

TEST_CASE("gamma weights are contractive-projection reciprocals") {
  const NestedBasis basis = sgcv::build_nested_basis(DesignSpec(10, 8));
  sgcv::CounterRng rng(17);
  Eigen::VectorXd x(10);
  for (int i = 0; i < 10; ++i) x(i) = rng.next_normal();
  const SelectionResult sel = sgcv::select_order_cv(x, basis);
  for (int p = 0; p < sel.num_scored_orders; ++p) {
    for (int k = 0; k < 10; ++k) {
      CHECK(sel.gamma_by_order(k, p) > 1.0);
      if (p > 0) CHECK(sel.gamma_by_order(k, p) >= sel.gamma_by_order(k, p - 1));
    }
  }
  for (int p = 1; p < sel.tpe_by_order.size(); ++p) {
    CHECK(sel.residual_norm_by_order(p) <= sel.residual_norm_by_order(p - 1));
  }
}

TEST_CASE("degenerate tail orders are excluded, consistently in both paths") {
  // At N = 20 the leverage gap falls below 1e-5 from order 14 on.
  const DesignSpec spec(20, 18);
  const NestedBasis basis = sgcv::build_nested_basis(spec);
  sgcv::CounterRng rng(31);
  Eigen::VectorXd x(20);
  for (int i = 0; i < 20; ++i) x(i) = rng.next_normal();

  const SelectionResult sel = sgcv::select_order_cv(x, basis);
  CHECK(sel.num_scored_orders == 14);
  for (int p = 14; p <= 18; ++p) {
    CHECK(sel.tpe_by_order(p) == kInf);
    CHECK(sel.gamma_by_order(0, p) == kInf);
  }
  CHECK(sel.best_order < 14);

  const SelectionResult conv = sgcv::conventional_cv(x, spec);
  CHECK(conv.num_scored_orders == 14);
  CHECK(conv.tpe_by_order(17) == kInf);
}

TEST_CASE("tiny but genuine noise is never snapped to zero") {
  const NestedBasis basis = sgcv::build_nested_basis(DesignSpec(6, 4));
  const Eigen::VectorXd x =
      sgcv::sample_cubic(6) +
      sgcv::draw_noise(sgcv::NoiseModel::gaussian(1e-10), 6, 12345);
  const SelectionResult sel = sgcv::select_order_cv(x, basis);
  for (int p = 0; p <= 4; ++p) CHECK(sel.tpe_by_order(p) > 0.0);
}

TEST_CASE("BIC formula spot values") {
  // ||eps||^2 = 5 e^2 at N = 5, P = 1:
  // BIC_N = 4 ln 5 + 5 ln(e^2) = 4 ln 5 + 10
  CHECK(sgcv::bic_n_score(5.0 * std::exp(2.0), 5, 1) ==
        Catch::Approx(16.437751649736401).epsilon(1e-14));

  // unit mean-square residual: the data term vanishes
  for (int p : {0, 1, 2}) {
    CHECK(sgcv::bic_n_score(8.0, 8, p) ==
          Catch::Approx((p + 1.0) * (p + 1.0) * std::log(8.0)).epsilon(1e-14));
    CHECK(sgcv::bic_snr_score(8.0, 8, p) == 0.0);
  }
}

TEST_CASE("BIC on the noiseless cubic picks order three") {
  const NestedBasis basis = sgcv::build_nested_basis(DesignSpec(8, 6));
  const sgcv::BaselineScores bic = sgcv::score_bic(sgcv::sample_cubic(8), basis);
  CHECK(bic.best_order_bic_snr == 3);
  CHECK(bic.best_order_bic_n == 3);
  // the exact-fit order dominates every underfit score and is then penalized
  for (int p = 0; p < 3; ++p) {
    CHECK(bic.bic_snr_by_order(3) < bic.bic_snr_by_order(p));
  }
  CHECK(bic.bic_snr_by_order(4) > bic.bic_snr_by_order(3));
}

TEST_CASE("BIC residual floor keeps zero-residual inputs finite") {
  const NestedBasis basis = sgcv::build_nested_basis(DesignSpec(6, 4));
  Eigen::VectorXd x(6);
  for (int i = 0; i < 6; ++i) {
    const double t = i + 1.0;
    x(i) = 2.0 * t * t - 3.0 * t + 0.5;
  }
  const sgcv::BaselineScores bic = sgcv::score_bic(x, basis);
  for (int p = 0; p <= 4; ++p) {
    CHECK(std::isfinite(bic.bic_n_by_order(p)));
    CHECK(std::isfinite(bic.bic_snr_by_order(p)));
  }
  // every order >= 2 hits the floor; the smallest wins both criteria
  CHECK(bic.best_order_bic_snr == 2);
  CHECK(bic.best_order_bic_n == 2);
}

TEST_CASE("selected-order smoothing matches the conventional selection") {
  const DesignSpec spec(10, 8);
  const NestedBasis basis = sgcv::build_nested_basis(spec);
  sgcv::CounterRng rng(88);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::VectorXd y = sgcv::sample_cubic(10);
    for (int i = 0; i < 10; ++i) y(i) += 0.5 * rng.next_normal();
    const auto [value, order] = sgcv::smooth_with_selected_order(y, basis, 4);
    CHECK(order == sgcv::conventional_cv(y, spec).best_order);
    CHECK(value == Catch::Approx(basis.project_at(y, order, 4)).margin(1e-12));
  }
}

TEST_CASE("selection rejects length mismatches") {
  const NestedBasis basis = sgcv::build_nested_basis(DesignSpec(6, 3));
  CHECK_THROWS_AS(sgcv::select_order_cv(Eigen::VectorXd::Zero(5), basis),
                  std::invalid_argument);
  CHECK_THROWS_AS(sgcv::conventional_cv(Eigen::VectorXd::Zero(5), DesignSpec(6, 3)),
                  std::invalid_argument);
  CHECK_THROWS_AS(sgcv::score_bic(Eigen::VectorXd::Zero(5), basis),
                  std::invalid_argument);
}
