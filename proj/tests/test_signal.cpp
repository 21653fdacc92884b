#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "sgcv/signal.hpp"

using sgcv::NoiseModel;

TEST_CASE("cubic sampling grids follow the interval convention") {
  SECTION("odd N is symmetric") {
    const Eigen::VectorXd g = sgcv::cubic_grid(3);
    CHECK(g(0) == -1.0);
    CHECK(g(1) == 0.0);
    CHECK(g(2) == 1.0);
    const Eigen::VectorXd x = sgcv::sample_cubic(3);
    CHECK(x(0) == Catch::Approx(0.99).margin(1e-15));
    CHECK(x(1) == 1.0);
    CHECK(x(2) == Catch::Approx(1.01).margin(1e-15));
  }
  SECTION("even N leans left") {
    const Eigen::VectorXd g = sgcv::cubic_grid(4);
    CHECK(g(0) == -2.0);
    CHECK(g(3) == 1.0);
    const Eigen::VectorXd x6 = sgcv::sample_cubic(6);
    CHECK(x6(1) == Catch::Approx(1.0 - 0.08).margin(1e-15));  // n = -2
    CHECK(x6(5) == Catch::Approx(1.0 + 0.08).margin(1e-15));  // n = +2
  }
  CHECK_THROWS_AS(sgcv::sample_cubic(2), std::invalid_argument);
}

TEST_CASE("kinematic trajectory hits the stated waypoints") {
  CHECK(sgcv::sample_kinematic(0.0) == 0.0);
  CHECK(sgcv::sample_kinematic(6.0) == 6.0);
  CHECK(sgcv::sample_kinematic(10.0) == Catch::Approx(9.0).margin(1e-14));
  CHECK(sgcv::sample_kinematic(14.0) == Catch::Approx(10.0).margin(1e-14));
  CHECK(sgcv::sample_kinematic(20.0) == 10.0);

  // C^1 joins at the segment boundaries
  const double h = 1e-6;
  for (double t0 : {6.0, 14.0}) {
    const double left = (sgcv::sample_kinematic(t0) - sgcv::sample_kinematic(t0 - h)) / h;
    const double right = (sgcv::sample_kinematic(t0 + h) - sgcv::sample_kinematic(t0)) / h;
    CHECK(std::abs(left - right) <= 1e-4);
  }

  CHECK_THROWS_AS(sgcv::sample_kinematic(-0.1), std::domain_error);
  CHECK_THROWS_AS(sgcv::sample_kinematic(20.1), std::domain_error);
}

TEST_CASE("noise model validation") {
  CHECK_THROWS_AS(NoiseModel::gaussian(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(NoiseModel::mixture(1.0, 0.5, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(NoiseModel::mixture(1.0, 10.0, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(NoiseModel::mixture(1.0, 10.0, -0.1), std::invalid_argument);
  CHECK(NoiseModel::mixture(1.0, 10.0, 0.1).total_variance() ==
        Catch::Approx(1.9).epsilon(1e-14));
}

TEST_CASE("noise draws are deterministic and seed-split") {
  const NoiseModel model = NoiseModel::gaussian(1.0);
  const Eigen::VectorXd a = sgcv::draw_noise(model, 100, 42);
  const Eigen::VectorXd b = sgcv::draw_noise(model, 100, 42);
  CHECK((a.array() == b.array()).all());  // bit identical
  const Eigen::VectorXd c = sgcv::draw_noise(model, 100, 43);
  CHECK((a.array() != c.array()).any());

  std::set<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 1000; ++i) seeds.insert(sgcv::substream_seed(7, i));
  CHECK(seeds.size() == 1000);
}

TEST_CASE("degenerate noise settings") {
  const Eigen::VectorXd z = sgcv::draw_noise(NoiseModel::gaussian(0.0), 50, 9);
  CHECK(z.cwiseAbs().maxCoeff() == 0.0);

  // p_i = 0 mixture must reproduce the pure Gaussian stream bit for bit
  const Eigen::VectorXd g = sgcv::draw_noise(NoiseModel::gaussian(2.5), 200, 11);
  const Eigen::VectorXd m = sgcv::draw_noise(NoiseModel::mixture(2.5, 25.0, 0.0), 200, 11);
  CHECK((g.array() == m.array()).all());
}

TEST_CASE("noise moments match the model") {
  const int n = 1'000'000;
  SECTION("pure Gaussian") {
    const Eigen::VectorXd w = sgcv::draw_noise(NoiseModel::gaussian(1.0), n, 2718);
    const double mean = w.mean();
    const double var = (w.array() - mean).square().sum() / (n - 1);
    CHECK(std::abs(mean) <= 0.005);
    CHECK(std::abs(var - 1.0) <= 0.01);
  }
  SECTION("two-component mixture") {
    const Eigen::VectorXd w =
        sgcv::draw_noise(NoiseModel::mixture(1.0, 10.0, 0.1), n, 314159);
    const double mean = w.mean();
    const double var = (w.array() - mean).square().sum() / (n - 1);
    CHECK(std::abs(var - 1.9) <= 0.02 * 1.9);
  }
}

TEST_CASE("signal spec evaluation") {
  sgcv::SignalSpec cubic;
  CHECK(cubic.eval(2.0) == Catch::Approx(0.01 * 8 + 1.0).epsilon(1e-14));

  sgcv::SignalSpec kin;
  kin.kind = sgcv::SignalSpec::Kind::kinematic;
  CHECK(kin.eval(10.0) == sgcv::sample_kinematic(10.0));

  sgcv::SignalSpec custom;
  custom.kind = sgcv::SignalSpec::Kind::custom;
  custom.custom_coeffs = {1.0, -2.0, 0.5};  // 1 - 2t + 0.5 t^2
  CHECK(custom.eval(3.0) == Catch::Approx(1.0 - 6.0 + 4.5).epsilon(1e-14));
}
