#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

#include "sgcv/design.hpp"
#include "sgcv/errors.hpp"

namespace sgcv {

/// Below this leverage gap (1 - [P]_kk) the smoother-to-predictor conversion
/// amplifies round-off beyond usable precision and is refused.
inline constexpr double kPredictorLeverageTol = 1e-10;

/// All N smoothing filters of one order, column k targeting sample k. The
/// coefficient matrix is exactly the projector, so it is symmetric and each
/// column reproduces degree-<=order polynomials at its target.
struct SmootherBank {
  Eigen::MatrixXd coefficients;  // N x N, column k = h^s_k
  int order = 0;
};

inline SmootherBank make_smoother_bank(const NestedBasis& basis, int order) {
  return SmootherBank{basis.projection_matrix(order), order};
}

inline SmootherBank make_smoother_bank(const DesignSpec& spec, int order) {
  return make_smoother_bank(build_nested_basis(spec), order);
}

/// Smoothing filter for one target sample (column target_index of the
/// projector). target_index is 0-based.
inline Eigen::VectorXd make_smoother(const NestedBasis& basis, int order,
                                     int target_index) {
  return basis.smoother(order, target_index);
}

inline Eigen::VectorXd make_smoother(const DesignSpec& spec, int order,
                                     int target_index) {
  return build_nested_basis(spec).smoother(order, target_index);
}

/// Leave-one-out prediction filter for one sample. Entry target_index is
/// identically zero: the filter predicts x_k from the other N-1 samples, and
/// reproduces any polynomial of degree <= order exactly.
struct PredictorFilter {
  Eigen::VectorXd coefficients;  // length N, coefficients(target_index) == 0
  int target_index = 0;
  int order = 0;

  double predict(const Eigen::VectorXd& x) const { return coefficients.dot(x); }
};

namespace detail {

inline void check_predictor_args(const DesignSpec& spec, int order, int target_index) {
  if (order >= spec.window_len() - 1) {
    throw singular_system_error(
        "predictor: order " + std::to_string(order) + " leaves too few training "
        "samples in a window of " + std::to_string(spec.window_len()));
  }
  if (order < 0 || order > spec.max_order()) {
    throw std::invalid_argument("predictor: order out of range");
  }
  if (target_index < 0 || target_index >= spec.window_len()) {
    throw std::invalid_argument("predictor: target index out of range");
  }
}

}  // namespace detail

/// Predictor built from scratch as the minimum-norm solution of the
/// column-deleted constraint system (the right-hand side keeps the deleted
/// column of the full design matrix).
inline PredictorFilter make_predictor_direct(const DesignSpec& spec, int order,
                                             int target_index) {
  detail::check_predictor_args(spec, order, target_index);
  const int n = spec.window_len();
  const Eigen::VectorXd s = spec.scaled_nodes();

  Eigen::MatrixXd a(order + 1, n);
  a.row(0).setOnes();
  for (int r = 1; r <= order; ++r) {
    a.row(r) = a.row(r - 1).cwiseProduct(s.transpose());
  }
  const Eigen::VectorXd ck = a.col(target_index);

  Eigen::MatrixXd adel(order + 1, n - 1);
  adel << a.leftCols(target_index), a.rightCols(n - 1 - target_index);

  // Minimum-norm solution of the underdetermined system adel * h = ck.
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(adel);
  const Eigen::VectorXd hdel = cod.solve(ck);

  Eigen::VectorXd h(n);
  h.head(target_index) = hdel.head(target_index);
  h(target_index) = 0.0;
  h.tail(n - 1 - target_index) = hdel.tail(n - 1 - target_index);
  return PredictorFilter{std::move(h), target_index, order};
}

/// Predictor from the smoother and its leverage:
///   h^p_k = h^s_k / (1 - [P]_kk) - [P]_kk / (1 - [P]_kk) e_k.
/// This is the identity that makes N-fold CV cheap; it matches the direct
/// construction whenever the leverage gap is not degenerate.
inline PredictorFilter make_predictor_from_smoother(const NestedBasis& basis,
                                                    int order, int target_index) {
  detail::check_predictor_args(basis.spec(), order, target_index);
  const double lev = basis.leverage(order)(target_index);
  const double gap = 1.0 - lev;
  if (gap < kPredictorLeverageTol) {
    throw degenerate_leverage_error(
        "predictor: leverage gap " + std::to_string(gap) + " at sample " +
        std::to_string(target_index) + ", order " + std::to_string(order));
  }
  Eigen::VectorXd h = basis.smoother(order, target_index) / gap;
  h(target_index) = 0.0;  // (lev - lev)/gap, made exact
  return PredictorFilter{std::move(h), target_index, order};
}

inline PredictorFilter make_predictor_from_smoother(const DesignSpec& spec,
                                                    int order, int target_index) {
  return make_predictor_from_smoother(build_nested_basis(spec), order, target_index);
}

}  // namespace sgcv
