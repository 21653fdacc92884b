#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "sgcv/errors.hpp"

namespace sgcv {

/// Hard cap on the processing window length. Beyond desk scale the monomial
/// column spaces become too ill-conditioned for the explicit oracles used in
/// the test suite (those cap at N = 24), and the high orders of very long
/// windows are unscorable anyway.
inline constexpr int kMaxWindowLen = 512;

/// Sample geometry of one SG processing window: N node abscissas plus the
/// largest polynomial order that will be requested from it.
///
/// Nodes default to 1..N with unit spacing. Arbitrary strictly increasing
/// nodes are accepted (the order-selection identity does not require uniform
/// spacing) but should be considered experimental.
class DesignSpec {
 public:
  DesignSpec(int window_len, int max_order)
      : DesignSpec(window_len, max_order, default_nodes(window_len)) {}

  DesignSpec(int window_len, int max_order, Eigen::VectorXd nodes)
      : window_len_(window_len), max_order_(max_order), nodes_(std::move(nodes)) {
    if (window_len_ < 3 || window_len_ > kMaxWindowLen) {
      throw std::invalid_argument("DesignSpec: window_len must be in [3, " +
                                  std::to_string(kMaxWindowLen) + "]");
    }
    if (max_order_ < 0 || max_order_ > window_len_ - 2) {
      throw std::invalid_argument("DesignSpec: max_order must be in [0, window_len-2]");
    }
    if (nodes_.size() != window_len_) {
      throw std::invalid_argument("DesignSpec: nodes length must equal window_len");
    }
    for (int i = 0; i + 1 < window_len_; ++i) {
      if (!(nodes_(i) < nodes_(i + 1))) {
        throw std::invalid_argument("DesignSpec: nodes must be strictly increasing");
      }
    }
  }

  int window_len() const { return window_len_; }
  int max_order() const { return max_order_; }
  const Eigen::VectorXd& nodes() const { return nodes_; }

  /// Nodes mapped affinely onto [-1, 1]. All projector-level quantities are
  /// invariant under this map, and the orthonormalization is far better
  /// conditioned there than on raw 1..N abscissas.
  Eigen::VectorXd scaled_nodes() const {
    const double lo = nodes_(0);
    const double hi = nodes_(window_len_ - 1);
    return ((2.0 / (hi - lo)) * (nodes_.array() - lo) - 1.0).matrix();
  }

 private:
  static Eigen::VectorXd default_nodes(int n) {
    return Eigen::VectorXd::LinSpaced(n > 0 ? n : 1, 1.0, static_cast<double>(n));
  }

  int window_len_;
  int max_order_;
  Eigen::VectorXd nodes_;
};

/// The (order+1) x N constraint matrix: row r holds the nodes raised to the
/// power r. This is the textbook form on the raw abscissas; production
/// code goes through NestedBasis instead.
inline Eigen::MatrixXd build_design_matrix(const DesignSpec& spec, int order) {
  if (order < 0 || order > spec.max_order()) {
    throw std::invalid_argument("build_design_matrix: order out of range");
  }
  const int n = spec.window_len();
  Eigen::MatrixXd a(order + 1, n);
  a.row(0).setOnes();
  for (int r = 1; r <= order; ++r) {
    a.row(r) = a.row(r - 1).cwiseProduct(spec.nodes().transpose());
  }
  return a;
}

/// Orthonormal columns q_0..q_Pmax spanning the nested polynomial subspaces
/// of one window, with the cumulative leverage (projector diagonal) of every
/// order. Immutable once built; safe to share across threads.
///
/// Column p of leverage_by_order() is diag(Q_{0..p} Q_{0..p}^T), i.e. the
/// leverages of the degree-<=p fit. Degrees are never pivoted, so
/// span(q_0..q_p) equals the span of the monomial samples of degree <= p for
/// every p.
class NestedBasis {
 public:
  NestedBasis(DesignSpec spec, Eigen::MatrixXd q, Eigen::MatrixXd leverage)
      : spec_(std::move(spec)), q_(std::move(q)), leverage_(std::move(leverage)),
        min_gap_(q_.cols()) {
    for (int p = 0; p < q_.cols(); ++p) {
      min_gap_(p) = (1.0 - leverage_.col(p).array()).minCoeff();
    }
  }

  const DesignSpec& spec() const { return spec_; }
  int window_len() const { return spec_.window_len(); }
  int max_order() const { return spec_.max_order(); }

  const Eigen::MatrixXd& q_columns() const { return q_; }
  const Eigen::MatrixXd& leverage_by_order() const { return leverage_; }

  /// Leverage vector diag(P) for one order.
  Eigen::VectorXd leverage(int order) const {
    check_order(order);
    return leverage_.col(order);
  }

  /// Smallest 1 - [P]_kk over k at the given order. This is the quantity
  /// that decides whether the leave-one-out identity is numerically usable.
  double min_leverage_gap(int order) const {
    check_order(order);
    return min_gap_(order);
  }

  /// N x N orthogonal projector onto polynomials of degree <= order.
  Eigen::MatrixXd projection_matrix(int order) const {
    check_order(order);
    const auto q1 = q_.leftCols(order + 1);
    return q1 * q1.transpose();
  }

  /// Column k of the projector: the smoothing filter targeting sample k.
  Eigen::VectorXd smoother(int order, int target_index) const {
    check_order(order);
    check_index(target_index);
    const auto q1 = q_.leftCols(order + 1);
    return q1 * q1.row(target_index).transpose();
  }

  /// Projection of x onto degree <= order, evaluated at one sample.
  double project_at(const Eigen::VectorXd& x, int order, int target_index) const {
    check_order(order);
    check_index(target_index);
    const auto q1 = q_.leftCols(order + 1);
    return q1.row(target_index).dot(q1.transpose() * x);
  }

 private:
  void check_order(int order) const {
    if (order < 0 || order > max_order()) {
      throw std::invalid_argument("NestedBasis: order out of range");
    }
  }
  void check_index(int k) const {
    if (k < 0 || k >= window_len()) {
      throw std::invalid_argument("NestedBasis: sample index out of range");
    }
  }

  DesignSpec spec_;
  Eigen::MatrixXd q_;
  Eigen::MatrixXd leverage_;
  Eigen::VectorXd min_gap_;
};

/// Householder QR of the scaled design matrix transpose, without pivoting so
/// the projection spaces stay nested in polynomial degree. Column signs are
/// normalized to a positive leading coefficient (diag(R) > 0).
inline NestedBasis build_nested_basis(const DesignSpec& spec) {
  const int n = spec.window_len();
  const int cols = spec.max_order() + 1;
  const Eigen::VectorXd s = spec.scaled_nodes();

  Eigen::MatrixXd vbasis(n, cols);
  vbasis.col(0).setOnes();
  for (int j = 1; j < cols; ++j) {
    vbasis.col(j) = vbasis.col(j - 1).cwiseProduct(s);
  }

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(vbasis);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, cols);
  const Eigen::VectorXd rdiag = qr.matrixQR().diagonal().head(cols);
  for (int j = 0; j < cols; ++j) {
    if (rdiag(j) < 0.0) q.col(j) = -q.col(j);
  }

  Eigen::MatrixXd leverage(n, cols);
  leverage.col(0) = q.col(0).cwiseAbs2();
  for (int j = 1; j < cols; ++j) {
    leverage.col(j) = leverage.col(j - 1) + q.col(j).cwiseAbs2();
  }
  // Leverages are strictly below 1 in exact arithmetic (the projector rank is
  // at most N-1); keep the computed values on the right side of that bound.
  const double cap = std::nextafter(1.0, 0.0);
  leverage = leverage.cwiseMin(cap);

  return NestedBasis(spec, std::move(q), std::move(leverage));
}

/// Projector onto polynomials of degree <= order over the window nodes.
inline Eigen::MatrixXd projection_matrix(const DesignSpec& spec, int order) {
  if (order < 0 || order > spec.max_order()) {
    throw std::invalid_argument("projection_matrix: order out of range");
  }
  return build_nested_basis(spec).projection_matrix(order);
}

}  // namespace sgcv
