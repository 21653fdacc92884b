#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "sgcv/design.hpp"
#include "sgcv/errors.hpp"
#include "sgcv/filters.hpp"

namespace sgcv {

/// Orders whose smallest leverage gap min_k(1 - [P]_kk) falls below this are
/// unscorable: the CV identity divides by the gap, and below ~1e-5 the two
/// algebraically equivalent routes stop agreeing to the 1e-9 the library
/// promises. Such orders get T = +inf and are never selected. Order 0 always
/// has gap 1 - 1/N, so at least one order is scorable.
inline constexpr double kScorableGapTol = 1e-5;

/// Per-window order-selection scores.
///
/// tpe_by_order(p) is the total squared leave-one-out prediction error of the
/// degree-p model (+inf where unscorable, exactly 0 where the input lies in
/// the model subspace). residual_norm_by_order is the smoothing residual
/// ||eps^s||^2, non-increasing in p. Column p of gamma_by_order holds the
/// per-sample weights 1/(1 - [P]_kk), all > 1 and non-decreasing in p.
struct SelectionResult {
  Eigen::VectorXd tpe_by_order;
  Eigen::VectorXd residual_norm_by_order;
  Eigen::MatrixXd gamma_by_order;
  int best_order = 0;
  int num_scored_orders = 0;
};

namespace detail {

/// Bound on ||eps^s||^2 that is indistinguishable from zero: in-subspace
/// inputs leave only rounding in the residual, and the selection contract
/// wants exact zeros (and the parsimony tie-break) for them.
inline double residual_zero_bound(int n, double x_norm) {
  const double c = 64.0 * n * std::numeric_limits<double>::epsilon() * x_norm;
  return static_cast<double>(n) * c * c;
}

inline int first_min_index(const Eigen::VectorXd& v, int count = -1) {
  const int limit = count < 0 ? static_cast<int>(v.size()) : count;
  int best = 0;
  for (int i = 1; i < limit; ++i) {
    if (v(i) < v(best)) best = i;
  }
  return best;
}

}  // namespace detail

/// Scratch buffers for the selection recursion, reusable across calls so the
/// hot path does not allocate.
struct SelectionScratch {
  Eigen::VectorXd eps;
  Eigen::VectorXd eps_pred;
};

/// Order-recursive N-fold CV scan: one pass over the orthonormal columns,
/// O(N * P_max) once the basis exists.
///
/// Per order p it accumulates the projection, forms the smoothing residual,
/// rescales it by the leverage weights into the leave-one-out prediction
/// errors, and records their total square. The selected order is the
/// smallest minimizer.
inline void select_order_cv(const Eigen::VectorXd& x, const NestedBasis& basis,
                            SelectionScratch& scratch, SelectionResult& out) {
  const int n = basis.window_len();
  if (x.size() != n) {
    throw std::invalid_argument("select_order_cv: input length != window length");
  }
  const int orders = basis.max_order() + 1;
  const double inf = std::numeric_limits<double>::infinity();

  out.tpe_by_order.resize(orders);
  out.residual_norm_by_order.resize(orders);
  out.gamma_by_order.resize(n, orders);

  const Eigen::MatrixXd& q = basis.q_columns();
  const Eigen::MatrixXd& lev = basis.leverage_by_order();

  scratch.eps = x;
  scratch.eps_pred.resize(n);

  int scored = orders;
  double prev_resid = inf;
  for (int p = 0; p < orders; ++p) {
    const auto qp = q.col(p);
    scratch.eps.noalias() -= qp * qp.dot(x);

    double resid = scratch.eps.squaredNorm();
    if (resid > prev_resid) resid = prev_resid;  // nested projections shrink
    prev_resid = resid;
    out.residual_norm_by_order(p) = resid;

    if (scored > p && basis.min_leverage_gap(p) < kScorableGapTol) {
      scored = p;  // gaps only shrink with order; the tail is unscorable
    }
    if (p >= scored) {
      out.gamma_by_order.col(p).setConstant(inf);
      out.tpe_by_order(p) = inf;
      continue;
    }
    out.gamma_by_order.col(p) = (1.0 - lev.col(p).array()).inverse();
    scratch.eps_pred = scratch.eps.cwiseProduct(out.gamma_by_order.col(p));
    out.tpe_by_order(p) = scratch.eps_pred.squaredNorm();
  }
  out.num_scored_orders = scored;

  const double zero_bound = detail::residual_zero_bound(n, x.norm());
  for (int p = 0; p < orders; ++p) {
    if (out.residual_norm_by_order(p) <= zero_bound) {
      out.residual_norm_by_order(p) = 0.0;
    }
    if (p < scored) {
      const double gap = basis.min_leverage_gap(p);
      if (out.tpe_by_order(p) <= zero_bound / (gap * gap)) {
        out.tpe_by_order(p) = 0.0;
      }
    }
  }

  out.best_order = detail::first_min_index(out.tpe_by_order, scored);
}

inline SelectionResult select_order_cv(const Eigen::VectorXd& x,
                                       const NestedBasis& basis) {
  SelectionScratch scratch;
  SelectionResult out;
  select_order_cv(x, basis, scratch, out);
  return out;
}

/// Reference N-fold CV: for every order and every fold, rebuild the
/// column-deleted constraint system from scratch and solve it by minimum
/// norm. O(N^5) over the full order range; kept as the oracle and benchmark
/// baseline for the recursive implementation. Semantics (exclusion rule,
/// zero snap, tie-break) match select_order_cv.
inline SelectionResult conventional_cv(const Eigen::VectorXd& x,
                                       const DesignSpec& spec) {
  const int n = spec.window_len();
  if (x.size() != n) {
    throw std::invalid_argument("conventional_cv: input length != window length");
  }
  const int orders = spec.max_order() + 1;
  const double inf = std::numeric_limits<double>::infinity();
  const double cap = std::nextafter(1.0, 0.0);
  const Eigen::VectorXd s = spec.scaled_nodes();

  Eigen::MatrixXd vbasis(n, orders);
  vbasis.col(0).setOnes();
  for (int j = 1; j < orders; ++j) {
    vbasis.col(j) = vbasis.col(j - 1).cwiseProduct(s);
  }

  SelectionResult out;
  out.tpe_by_order.resize(orders);
  out.residual_norm_by_order.resize(orders);
  out.gamma_by_order.resize(n, orders);
  Eigen::VectorXd min_gap(orders);

  int scored = orders;
  double prev_resid = inf;
  for (int p = 0; p < orders; ++p) {
    const auto vp = vbasis.leftCols(p + 1);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(vp);
    const Eigen::MatrixXd thin_q =
        qr.householderQ() * Eigen::MatrixXd::Identity(n, p + 1);

    const Eigen::VectorXd leverage =
        thin_q.rowwise().squaredNorm().cwiseMin(cap);
    const Eigen::VectorXd gaps = 1.0 - leverage.array();
    min_gap(p) = gaps.minCoeff();

    double resid = (x - thin_q * (thin_q.transpose() * x)).squaredNorm();
    if (resid > prev_resid) resid = prev_resid;
    prev_resid = resid;
    out.residual_norm_by_order(p) = resid;

    if (scored > p && min_gap(p) < kScorableGapTol) scored = p;
    if (p >= scored) {
      out.gamma_by_order.col(p).setConstant(inf);
      out.tpe_by_order(p) = inf;
      continue;
    }
    out.gamma_by_order.col(p) = gaps.cwiseInverse();

    const Eigen::MatrixXd a = vp.transpose();  // (p+1) x n constraint matrix
    double total = 0.0;
    for (int k = 0; k < n; ++k) {
      Eigen::MatrixXd adel(p + 1, n - 1);
      adel << a.leftCols(k), a.rightCols(n - 1 - k);
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(adel);
      const Eigen::VectorXd h = cod.solve(a.col(k));

      double pred = 0.0;
      for (int j = 0; j < k; ++j) pred += h(j) * x(j);
      for (int j = k + 1; j < n; ++j) pred += h(j - 1) * x(j);
      const double err = x(k) - pred;
      total += err * err;
    }
    out.tpe_by_order(p) = total;
  }
  out.num_scored_orders = scored;

  const double zero_bound = detail::residual_zero_bound(n, x.norm());
  for (int p = 0; p < orders; ++p) {
    if (out.residual_norm_by_order(p) <= zero_bound) {
      out.residual_norm_by_order(p) = 0.0;
    }
    if (p < scored && out.tpe_by_order(p) <= zero_bound / (min_gap(p) * min_gap(p))) {
      out.tpe_by_order(p) = 0.0;
    }
  }

  out.best_order = detail::first_min_index(out.tpe_by_order, scored);
  return out;
}

/// BIC with the large-sample-size penalty: (P+1)^2 ln N + N ln(||eps||^2 / N).
inline double bic_n_score(double resid_sq, int n, int order) {
  const double floored = std::max(resid_sq, n * 1e-300);
  const double p1 = static_cast<double>(order + 1);
  return p1 * p1 * std::log(static_cast<double>(n)) +
         n * std::log(floored / n);
}

/// BIC with the high-SNR penalty: N ln(r) + max(0, -(P+2) ln(r)), r = ||eps||^2/N.
inline double bic_snr_score(double resid_sq, int n, int order) {
  const double floored = std::max(resid_sq, n * 1e-300);
  const double lnr = std::log(floored / n);
  return n * lnr + std::max(0.0, -(order + 2) * lnr);
}

/// Scores of the two BIC baselines over all candidate orders.
struct BaselineScores {
  Eigen::VectorXd bic_n_by_order;
  Eigen::VectorXd bic_snr_by_order;
  int best_order_bic_n = 0;
  int best_order_bic_snr = 0;
};

/// BIC baselines evaluated on the residuals of one nested-basis scan.
inline BaselineScores score_bic_from_residuals(const Eigen::VectorXd& resid_sq,
                                               int n) {
  const int orders = static_cast<int>(resid_sq.size());
  BaselineScores out;
  out.bic_n_by_order.resize(orders);
  out.bic_snr_by_order.resize(orders);
  for (int p = 0; p < orders; ++p) {
    out.bic_n_by_order(p) = bic_n_score(resid_sq(p), n, p);
    out.bic_snr_by_order(p) = bic_snr_score(resid_sq(p), n, p);
  }
  out.best_order_bic_n = detail::first_min_index(out.bic_n_by_order);
  out.best_order_bic_snr = detail::first_min_index(out.bic_snr_by_order);
  return out;
}

inline BaselineScores score_bic(const Eigen::VectorXd& x, const NestedBasis& basis) {
  const int n = basis.window_len();
  if (x.size() != n) {
    throw std::invalid_argument("score_bic: input length != window length");
  }
  const int orders = basis.max_order() + 1;
  const Eigen::MatrixXd& q = basis.q_columns();

  Eigen::VectorXd resid(orders);
  Eigen::VectorXd eps = x;
  double prev = std::numeric_limits<double>::infinity();
  for (int p = 0; p < orders; ++p) {
    const auto qp = q.col(p);
    eps.noalias() -= qp * qp.dot(x);
    double r = eps.squaredNorm();
    if (r > prev) r = prev;
    prev = r;
    resid(p) = r;
  }
  const double zero_bound = detail::residual_zero_bound(n, x.norm());
  for (int p = 0; p < orders; ++p) {
    if (resid(p) <= zero_bound) resid(p) = 0.0;
  }
  return score_bic_from_residuals(resid, n);
}

/// Smooth sample k of the window with the CV-selected order.
inline std::pair<double, int> smooth_with_selected_order(const Eigen::VectorXd& x,
                                                         const NestedBasis& basis,
                                                         int target_index) {
  const SelectionResult sel = select_order_cv(x, basis);
  return {basis.project_at(x, sel.best_order, target_index), sel.best_order};
}

}  // namespace sgcv
