#pragma once

// Per-view constraint operators. Each view X_j = P_j S_j Q_j^T contributes the
// linear system A_j W_j + B_j Z = 0 with A_j = P_j^T and B_j = -S_j^{-1} Q_j^T,
// which is the normal equation X_j X_j^T W_j = X_j G^T restricted to the row
// space of X_j (Z = G^T).

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sgcca/detail/parallel.hpp"
#include "sgcca/matrix.hpp"

namespace sgcca {

/// J views sharing a sample axis; view j is n_j x m.
struct MultiviewDataset {
  std::vector<Matrix> views;
  std::optional<std::vector<std::string>> labels;
  Index ell = 1;

  std::size_t num_views() const { return views.size(); }
  Index num_samples() const { return views.empty() ? 0 : views.front().cols(); }

  void validate() const {
    detail::require(views.size() >= 2, "dataset needs at least two views");
    detail::require(ell >= 1, "target dimension must be at least 1");
    const Index m = views.front().cols();
    detail::require(m >= 1, "dataset has no samples");
    for (std::size_t j = 0; j < views.size(); ++j) {
      detail::require(views[j].rows() >= 1, "view " + std::to_string(j + 1) + " has no features");
      detail::require(views[j].cols() == m, "view " + std::to_string(j + 1) +
                                                " has " + std::to_string(views[j].cols()) +
                                                " samples, expected " + std::to_string(m));
    }
    if (labels)
      detail::require(static_cast<Index>(labels->size()) == m,
                      "label count does not match the sample count");
  }
};

struct ViewOperator {
  Matrix a;  // r_j x n_j, equals p^T
  Matrix b;  // r_j x m, equals -diag(sigma)^{-1} q^T
  SvdFactors svd;

  Index rank() const { return svd.rank(); }
  Index features() const { return a.cols(); }
};

inline ViewOperator make_view_operator(const Matrix& view, double rank_tol = kDefaultRankTol) {
  ViewOperator op;
  op.svd = reduced_svd(view, rank_tol);
  op.a = op.svd.p.transpose();
  op.b = -(op.svd.sigma.cwiseInverse().asDiagonal() * op.svd.q.transpose());
  return op;
}

/// Decomposes every view. Views are processed independently and collected in
/// view order, so the result does not depend on `threads`.
inline std::vector<ViewOperator> decompose_views(const MultiviewDataset& data,
                                                 double rank_tol = kDefaultRankTol,
                                                 std::size_t threads = 1) {
  data.validate();
  std::vector<ViewOperator> ops(data.num_views());
  detail::parallel_for(ops.size(), threads, [&](std::size_t j) {
    try {
      ops[j] = make_view_operator(data.views[j], rank_tol);
    } catch (const input_error& e) {
      throw input_error("view " + std::to_string(j + 1) + ": " + e.what());
    }
  });
  for (const auto& op : ops)
    if (data.ell > op.rank()) throw input_error("target dimension exceeds view rank");
  return ops;
}

inline Matrix pad_rows(const Matrix& x, Index rows) {
  Matrix out = Matrix::Zero(rows, x.cols());
  out.topRows(x.rows()) = x;
  return out;
}

/// Operators zero-padded to a common row count r = max_j r_j.
struct AugmentedSystem {
  std::vector<ViewOperator> operators;
  Index r = 0;
  std::vector<Matrix> tilde_b;
  Matrix bar_b;

  std::size_t num_views() const { return operators.size(); }
  Index num_samples() const { return operators.front().b.cols(); }
};

inline AugmentedSystem augment(std::vector<ViewOperator> operators) {
  detail::require(operators.size() >= 2, "augment: at least two views required");
  AugmentedSystem sys;
  for (const auto& op : operators) sys.r = std::max(sys.r, op.rank());
  const Index m = operators.front().b.cols();
  sys.bar_b = Matrix::Zero(sys.r, m);
  for (const auto& op : operators) {
    detail::require(op.b.cols() == m, "augment: operators disagree on sample count");
    sys.tilde_b.push_back(pad_rows(op.b, sys.r));
    sys.bar_b += sys.tilde_b.back();
  }
  sys.bar_b /= static_cast<double>(operators.size());
  sys.operators = std::move(operators);
  return sys;
}

/// tilde_A_j W_j + tilde_B_j Z, the padded constraint residual of view j.
inline Matrix padded_residual(const AugmentedSystem& sys, std::size_t j, const Matrix& w,
                              const Matrix& z) {
  const auto& op = sys.operators[j];
  return pad_rows(op.a * w, sys.r) + sys.tilde_b[j] * z;
}

/// (W-bar, Lambda-bar): view averages of tilde_A_j W_j and tilde_Lambda_j,
/// summed in view order.
inline std::pair<Matrix, Matrix> bar_averages(const AugmentedSystem& sys,
                                              const std::vector<Matrix>& w,
                                              const std::vector<Matrix>& lambda) {
  const std::size_t J = sys.num_views();
  detail::require(w.size() == J && lambda.size() == J, "bar_averages: wrong number of views");
  const Index ell = w.front().cols();
  Matrix bar_w = Matrix::Zero(sys.r, ell);
  Matrix bar_l = Matrix::Zero(sys.r, ell);
  for (std::size_t j = 0; j < J; ++j) {
    const auto& op = sys.operators[j];
    detail::require(w[j].rows() == op.features() && w[j].cols() == ell,
                    "bar_averages: W_" + std::to_string(j + 1) + " has the wrong shape");
    detail::require(lambda[j].rows() == op.rank() && lambda[j].cols() == ell,
                    "bar_averages: Lambda_" + std::to_string(j + 1) + " has the wrong shape");
    bar_w.topRows(op.rank()) += op.a * w[j];
    bar_l.topRows(op.rank()) += lambda[j];
  }
  bar_w /= static_cast<double>(J);
  bar_l /= static_cast<double>(J);
  return {std::move(bar_w), std::move(bar_l)};
}

}  // namespace sgcca
