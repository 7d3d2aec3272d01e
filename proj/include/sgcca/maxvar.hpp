#pragma once

// MAX-VAR GCCA: G holds the top-ell eigenvectors of M = sum_j Q_j Q_j^T and
// each W_j is the minimum-norm solution of X_j X_j^T W_j = X_j G^T.

#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "sgcca/view_model.hpp"

namespace sgcca {

enum class Algorithm { maxvar, sgcca_admm, sgcca_fista };

inline std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::maxvar: return "maxvar";
    case Algorithm::sgcca_admm: return "sgcca-admm";
    case Algorithm::sgcca_fista: return "sgcca-fista";
  }
  return "unknown";
}

inline Algorithm algorithm_from_string(const std::string& s) {
  if (s == "maxvar" || s == "gcca") return Algorithm::maxvar;
  if (s == "sgcca-admm") return Algorithm::sgcca_admm;
  if (s == "sgcca-fista") return Algorithm::sgcca_fista;
  throw input_error("unknown algorithm '" + s + "'");
}

/// Nearest-centroid rule in the latent space of the first view.
struct CentroidClassifier {
  std::vector<std::string> classes;  // sorted; index order breaks ties
  Matrix centroids;                  // ell x classes
};

struct CanonicalModel {
  std::vector<Matrix> weights;  // W_j, n_j x ell
  Matrix g;                     // ell x m
  Index ell = 0;
  Algorithm algorithm = Algorithm::maxvar;
  std::vector<Vector> feature_means;  // empty when fitted on uncentered data
  std::optional<CentroidClassifier> classifier;
  std::map<std::string, std::string> metadata;

  std::size_t num_views() const { return weights.size(); }
};

inline Matrix build_m_matrix(const std::vector<ViewOperator>& ops) {
  detail::require(!ops.empty(), "build_m_matrix: no views");
  const Index m = ops.front().svd.q.rows();
  Matrix M = Matrix::Zero(m, m);
  for (const auto& op : ops) M.noalias() += op.svd.q * op.svd.q.transpose();
  return M;
}

/// Rows of the result are eigenvectors for the ell largest eigenvalues, in
/// descending eigenvalue order; equal eigenvalues keep the solver's ascending
/// index order. Each row has its largest-magnitude entry nonnegative.
inline Matrix top_eigenvectors(const Matrix& m_matrix, Index ell, Vector* eigenvalues = nullptr) {
  detail::require(m_matrix.rows() == m_matrix.cols(), "top_eigenvectors: matrix is not square");
  detail::require(ell >= 1, "top_eigenvectors: ell must be at least 1");
  detail::require(ell <= m_matrix.rows(), "top_eigenvectors: ell exceeds matrix size");
  const Matrix sym = 0.5 * (m_matrix + m_matrix.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.info() != Eigen::Success) throw numerical_error("symmetric eigensolver failed");

  const Index n = sym.rows();
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  const Vector& vals = eig.eigenvalues();
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return vals(a) > vals(b); });

  Matrix gt(n, ell);
  if (eigenvalues) eigenvalues->resize(ell);
  for (Index i = 0; i < ell; ++i) {
    gt.col(i) = eig.eigenvectors().col(order[i]);
    if (eigenvalues) (*eigenvalues)(i) = vals(order[i]);
  }
  detail::fix_column_signs(gt, nullptr);
  return gt.transpose();
}

/// W_j = P_j S_j^{-1} Q_j^T G^T.
inline Matrix maxvar_weights(const ViewOperator& op, const Matrix& g) {
  const auto& f = op.svd;
  return f.p * (f.sigma.cwiseInverse().asDiagonal() * (f.q.transpose() * g.transpose()));
}

inline CanonicalModel fit_maxvar(const std::vector<ViewOperator>& ops, Index ell) {
  CanonicalModel model;
  model.algorithm = Algorithm::maxvar;
  model.ell = ell;
  model.g = top_eigenvectors(build_m_matrix(ops), ell);
  for (const auto& op : ops) model.weights.push_back(maxvar_weights(op, model.g));
  const double orth = (model.g * model.g.transpose() - Matrix::Identity(ell, ell)).norm();
  if (orth > 1e-8) throw numerical_error("MAX-VAR eigenvectors are not orthonormal");
  return model;
}

inline CanonicalModel fit_maxvar(const MultiviewDataset& data, double rank_tol = kDefaultRankTol,
                                 std::size_t threads = 1) {
  return fit_maxvar(decompose_views(data, rank_tol, threads), data.ell);
}

}  // namespace sgcca
