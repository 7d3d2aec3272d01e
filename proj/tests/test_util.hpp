#pragma once

// Small generators shared by the unit tests.

#include <cstdint>
#include <vector>

#include <Eigen/QR>

#include "sgcca/sgcca.hpp"

namespace sgcca::fixtures {

inline Matrix gaussian(Rng& rng, Index rows, Index cols) {
  Matrix x(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) x(r, c) = rng.normal();
  return x;
}

/// Uniformly distributed n x k matrix with orthonormal columns.
inline Matrix stiefel(Rng& rng, Index n, Index k) {
  Eigen::HouseholderQR<Matrix> qr(gaussian(rng, n, k));
  Matrix q = qr.householderQ() * Matrix::Identity(n, k);
  const Matrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  for (Index i = 0; i < k; ++i)
    if (r(i, i) < 0) q.col(i) *= -1.0;
  return q;
}

/// n x m matrix of exact rank k.
inline Matrix low_rank(Rng& rng, Index n, Index m, Index k) {
  return gaussian(rng, n, k) * gaussian(rng, k, m);
}

/// Entrywise membership of g in the subdifferential of |.| at w, with slack.
inline bool in_subdifferential(double g, double w, double slack) {
  return subgradient_distance(g, w) <= slack;
}

/// J views that share an exact ell-dimensional row space spanned by G.
inline std::vector<Matrix> shared_views(Rng& rng, const std::vector<Index>& dims, const Matrix& g) {
  std::vector<Matrix> views;
  for (Index n : dims) views.push_back(gaussian(rng, n, g.rows()) * g);
  return views;
}

}  // namespace sgcca::fixtures
