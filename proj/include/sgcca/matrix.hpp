#pragma once

// Dense primitives shared by every solver: reduced SVD with a fixed sign
// convention, soft-thresholding, spectral norm and feature centering.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "sgcca/error.hpp"

namespace sgcca {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kDefaultRankTol = 1e-10;

/// Thin factors X = p * diag(sigma) * q^T keeping only the numerically
/// nonzero singular values.
struct SvdFactors {
  Matrix p;      // n x r, orthonormal columns
  Vector sigma;  // r, strictly positive, descending
  Matrix q;      // m x r, orthonormal columns

  Index rank() const { return sigma.size(); }
};

inline bool all_finite(const Matrix& x) { return x.allFinite(); }

namespace detail {

inline void require_finite(const Matrix& x, const char* what) {
  if (!x.allFinite()) throw numerical_error(std::string(what) + ": non-finite entries");
}

// Flips column k of `lead` (and of `follow`) so that the entry of largest
// magnitude in lead.col(k) is nonnegative. Ties resolve to the lowest row.
inline void fix_column_signs(Matrix& lead, Matrix* follow) {
  for (Index k = 0; k < lead.cols(); ++k) {
    Index arg = 0;
    lead.col(k).cwiseAbs().maxCoeff(&arg);
    if (lead(arg, k) < 0) {
      lead.col(k) *= -1.0;
      if (follow) follow->col(k) *= -1.0;
    }
  }
}

}  // namespace detail

/// Reduced SVD. The rank is the number of singular values strictly above
/// rank_tol * sigma_max; each column of p has its largest-magnitude entry
/// nonnegative, which makes the factors unique for distinct singular values.
inline SvdFactors reduced_svd(const Matrix& x, double rank_tol = kDefaultRankTol) {
  detail::require(x.rows() >= 1 && x.cols() >= 1, "reduced_svd: empty matrix");
  detail::require(rank_tol > 0, "reduced_svd: rank_tol must be positive");
  detail::require_finite(x, "reduced_svd input");
  if (x.cwiseAbs().maxCoeff() == 0.0) throw input_error("zero matrix has no reduced SVD");

  Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double cut = rank_tol * s(0);
  Index r = 0;
  while (r < s.size() && s(r) > cut) ++r;

  SvdFactors f;
  f.p = svd.matrixU().leftCols(r);
  f.sigma = s.head(r);
  f.q = svd.matrixV().leftCols(r);
  detail::fix_column_signs(f.p, &f.q);
  return f;
}

/// S(x, mu) = sgn(x) * max(|x| - mu, 0), entrywise.
inline Matrix soft_threshold(const Matrix& x, double mu) {
  detail::require(mu >= 0, "soft_threshold: threshold must be nonnegative");
  return x.unaryExpr([mu](double v) {
    const double a = std::abs(v) - mu;
    return a > 0 ? std::copysign(a, v) : 0.0;
  });
}

/// Largest singular value. Small problems go through the Gram matrix's
/// eigendecomposition; large ones use power iteration to relative tolerance tol.
inline double spectral_norm(const Matrix& x, double tol = 1e-12) {
  detail::require(tol > 0, "spectral_norm: tol must be positive");
  const bool wide = x.cols() > x.rows();
  const Index k = std::min(x.rows(), x.cols());
  if (x.size() == 0) return 0.0;

  if (k <= 256) {
    const Matrix gram = wide ? Matrix(x * x.transpose()) : Matrix(x.transpose() * x);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
  }

  // Power iteration on the smaller Gram operator, never formed explicitly.
  Vector v = Vector::LinSpaced(k, 1.0, 2.0);
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < 10000; ++it) {
    Vector w = wide ? Vector(x * (x.transpose() * v)) : Vector(x.transpose() * (x * v));
    const double next = w.norm();
    if (next == 0.0) return 0.0;
    v = w / next;
    if (std::abs(next - lambda) <= tol * next) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return std::sqrt(lambda);
}

/// Row means of x (one per feature; samples are columns).
inline Vector feature_means(const Matrix& x) { return x.rowwise().mean(); }

/// Subtracts the given per-feature means from every sample.
inline Matrix center_with(const Matrix& x, const Vector& means) {
  detail::require(means.size() == x.rows(), "center_with: mean vector length mismatch");
  return x.colwise() - means;
}

/// Shifts every feature row to zero mean.
inline Matrix center_features(const Matrix& x) {
  detail::require(x.cols() >= 1, "center_features: matrix has no samples");
  return center_with(x, feature_means(x));
}

}  // namespace sgcca
