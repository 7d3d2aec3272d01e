#pragma once

// Sparse GCCA with G fixed to the MAX-VAR solution. For every view j and every
// latent column z_i, FISTA minimizes
//
//   weight * |alpha|_1 + |P_j^T alpha - S_j^{-1} Q_j^T z_i|_2^2
//
// starting from alpha = 0.

#include <cmath>
#include <vector>

#include "sgcca/maxvar.hpp"

namespace sgcca {

struct FistaConfig {
  int max_iter = 500;
  double tol = 1e-6;    // stop when |alpha_s - alpha_{s-1}|_2 <= tol
  double weight = 1.0;  // l1 weight
  std::size_t threads = 1;

  void validate() const {
    detail::require(max_iter >= 1, "FISTA max_iter must be at least 1");
    detail::require(tol > 0, "FISTA tol must be positive");
    detail::require(weight >= 0, "FISTA weight must be nonnegative");
  }
};

struct FistaColumn {
  Vector alpha;
  int iterations = 0;
};

/// t_{s+1} = (1 + sqrt(1 + 4 t_s^2)) / 2.
inline double next_momentum(double t) { return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t)); }

/// ||P P^T||, which is 1 for orthonormal P. Computed on the r x r side.
inline double projector_norm(const ViewOperator& op) {
  return spectral_norm(op.svd.p.transpose() * op.svd.p);
}

inline FistaColumn fista_column(const ViewOperator& op, const Vector& z, const FistaConfig& cfg,
                                double projector = 1.0) {
  cfg.validate();
  const auto& f = op.svd;
  detail::require(z.size() == f.q.rows(), "fista_column: z has the wrong length");
  const Vector b = f.sigma.cwiseInverse().asDiagonal() * (f.q.transpose() * z);
  // Gradient of |P^T a - b|^2 is 2 P (P^T a - b), Lipschitz with constant 2 ||P P^T||.
  const double lip = 2.0 * projector;
  const double threshold = cfg.weight / lip;

  const Index n = f.p.rows();
  FistaColumn out;
  Vector prev = Vector::Zero(n);
  Vector v = prev;
  double t = 1.0;
  for (int s = 1; s <= cfg.max_iter; ++s) {
    const Vector grad = 2.0 * (f.p * (f.p.transpose() * v - b));
    Vector alpha = soft_threshold(v - grad / lip, threshold);
    const double t_next = next_momentum(t);
    v = alpha + ((t - 1.0) / t_next) * (alpha - prev);
    const double step = (alpha - prev).norm();
    prev = std::move(alpha);
    t = t_next;
    out.iterations = s;
    if (step <= cfg.tol) break;
  }
  out.alpha = std::move(prev);
  return out;
}

/// Objective value weight * |alpha|_1 + |P^T alpha - b|^2 for the column problem.
inline double fista_objective(const ViewOperator& op, const Vector& z, const Vector& alpha,
                              double weight = 1.0) {
  const auto& f = op.svd;
  const Vector b = f.sigma.cwiseInverse().asDiagonal() * (f.q.transpose() * z);
  return weight * alpha.lpNorm<1>() + (f.p.transpose() * alpha - b).squaredNorm();
}

inline CanonicalModel fit_fixed_g(const std::vector<ViewOperator>& ops, Index ell,
                                  const FistaConfig& cfg) {
  cfg.validate();
  const Matrix g = top_eigenvectors(build_m_matrix(ops), ell);

  std::vector<double> projectors(ops.size());
  for (std::size_t j = 0; j < ops.size(); ++j) {
    projectors[j] = projector_norm(ops[j]);
    if (std::abs(projectors[j] - 1.0) > 1e-8)
      throw numerical_error("view " + std::to_string(j + 1) + ": ||P P^T|| deviates from 1");
  }

  CanonicalModel model;
  model.algorithm = Algorithm::sgcca_fista;
  model.ell = ell;
  model.g = g;
  for (const auto& op : ops) model.weights.push_back(Matrix::Zero(op.features(), ell));

  const std::size_t tasks = ops.size() * static_cast<std::size_t>(ell);
  detail::parallel_for(tasks, cfg.threads, [&](std::size_t t) {
    const std::size_t j = t / static_cast<std::size_t>(ell);
    const Index i = static_cast<Index>(t % static_cast<std::size_t>(ell));
    const Vector z = g.row(i).transpose();
    model.weights[j].col(i) = fista_column(ops[j], z, cfg, projectors[j]).alpha;
  });
  return model;
}

inline CanonicalModel fit_fixed_g(const MultiviewDataset& data, const FistaConfig& cfg,
                                  double rank_tol = kDefaultRankTol) {
  return fit_fixed_g(decompose_views(data, rank_tol, cfg.threads), data.ell, cfg);
}

}  // namespace sgcca
