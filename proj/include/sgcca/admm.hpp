#pragma once

// Sparse GCCA by distributed alternating iteration:
//
//   min sum_j |W_j|_1  s.t.  A_j W_j + B_j Z = 0,  Z^T Z = I
//
// Each iteration takes a Procrustes step for the consensus variable Z, a
// linearized soft-thresholding step for every W_j, a multiplier step for every
// Lambda_j, and grows the penalty beta geometrically up to beta_max.

#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "sgcca/maxvar.hpp"
#include "sgcca/view_model.hpp"

namespace sgcca {

struct SolverConfig {
  double delta = 1.0;     // proximity parameter of the linearized W-step
  double rho = 1.1;       // penalty growth factor
  double beta_max = 1e4;
  double eps1 = 1e-5;     // feasibility tolerance
  double eps2 = 1e-5;     // scaled W-change tolerance
  int max_iter = 1000;
  double zero_tol = 1e-6;
  double rank_tol = kDefaultRankTol;
  // Require the feasibility test alone instead of "feasibility or W-change".
  bool strict = false;
  std::size_t threads = 1;

  void validate() const {
    detail::require(delta > 0, "delta must be positive");
    detail::require(rho > 1, "rho must exceed 1");
    detail::require(beta_max > 0, "beta_max must be positive");
    detail::require(eps1 > 0 && eps2 > 0, "tolerances must be positive");
    detail::require(max_iter >= 1, "max_iter must be at least 1");
    detail::require(zero_tol >= 0, "zero_tol must be nonnegative");
    detail::require(rank_tol > 0, "rank_tol must be positive");
  }
};

struct SolverState {
  std::vector<Matrix> w;       // W_j, n_j x ell
  Matrix z;                    // m x ell
  std::vector<Matrix> lambda;  // Lambda_j, r_j x ell
  double beta = 0.0;
  int k = 0;
};

enum class Decision { continue_, converged, max_iter };

inline std::string to_string(Decision d) {
  switch (d) {
    case Decision::continue_: return "continue";
    case Decision::converged: return "converged";
    case Decision::max_iter: return "max_iter";
  }
  return "unknown";
}

struct IterationRecord {
  int k = 0;
  double beta = 0.0;                     // beta_k used by this iteration
  std::vector<double> primal_residual;   // |A_j W_j + B_j Z|_F
  double objective = 0.0;                // sum_j |W_j|_1
  double orthogonality_error = 0.0;      // |Z^T Z - I|_F
  std::vector<double> w_change;          // beta_k |dW_j|_F / max(1, |W_j|_F)
};

struct IterationTrace {
  std::vector<IterationRecord> records;
  Decision decision = Decision::continue_;
};

struct KktReport {
  std::vector<double> stationarity;  // dist(A_j^T Lambda_j, d|W_j|_1), Frobenius
  std::vector<double> feasibility;   // |A_j W_j + B_j Z|_F
  double orthogonality = 0.0;        // |Z^T Z - I|_F
  Matrix lambda2;                    // -sum_j (B_j Z)^T Lambda_j
};

inline double orthogonality_error(const Matrix& z) {
  return (z.transpose() * z - Matrix::Identity(z.cols(), z.cols())).norm();
}

inline double l1_norm(const Matrix& x) { return x.cwiseAbs().sum(); }

/// Max over views of 1 / max|A_j^T B_j|.
inline double initial_beta(const AugmentedSystem& sys) {
  double beta0 = 0.0;
  for (std::size_t j = 0; j < sys.num_views(); ++j) {
    const auto& op = sys.operators[j];
    const double peak = (op.a.transpose() * op.b).cwiseAbs().maxCoeff();
    if (!(peak > 0))
      throw input_error("A^T B vanishes for view " + std::to_string(j + 1));
    beta0 = std::max(beta0, 1.0 / peak);
  }
  return beta0;
}

inline SolverState init_state(const AugmentedSystem& sys, Index ell, const SolverConfig& cfg) {
  cfg.validate();
  const Index m = sys.num_samples();
  detail::require(ell >= 1 && ell <= m, "ell must lie in [1, m]");
  SolverState s;
  for (const auto& op : sys.operators) {
    s.w.push_back(Matrix::Zero(op.features(), ell));
    s.lambda.push_back(Matrix::Zero(op.rank(), ell));
  }
  s.z = Matrix::Identity(m, ell);
  s.beta = initial_beta(sys);
  if (s.beta > cfg.beta_max)
    throw input_error("beta_max (" + std::to_string(cfg.beta_max) +
                      ") is below the initial penalty " + std::to_string(s.beta));
  return s;
}

namespace detail {

// Orthonormal completion of `basis` (n x k, orthonormal columns) to n x count
// extra columns, built by Gram-Schmidt over e_1, e_2, ... in order.
inline Matrix complete_basis(const Matrix& basis, Index n, Index count) {
  Matrix out(n, count);
  Index filled = 0;
  for (Index i = 0; i < n && filled < count; ++i) {
    Vector v = Vector::Unit(n, i);
    for (int pass = 0; pass < 2; ++pass) {
      if (basis.cols() > 0) v -= basis * (basis.transpose() * v);
      if (filled > 0) v -= out.leftCols(filled) * (out.leftCols(filled).transpose() * v);
    }
    const double nv = v.norm();
    if (nv > 1e-8) out.col(filled++) = v / nv;
  }
  return out;
}

}  // namespace detail

/// argmax_{Z^T Z = I} trace(Z^T c) = U V^T. When c has rank k < ell the
/// missing directions are completed deterministically, so c = 0 gives the
/// first ell columns of the identity.
inline Matrix procrustes(const Matrix& c) {
  const Index m = c.rows();
  const Index ell = c.cols();
  detail::require(ell >= 1 && ell <= m, "procrustes: need 1 <= ell <= m");
  detail::require_finite(c, "procrustes input");

  Index k = 0;
  Matrix u, v;
  const double scale = c.cwiseAbs().maxCoeff();
  if (scale > 0) {
    Eigen::JacobiSVD<Matrix> svd(c, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& s = svd.singularValues();
    const double cut = s(0) * static_cast<double>(m) * std::numeric_limits<double>::epsilon();
    while (k < s.size() && s(k) > cut) ++k;
    u = svd.matrixU().leftCols(k);
    v = svd.matrixV().leftCols(k);
  }
  Matrix z = Matrix::Zero(m, ell);
  if (k > 0) z = u * v.transpose();
  if (k < ell) {
    const Matrix uc = detail::complete_basis(u, m, ell - k);
    const Matrix vc = detail::complete_basis(v, ell, ell - k);
    z += uc * vc.transpose();
  }
  return z;
}

/// Z-step: Procrustes solution for C = bar_B^T (bar_Lambda / beta - bar_W).
inline Matrix update_z(const SolverState& s, const AugmentedSystem& sys) {
  const auto [bar_w, bar_l] = bar_averages(sys, s.w, s.lambda);
  const Matrix c = sys.bar_b.transpose() * (bar_l / s.beta - bar_w);
  return procrustes(c);
}

/// Linearized W-step:
///   S(W_j - delta A_j^T (A_j W_j + B_j Z' - Lambda_j / beta), delta / beta).
inline Matrix update_w(const SolverState& s, const ViewOperator& op, std::size_t j,
                       const Matrix& z_next, const SolverConfig& cfg) {
  const Matrix& w = s.w[j];
  const Matrix inner = op.a * w + op.b * z_next - s.lambda[j] / s.beta;
  return soft_threshold(w - cfg.delta * (op.a.transpose() * inner), cfg.delta / s.beta);
}

/// Lambda_j - beta (A_j W_j' + B_j Z').
inline Matrix update_lambda(const SolverState& s, const ViewOperator& op, std::size_t j,
                            const Matrix& w_next, const Matrix& z_next) {
  return s.lambda[j] - s.beta * (op.a * w_next + op.b * z_next);
}

inline double step_beta(double beta, const SolverConfig& cfg) {
  detail::require(beta > 0, "step_beta: beta must be positive");
  return std::min(cfg.beta_max, cfg.rho * beta);
}

struct ConvergenceStats {
  double feasibility = 0.0;  // max_j |Lambda_j' - Lambda_j|_F / beta_k
  double w_change = 0.0;     // max_j beta_k |W_j' - W_j|_F / max(1, |W_j|_F)
};

inline ConvergenceStats convergence_stats(const SolverState& prev, const SolverState& next) {
  ConvergenceStats st;
  for (std::size_t j = 0; j < prev.w.size(); ++j) {
    st.feasibility = std::max(st.feasibility, (next.lambda[j] - prev.lambda[j]).norm() / prev.beta);
    st.w_change = std::max(st.w_change, prev.beta * (next.w[j] - prev.w[j]).norm() /
                                            std::max(1.0, prev.w[j].norm()));
  }
  return st;
}

/// Stops when either statistic falls below its tolerance (only feasibility
/// in strict mode). The iteration cap is checked after the tolerance test.
inline Decision check_convergence(const SolverState& prev, const SolverState& next,
                                  const SolverConfig& cfg) {
  const auto st = convergence_stats(prev, next);
  const bool feasible = st.feasibility <= cfg.eps1;
  const bool settled = st.w_change <= cfg.eps2;
  if (feasible || (!cfg.strict && settled)) return Decision::converged;
  if (next.k >= cfg.max_iter) return Decision::max_iter;
  return Decision::continue_;
}

/// Entrywise distance of g from the subdifferential of |.| at w.
inline double subgradient_distance(double g, double w) {
  if (w > 0) return std::abs(g - 1.0);
  if (w < 0) return std::abs(g + 1.0);
  return std::max(std::abs(g) - 1.0, 0.0);
}

inline KktReport kkt_residuals(const SolverState& s, const AugmentedSystem& sys) {
  KktReport rep;
  const Index ell = s.z.cols();
  rep.lambda2 = Matrix::Zero(ell, ell);
  for (std::size_t j = 0; j < sys.num_views(); ++j) {
    const auto& op = sys.operators[j];
    const Matrix g = op.a.transpose() * s.lambda[j];
    double acc = 0.0;
    for (Index c = 0; c < g.cols(); ++c)
      for (Index r = 0; r < g.rows(); ++r) {
        const double d = subgradient_distance(g(r, c), s.w[j](r, c));
        acc += d * d;
      }
    rep.stationarity.push_back(std::sqrt(acc));
    const Matrix bz = op.b * s.z;
    rep.feasibility.push_back((op.a * s.w[j] + bz).norm());
    rep.lambda2 -= bz.transpose() * s.lambda[j];
  }
  rep.orthogonality = orthogonality_error(s.z);
  return rep;
}

struct AdmmResult {
  CanonicalModel model;
  IterationTrace trace;
  KktReport kkt;
  SolverState state;
};

/// One full iteration from `s`; also fills `rec` with the iteration's statistics.
inline SolverState admm_step(const SolverState& s, const AugmentedSystem& sys,
                             const SolverConfig& cfg, IterationRecord* rec = nullptr) {
  const std::size_t J = sys.num_views();
  SolverState next;
  next.z = update_z(s, sys);
  next.w.resize(J);
  next.lambda.resize(J);
  std::vector<double> residual(J), change(J);
  detail::parallel_for(J, cfg.threads, [&](std::size_t j) {
    const auto& op = sys.operators[j];
    next.w[j] = update_w(s, op, j, next.z, cfg);
    next.lambda[j] = update_lambda(s, op, j, next.w[j], next.z);
    residual[j] = (s.lambda[j] - next.lambda[j]).norm() / s.beta;
    change[j] = s.beta * (next.w[j] - s.w[j]).norm() / std::max(1.0, s.w[j].norm());
  });
  next.beta = step_beta(s.beta, cfg);
  next.k = s.k + 1;
  if (rec) {
    rec->k = next.k;
    rec->beta = s.beta;
    rec->primal_residual = std::move(residual);
    rec->w_change = std::move(change);
    rec->orthogonality_error = orthogonality_error(next.z);
    rec->objective = 0.0;
    for (const auto& w : next.w) rec->objective += l1_norm(w);
  }
  return next;
}

inline AdmmResult fit_admm(const AugmentedSystem& sys, Index ell, const SolverConfig& cfg) {
  AdmmResult out;
  SolverState s = init_state(sys, ell, cfg);
  for (;;) {
    IterationRecord rec;
    SolverState next = admm_step(s, sys, cfg, &rec);
    out.trace.records.push_back(std::move(rec));
    const Decision d = check_convergence(s, next, cfg);
    s = std::move(next);
    for (const auto& w : s.w) detail::require_finite(w, "W iterate");
    if (d != Decision::continue_) {
      out.trace.decision = d;
      break;
    }
  }
  out.kkt = kkt_residuals(s, sys);
  out.model.algorithm = Algorithm::sgcca_admm;
  out.model.ell = ell;
  out.model.weights = s.w;
  out.model.g = s.z.transpose();
  out.state = std::move(s);
  return out;
}

inline AdmmResult fit_admm(const MultiviewDataset& data, const SolverConfig& cfg) {
  cfg.validate();
  return fit_admm(augment(decompose_views(data, cfg.rank_tol, cfg.threads)), data.ell, cfg);
}

/// Comma-separated trace, one row per iteration.
inline void write_trace(std::ostream& os, const IterationTrace& trace) {
  const std::size_t J = trace.records.empty() ? 0 : trace.records.front().primal_residual.size();
  os << "k,beta,objective,orthogonality_error";
  for (std::size_t j = 0; j < J; ++j) os << ",primal_residual_" << j + 1;
  for (std::size_t j = 0; j < J; ++j) os << ",w_change_" << j + 1;
  os << '\n';
  const auto old_precision = os.precision(17);
  for (const auto& r : trace.records) {
    os << r.k << ',' << r.beta << ',' << r.objective << ',' << r.orthogonality_error;
    for (double v : r.primal_residual) os << ',' << v;
    for (double v : r.w_change) os << ',' << v;
    os << '\n';
  }
  os.precision(old_precision);
}

}  // namespace sgcca
