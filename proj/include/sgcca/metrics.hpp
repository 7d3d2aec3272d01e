#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "sgcca/maxvar.hpp"

namespace sgcca {

struct MetricsReport {
  double correlation = 0.0;
  std::optional<double> reconstruction_error;  // only when G covers the evaluated samples
  std::vector<double> sparsity_per_view;
  double sparsity_avg = 0.0;
  std::optional<double> accuracy;
  std::map<std::pair<int, int>, double> aroc_pairs;  // 1-based view indices
  std::optional<double> aroc_avg;
};

namespace detail {

inline void check_model_shapes(const CanonicalModel& model, const std::vector<Matrix>& views) {
  require(model.weights.size() == views.size(),
          "model has " + std::to_string(model.weights.size()) + " views, data has " +
              std::to_string(views.size()));
  for (std::size_t j = 0; j < views.size(); ++j) {
    require(model.weights[j].rows() == views[j].rows(),
            "view " + std::to_string(j + 1) + ": model expects " +
                std::to_string(model.weights[j].rows()) + " features, data has " +
                std::to_string(views[j].rows()));
    require(views[j].cols() == views.front().cols(), "views disagree on sample count");
  }
}

}  // namespace detail

/// sum over ordered pairs i != j of trace(W_i^T X_i X_j^T W_j).
inline double total_correlation(const CanonicalModel& model, const std::vector<Matrix>& views) {
  detail::check_model_shapes(model, views);
  std::vector<Matrix> proj;
  for (std::size_t j = 0; j < views.size(); ++j)
    proj.push_back(model.weights[j].transpose() * views[j]);
  double total = 0.0;
  for (std::size_t i = 0; i < proj.size(); ++i)
    for (std::size_t j = 0; j < proj.size(); ++j)
      if (i != j) total += (proj[i].array() * proj[j].array()).sum();
  return total;
}

/// (1/ell) sum_j |W_j^T X_j - G|_F^2.
inline double reconstruction_error(const CanonicalModel& model, const std::vector<Matrix>& views) {
  detail::check_model_shapes(model, views);
  detail::require(model.g.cols() == views.front().cols(),
                  "reconstruction error needs G for the evaluated samples");
  double total = 0.0;
  for (std::size_t j = 0; j < views.size(); ++j)
    total += (model.weights[j].transpose() * views[j] - model.g).squaredNorm();
  return total / static_cast<double>(model.g.rows());
}

inline double sparsity(const Matrix& w, double zero_tol) {
  if (w.size() == 0) return 1.0;
  const auto zeros = (w.array().abs() <= zero_tol).count();
  return static_cast<double>(zeros) / static_cast<double>(w.size());
}

/// Per-view fraction of entries with |w| <= zero_tol, and their plain mean.
inline std::pair<std::vector<double>, double> sparsity(const CanonicalModel& model,
                                                       double zero_tol) {
  detail::require(zero_tol >= 0, "zero_tol must be nonnegative");
  std::vector<double> per;
  for (const auto& w : model.weights) per.push_back(sparsity(w, zero_tol));
  double avg = 0.0;
  for (double s : per) avg += s;
  if (!per.empty()) avg /= static_cast<double>(per.size());
  return {per, avg};
}

/// Fraction of coordinates where `truth` is zero that are also below zero_tol
/// in every column of w.
inline double support_recovery(const Matrix& w, const Vector& truth, double zero_tol) {
  detail::require(w.rows() == truth.size(), "support_recovery: length mismatch");
  Index zeros = 0, hits = 0;
  for (Index i = 0; i < truth.size(); ++i) {
    if (truth(i) != 0.0) continue;
    for (Index c = 0; c < w.cols(); ++c) {
      ++zeros;
      if (std::abs(w(i, c)) <= zero_tol) ++hits;
    }
  }
  return zeros == 0 ? 1.0 : static_cast<double>(hits) / static_cast<double>(zeros);
}

// ---------------------------------------------------------------------------
// Classification with a one-hot label view.

inline std::vector<std::string> sorted_classes(const std::vector<std::string>& labels) {
  std::set<std::string> s(labels.begin(), labels.end());
  return {s.begin(), s.end()};
}

/// classes x m indicator matrix; labels outside `classes` are an error.
inline Matrix one_hot(const std::vector<std::string>& labels,
                      const std::vector<std::string>& classes) {
  Matrix out = Matrix::Zero(static_cast<Index>(classes.size()), static_cast<Index>(labels.size()));
  for (std::size_t c = 0; c < labels.size(); ++c) {
    const auto it = std::lower_bound(classes.begin(), classes.end(), labels[c]);
    if (it == classes.end() || *it != labels[c])
      throw input_error("unseen class '" + labels[c] + "'");
    out(it - classes.begin(), static_cast<Index>(c)) = 1.0;
  }
  return out;
}

/// Latent dimension for the data/label pair: rank of X_1 X_2^T.
inline Index classification_ell(const Matrix& x1, const Matrix& x2) {
  return reduced_svd(x1 * x2.transpose()).rank();
}

inline CentroidClassifier build_centroid_classifier(const Matrix& w1, const Matrix& x1,
                                                    const std::vector<std::string>& labels) {
  detail::require(static_cast<Index>(labels.size()) == x1.cols(),
                  "label count does not match the sample count");
  CentroidClassifier clf;
  clf.classes = sorted_classes(labels);
  const Matrix proj = w1.transpose() * x1;
  clf.centroids = Matrix::Zero(proj.rows(), static_cast<Index>(clf.classes.size()));
  std::vector<double> counts(clf.classes.size(), 0.0);
  const Matrix hot = one_hot(labels, clf.classes);
  for (Index c = 0; c < proj.cols(); ++c) {
    Index k = 0;
    hot.col(c).maxCoeff(&k);
    clf.centroids.col(k) += proj.col(c);
    counts[static_cast<std::size_t>(k)] += 1.0;
  }
  for (std::size_t k = 0; k < counts.size(); ++k)
    clf.centroids.col(static_cast<Index>(k)) /= counts[k];
  return clf;
}

/// Nearest centroid in Euclidean distance; ties go to the lowest class index.
inline std::vector<std::string> predict(const CentroidClassifier& clf, const Matrix& w1,
                                        const Matrix& x1) {
  const Matrix proj = w1.transpose() * x1;
  detail::require(proj.rows() == clf.centroids.rows(), "classifier dimension mismatch");
  std::vector<std::string> out;
  for (Index c = 0; c < proj.cols(); ++c) {
    Index best = 0;
    double best_d = (clf.centroids.col(0) - proj.col(c)).squaredNorm();
    for (Index k = 1; k < clf.centroids.cols(); ++k) {
      const double d = (clf.centroids.col(k) - proj.col(c)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    out.push_back(clf.classes[static_cast<std::size_t>(best)]);
  }
  return out;
}

inline double accuracy(const std::vector<std::string>& predicted,
                       const std::vector<std::string>& truth) {
  detail::require(predicted.size() == truth.size() && !truth.empty(),
                  "accuracy: prediction and label counts differ");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

/// Accuracy on (test_x, test_labels) of the nearest-centroid rule built from
/// the training data view (view 1) and its labels.
inline double classify(const CanonicalModel& model, const MultiviewDataset& train,
                       const Matrix& test_x, const std::vector<std::string>& test_labels) {
  detail::require(train.labels.has_value(), "classify: training data has no labels");
  detail::require(!model.weights.empty() && model.weights.front().rows() == test_x.rows(),
                  "classify: test data does not match the model's first view");
  const auto clf = build_centroid_classifier(model.weights.front(), train.views.front(),
                                             *train.labels);
  for (const auto& l : test_labels)
    if (!std::binary_search(clf.classes.begin(), clf.classes.end(), l))
      throw input_error("unseen class '" + l + "' in test labels");
  return accuracy(predict(clf, model.weights.front(), test_x), test_labels);
}

// ---------------------------------------------------------------------------
// Cross-view retrieval.

namespace detail {

// Mean over queries of (N - rank of the true match) / (N - 1); equal distances
// share the midrank.
inline double directional_aroc(const Matrix& queries, const Matrix& targets) {
  const Index n = queries.cols();
  double total = 0.0;
  for (Index c = 0; c < n; ++c) {
    const Vector dist = (targets.colwise() - queries.col(c)).colwise().squaredNorm().transpose();
    const double truth = dist(c);
    double closer = 0.0, ties = 0.0;
    for (Index d = 0; d < n; ++d) {
      if (d == c) continue;
      if (dist(d) < truth) closer += 1.0;
      else if (dist(d) == truth) ties += 1.0;
    }
    const double rank = 1.0 + closer + 0.5 * ties;
    total += (static_cast<double>(n) - rank) / static_cast<double>(n - 1);
  }
  return total / static_cast<double>(n);
}

}  // namespace detail

/// AROC from precomputed projections (ell x N each, column c of both is the same item).
inline double aroc(const Matrix& proj_i, const Matrix& proj_j) {
  detail::require(proj_i.cols() == proj_j.cols(), "aroc: views are not aligned");
  detail::require(proj_i.rows() == proj_j.rows(), "aroc: projection dimensions differ");
  detail::require(proj_i.cols() >= 2, "aroc: need at least two test samples");
  return 0.5 * (detail::directional_aroc(proj_i, proj_j) + detail::directional_aroc(proj_j, proj_i));
}

/// AROC between views i and j (0-based) of aligned test data.
inline double aroc(const CanonicalModel& model, const std::vector<Matrix>& views, std::size_t i,
                   std::size_t j) {
  detail::check_model_shapes(model, views);
  detail::require(i < views.size() && j < views.size() && i != j, "aroc: bad view pair");
  return aroc(Matrix(model.weights[i].transpose() * views[i]),
              Matrix(model.weights[j].transpose() * views[j]));
}

struct EvalOptions {
  double zero_tol = 1e-6;
  // When set, view 1 is classified and `labels` are its ground truth.
  const std::vector<std::string>* labels = nullptr;
  // 0-based view pairs for retrieval; empty means none.
  std::vector<std::pair<std::size_t, std::size_t>> retrieval_pairs;
  // G only describes the fitting samples; clear this for held-out data.
  bool training_data = true;
};

inline MetricsReport evaluate(const CanonicalModel& model, const std::vector<Matrix>& views,
                              const EvalOptions& opt) {
  MetricsReport rep;
  rep.correlation = total_correlation(model, views);
  if (opt.training_data && model.g.cols() == views.front().cols())
    rep.reconstruction_error = reconstruction_error(model, views);
  std::tie(rep.sparsity_per_view, rep.sparsity_avg) = sparsity(model, opt.zero_tol);
  if (opt.labels) {
    detail::require(model.classifier.has_value(), "model carries no classifier");
    rep.accuracy = accuracy(predict(*model.classifier, model.weights.front(), views.front()),
                            *opt.labels);
  }
  if (!opt.retrieval_pairs.empty()) {
    double sum = 0.0;
    for (const auto& [i, j] : opt.retrieval_pairs) {
      const double a = aroc(model, views, i, j);
      rep.aroc_pairs[{static_cast<int>(i) + 1, static_cast<int>(j) + 1}] = a;
      sum += a;
    }
    rep.aroc_avg = sum / static_cast<double>(opt.retrieval_pairs.size());
  }
  return rep;
}

}  // namespace sgcca
