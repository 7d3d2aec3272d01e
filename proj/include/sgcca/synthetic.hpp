#pragma once

// Rank-one multiview generator X_j = v_j u^T + E_j with block-structured
// loadings v_j in {+1, -1, 0}, and a seeded random train/test column split.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "sgcca/random.hpp"
#include "sgcca/view_model.hpp"

namespace sgcca {

/// Consecutive run of one loading value covering `fraction` of a view's rows.
struct Segment {
  double value;
  double fraction;
};

struct SyntheticConfig {
  std::vector<Index> dims{1000, 1500, 1700};
  Index samples = 100;
  std::vector<std::vector<Segment>> patterns{
      {{1.0, 0.2}, {-1.0, 0.3}, {0.0, 0.5}},
      {{0.0, 2.0 / 3.0}, {1.0, 2.0 / 15.0}, {-1.0, 1.0 / 5.0}},
      {{1.0, 2.0 / 17.0}, {0.0, 12.0 / 17.0}, {-1.0, 3.0 / 17.0}},
  };
  std::vector<double> sigmas{0.3, 0.4, 0.5};
  std::uint64_t seed = 0;
  Index ell = 1;

  void validate() const {
    detail::require(dims.size() >= 2, "synthetic data needs at least two views");
    detail::require(patterns.size() == dims.size(), "one loading pattern per view is required");
    detail::require(sigmas.size() == dims.size(), "one noise level per view is required");
    detail::require(samples >= 2, "synthetic data needs at least two samples");
    for (std::size_t j = 0; j < dims.size(); ++j) {
      detail::require(dims[j] >= 1, "view dimensions must be positive");
      detail::require(sigmas[j] >= 0, "noise levels must be nonnegative");
      double total = 0.0;
      for (const auto& s : patterns[j]) {
        detail::require(s.fraction >= 0, "pattern fractions must be nonnegative");
        total += s.fraction;
      }
      detail::require(std::abs(total - 1.0) < 1e-9, "pattern fractions must sum to 1");
    }
  }
};

struct SyntheticData {
  MultiviewDataset dataset;
  std::vector<Vector> loadings;  // ground-truth v_j
  Vector latent;                 // u
};

/// Loading vector of length n; segment boundaries are round(cumulative * n).
inline Vector pattern_loading(const std::vector<Segment>& pattern, Index n) {
  Vector v = Vector::Zero(n);
  double cumulative = 0.0;
  Index start = 0;
  for (const auto& s : pattern) {
    cumulative += s.fraction;
    const Index end = std::min<Index>(n, static_cast<Index>(std::llround(cumulative * n)));
    v.segment(start, end - start).setConstant(s.value);
    start = end;
  }
  return v;
}

/// Draws u (m normals), then each noise matrix row by row, all from one stream.
inline SyntheticData generate_synthetic(const SyntheticConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  SyntheticData out;
  out.latent.resize(cfg.samples);
  for (Index i = 0; i < cfg.samples; ++i) out.latent(i) = rng.normal();
  out.dataset.ell = cfg.ell;
  for (std::size_t j = 0; j < cfg.dims.size(); ++j) {
    const Index n = cfg.dims[j];
    Vector v = pattern_loading(cfg.patterns[j], n);
    Matrix x = v * out.latent.transpose();
    for (Index r = 0; r < n; ++r)
      for (Index c = 0; c < cfg.samples; ++c) x(r, c) += cfg.sigmas[j] * rng.normal();
    out.dataset.views.push_back(std::move(x));
    out.loadings.push_back(std::move(v));
  }
  return out;
}

struct Split {
  MultiviewDataset train;
  MultiviewDataset test;
  std::vector<std::size_t> train_index;
  std::vector<std::size_t> test_index;
};

namespace detail {

inline Matrix select_columns(const Matrix& x, const std::vector<std::size_t>& idx) {
  Matrix out(x.rows(), static_cast<Index>(idx.size()));
  for (std::size_t c = 0; c < idx.size(); ++c) out.col(static_cast<Index>(c)) = x.col(static_cast<Index>(idx[c]));
  return out;
}

}  // namespace detail

/// Random column partition with round(fraction * m) training samples. Both
/// parts keep the original column order.
inline Split split(const MultiviewDataset& data, double train_fraction, std::uint64_t seed) {
  data.validate();
  detail::require(train_fraction > 0 && train_fraction < 1, "train fraction must lie in (0, 1)");
  const auto m = static_cast<std::size_t>(data.num_samples());
  detail::require(m >= 2, "cannot split fewer than two samples");
  const auto train_n = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(m)));
  if (train_n < 1 || train_n >= m)
    throw input_error("train fraction " + std::to_string(train_fraction) +
                      " leaves an empty train or test set");

  Rng rng(seed);
  auto perm = rng.permutation(m);
  Split s;
  s.train_index.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(train_n));
  s.test_index.assign(perm.begin() + static_cast<std::ptrdiff_t>(train_n), perm.end());
  std::sort(s.train_index.begin(), s.train_index.end());
  std::sort(s.test_index.begin(), s.test_index.end());

  for (auto* part : {&s.train, &s.test}) part->ell = data.ell;
  for (const auto& v : data.views) {
    s.train.views.push_back(detail::select_columns(v, s.train_index));
    s.test.views.push_back(detail::select_columns(v, s.test_index));
  }
  if (data.labels) {
    s.train.labels.emplace();
    s.test.labels.emplace();
    for (auto i : s.train_index) s.train.labels->push_back((*data.labels)[i]);
    for (auto i : s.test_index) s.test.labels->push_back((*data.labels)[i]);
  }
  return s;
}

}  // namespace sgcca
