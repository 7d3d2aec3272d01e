#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace sgcca;
using sgcca::fixtures::gaussian;

namespace {

MultiviewDataset dataset(std::vector<Matrix> views, Index ell = 1) {
  MultiviewDataset d;
  d.views = std::move(views);
  d.ell = ell;
  return d;
}

}  // namespace

TEST(ViewOperator, IdentityView) {
  const auto op = make_view_operator(Matrix::Identity(2, 2));
  EXPECT_LE((op.a * op.a.transpose() - Matrix::Identity(2, 2)).norm(), 1e-12);
  // A W + B Z = 0 reduces to W = Z.
  Rng rng(1);
  const Matrix z = gaussian(rng, 2, 2);
  const Matrix w = -op.a.transpose() * (op.b * z);
  EXPECT_LE((w - z).norm(), 1e-12);
}

TEST(ViewOperator, RowsOfAAreOrthonormal) {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 3 + static_cast<Index>(rng.below(6));
    const Index m = 3 + static_cast<Index>(rng.below(6));
    const auto op = make_view_operator(gaussian(rng, n, m));
    EXPECT_LE((op.a * op.a.transpose() - Matrix::Identity(op.rank(), op.rank())).norm(), 1e-10);
    const Matrix b = -(op.svd.sigma.cwiseInverse().asDiagonal() * op.svd.q.transpose());
    EXPECT_EQ(op.b, b);
  }
}

TEST(ViewOperator, ConstraintMatchesNormalEquation) {
  Rng rng(3);
  const Matrix x = fixtures::low_rank(rng, 7, 9, 3);
  const auto op = make_view_operator(x);
  ASSERT_EQ(op.rank(), 3);
  const Matrix z = fixtures::stiefel(rng, 9, 2);
  // Minimum-norm solution of A W = -B Z.
  const Matrix w = op.a.transpose() * (-op.b * z);
  EXPECT_LE((x * x.transpose() * w - x * z).norm(), 1e-8);
}

TEST(ViewOperator, FormulationsAreEquivalent) {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix x = gaussian(rng, 4, 6);  // full row rank
    const auto op = make_view_operator(x);
    const Matrix z = fixtures::stiefel(rng, 6, 2);
    const Matrix solved = op.a.transpose() * (-op.b * z);
    const Matrix random = gaussian(rng, 4, 2);
    const double scale = x.squaredNorm();
    // Exact solution: both residuals vanish.
    EXPECT_LE((op.a * solved + op.b * z).norm(), 1e-10);
    EXPECT_LE((x * x.transpose() * solved - x * z).norm(), 1e-8 * scale);
    // Random W: both residuals are clearly nonzero.
    EXPECT_GT((op.a * random + op.b * z).norm(), 1e-6);
    EXPECT_GT((x * x.transpose() * random - x * z).norm(), 1e-8 * scale);
  }
}

TEST(DecomposeViews, Errors) {
  Rng rng(5);
  EXPECT_THROW(decompose_views(dataset({gaussian(rng, 3, 4)})), input_error);
  EXPECT_THROW(decompose_views(dataset({gaussian(rng, 3, 4), gaussian(rng, 3, 5)})), input_error);
  EXPECT_THROW(decompose_views(dataset({gaussian(rng, 3, 4), Matrix::Zero(3, 4)})), input_error);
  // ell above a view's rank.
  EXPECT_THROW(decompose_views(dataset({gaussian(rng, 3, 6), fixtures::low_rank(rng, 3, 6, 1)}, 2)),
               input_error);
}

TEST(DecomposeViews, ThreadCountDoesNotMatter) {
  Rng rng(6);
  const auto d = dataset({gaussian(rng, 5, 8), gaussian(rng, 7, 8), gaussian(rng, 4, 8)});
  const auto one = decompose_views(d, kDefaultRankTol, 1);
  const auto many = decompose_views(d, kDefaultRankTol, 3);
  for (std::size_t j = 0; j < one.size(); ++j) {
    EXPECT_EQ(one[j].a, many[j].a);
    EXPECT_EQ(one[j].b, many[j].b);
  }
}

TEST(Augment, EqualRanks) {
  Rng rng(7);
  const auto ops = decompose_views(dataset({gaussian(rng, 3, 5), gaussian(rng, 3, 5)}));
  const auto sys = augment(ops);
  EXPECT_EQ(sys.r, 3);
  EXPECT_EQ(sys.tilde_b[0], ops[0].b);
  EXPECT_EQ(sys.tilde_b[1], ops[1].b);
  EXPECT_LE((sys.bar_b - 0.5 * (ops[0].b + ops[1].b)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Augment, PadsSmallerView) {
  Rng rng(8);
  const auto sys = augment(decompose_views(dataset({gaussian(rng, 2, 5), gaussian(rng, 3, 5)})));
  ASSERT_EQ(sys.r, 3);
  ASSERT_EQ(sys.tilde_b[0].rows(), 3);
  EXPECT_EQ(sys.tilde_b[0].topRows(2), sys.operators[0].b);
  EXPECT_EQ(sys.tilde_b[0].row(2).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Augment, PaddingIsNeutral) {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const auto sys = augment(decompose_views(
        dataset({gaussian(rng, 2, 6), gaussian(rng, 4, 6), gaussian(rng, 3, 6)}, 2)));
    const Matrix z = fixtures::stiefel(rng, 6, 2);
    for (std::size_t j = 0; j < sys.num_views(); ++j) {
      const auto& op = sys.operators[j];
      const Matrix w = gaussian(rng, op.features(), 2);
      const Matrix plain = op.a * w + op.b * z;
      const Matrix padded = padded_residual(sys, j, w, z);
      EXPECT_EQ(padded.topRows(op.rank()), plain);
      EXPECT_EQ(padded.bottomRows(sys.r - op.rank()).cwiseAbs().sum(), 0.0);
      EXPECT_DOUBLE_EQ(padded.norm(), plain.norm());
    }
  }
}

TEST(BarAverages, Examples) {
  Rng rng(10);
  const auto sys = augment(decompose_views(dataset({gaussian(rng, 3, 6), gaussian(rng, 5, 6)}, 2)));
  std::vector<Matrix> w{Matrix::Zero(3, 2), Matrix::Zero(5, 2)};
  std::vector<Matrix> l{Matrix::Zero(3, 2), Matrix::Zero(5, 2)};
  auto [bw, bl] = bar_averages(sys, w, l);
  EXPECT_EQ(bw.cwiseAbs().sum() + bl.cwiseAbs().sum(), 0.0);

  w = {gaussian(rng, 3, 2), gaussian(rng, 5, 2)};
  l = {gaussian(rng, 3, 2), gaussian(rng, 5, 2)};
  std::tie(bw, bl) = bar_averages(sys, w, l);
  Matrix sum_w = Matrix::Zero(sys.r, 2), sum_l = Matrix::Zero(sys.r, 2);
  for (std::size_t j = 0; j < 2; ++j) {
    sum_w += pad_rows(sys.operators[j].a * w[j], sys.r);
    sum_l += pad_rows(l[j], sys.r);
  }
  EXPECT_LE((2.0 * bw - sum_w).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LE((2.0 * bl - sum_l).cwiseAbs().maxCoeff(), 1e-14);

  w.pop_back();
  EXPECT_THROW(bar_averages(sys, w, l), input_error);
}

TEST(BarAverages, IdenticalSummands) {
  Rng rng(11);
  const Matrix x = gaussian(rng, 4, 6);
  const auto sys = augment(decompose_views(dataset({x, x})));
  const Matrix w = gaussian(rng, 4, 1);
  const Matrix l = gaussian(rng, 4, 1);
  const auto [bw, bl] = bar_averages(sys, {w, w}, {l, l});
  EXPECT_LE((bw - sys.operators[0].a * w).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((bl - l).cwiseAbs().maxCoeff(), 1e-15);
}
