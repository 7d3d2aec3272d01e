#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "test_util.hpp"

using namespace sgcca;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "sgcca_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

CanonicalModel random_model(Rng& rng) {
  CanonicalModel m;
  m.algorithm = Algorithm::sgcca_admm;
  m.ell = 2;
  m.g = fixtures::gaussian(rng, 2, 6);
  m.weights = {fixtures::gaussian(rng, 4, 2), soft_threshold(fixtures::gaussian(rng, 9, 2), 1.5),
               Matrix::Zero(3, 2)};
  m.feature_means = {fixtures::gaussian(rng, 4, 1), fixtures::gaussian(rng, 9, 1),
                     fixtures::gaussian(rng, 3, 1)};
  CentroidClassifier clf;
  clf.classes = {"a", "b"};
  clf.centroids = fixtures::gaussian(rng, 2, 2);
  m.classifier = clf;
  m.metadata = {{"delta", "1"}, {"note", "x"}};
  return m;
}

}  // namespace

TEST(MatrixFile, ParsesSmallFile) {
  std::istringstream in("1,2\n3,4\n");
  Matrix expect(2, 2);
  expect << 1, 2, 3, 4;
  EXPECT_EQ(parse_matrix(in), expect);
  std::istringstream commented("# header\n\n 1.5 , -2e-3\r\n");
  const Matrix x = parse_matrix(commented);
  EXPECT_EQ(x(0, 0), 1.5);
  EXPECT_EQ(x(0, 1), -2e-3);
}

TEST(MatrixFile, Errors) {
  std::istringstream empty("");
  EXPECT_THROW(parse_matrix(empty), input_error);
  std::istringstream ragged("1,2\n3\n");
  try {
    parse_matrix(ragged);
    FAIL();
  } catch (const input_error& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  std::istringstream word("1,abc\n");
  EXPECT_THROW(parse_matrix(word), input_error);
  std::istringstream nan("1,nan\n");
  EXPECT_THROW(parse_matrix(nan), input_error);
  EXPECT_THROW(load_matrix(scratch("missing.csv").string()), input_error);
}

TEST(MatrixFile, RoundTripIsExact) {
  Rng rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix x = fixtures::gaussian(rng, 5, 7);
    x(0, 0) = 1e-300;
    x(1, 1) = -0.1;
    const auto path = scratch("round.csv").string();
    save_matrix(x, path);
    EXPECT_EQ((load_matrix(path) - x).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(Labels, RoundTrip) {
  const std::vector<std::string> labels{"ALL", "AML", "ALL"};
  const auto path = scratch("labels.txt").string();
  save_labels(labels, path);
  EXPECT_EQ(load_labels(path), labels);
  write_text(scratch("empty.txt"), "\n");
  EXPECT_THROW(load_labels(scratch("empty.txt").string()), input_error);
}

TEST(ModelFile, RoundTripIsBitwise) {
  Rng rng(2);
  const auto m = random_model(rng);
  const auto path = scratch("model.json").string();
  save_model(m, path);
  const auto back = load_model(path);
  EXPECT_EQ(back.algorithm, m.algorithm);
  EXPECT_EQ(back.ell, m.ell);
  EXPECT_EQ(back.g, m.g);
  ASSERT_EQ(back.weights.size(), 3u);
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_EQ(back.weights[j], m.weights[j]);
    EXPECT_EQ(back.feature_means[j], m.feature_means[j]);
  }
  ASSERT_TRUE(back.classifier.has_value());
  EXPECT_EQ(back.classifier->classes, m.classifier->classes);
  EXPECT_EQ(back.classifier->centroids, m.classifier->centroids);
  EXPECT_EQ(back.metadata, m.metadata);
}

TEST(ModelFile, SparseEncoding) {
  const json zero = matrix_to_json(Matrix::Zero(3, 2));
  EXPECT_EQ(zero["encoding"], "sparse");
  EXPECT_TRUE(zero["entries"].empty());
  EXPECT_EQ(matrix_from_json(zero), Matrix::Zero(3, 2));
  Matrix dense = Matrix::Ones(2, 2);
  EXPECT_EQ(matrix_to_json(dense)["encoding"], "dense");
  Matrix mostly(3, 1);
  mostly << 0, 0.25, 0;
  EXPECT_EQ(matrix_from_json(matrix_to_json(mostly)), mostly);
}

TEST(ModelFile, CorruptInputsAreRejected) {
  Rng rng(3);
  const auto path = scratch("bad.json");
  write_text(path, "{ not json");
  EXPECT_THROW(load_model(path.string()), input_error);

  auto j = model_to_json(random_model(rng));
  j["format"] = "something-else";
  write_text(path, j.dump());
  EXPECT_THROW(load_model(path.string()), input_error);

  j = model_to_json(random_model(rng));
  j["version"] = 99;
  write_text(path, j.dump());
  EXPECT_THROW(load_model(path.string()), input_error);

  j = model_to_json(random_model(rng));
  j["weights"][0]["values"].erase(0);
  write_text(path, j.dump());
  EXPECT_THROW(load_model(path.string()), input_error);

  j = model_to_json(random_model(rng));
  j.erase("g");
  write_text(path, j.dump());
  EXPECT_THROW(load_model(path.string()), input_error);
}

TEST(Report, JsonLayout) {
  MetricsReport r;
  r.correlation = 1.5;
  r.sparsity_per_view = {0.5, 1.0};
  r.sparsity_avg = 0.75;
  r.aroc_pairs[{1, 2}] = 0.9;
  r.aroc_avg = 0.9;
  const auto j = report_to_json(r);
  EXPECT_EQ(j["format"], "sgcca-report");
  EXPECT_TRUE(j["reconstruction_error"].is_null());
  EXPECT_TRUE(j["accuracy"].is_null());
  EXPECT_EQ(j["aroc_pairs"]["1-2"], 0.9);
}

TEST(Digest, KnownValue) {
  const auto path = scratch("digest.txt");
  write_text(path, "a");
  EXPECT_EQ(file_digest(path.string()), "af63dc4c8601ec8c");
}
