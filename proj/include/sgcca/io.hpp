#pragma once

// File formats:
//   matrices - comma-separated values, one feature row per line, samples as
//              columns; lines starting with '#' are comments.
//   labels   - one class token per line, in sample order.
//   models / reports - JSON documents with a "format" name and "version".

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "sgcca/metrics.hpp"

namespace sgcca {

using json = nlohmann::json;

inline constexpr int kModelFormatVersion = 1;
inline constexpr int kReportFormatVersion = 1;

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline double parse_number(std::string_view token, std::size_t line) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || token.empty() ||
      !std::isfinite(value))
    throw input_error("line " + std::to_string(line) + ": non-numeric token '" +
                      std::string(token) + "'");
  return value;
}

inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

inline Matrix parse_matrix(std::istream& in) {
  std::vector<double> values;
  Index cols = -1;
  Index rows = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = detail::trim(line);
    if (body.empty() || body.front() == '#') continue;
    Index count = 0;
    std::size_t start = 0;
    for (;;) {
      const auto comma = body.find(',', start);
      values.push_back(detail::parse_number(body.substr(start, comma - start), line_no));
      ++count;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (cols < 0) cols = count;
    if (count != cols)
      throw input_error("line " + std::to_string(line_no) + ": expected " + std::to_string(cols) +
                        " values, found " + std::to_string(count));
    ++rows;
  }
  if (rows == 0) throw input_error("matrix file contains no data rows");
  Matrix x(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) x(r, c) = values[static_cast<std::size_t>(r * cols + c)];
  return x;
}

inline Matrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open '" + path + "'");
  try {
    return parse_matrix(in);
  } catch (const input_error& e) {
    throw input_error(path + ": " + e.what());
  }
}

/// Shortest round-trip representation, so load(save(x)) == x exactly.
inline void write_matrix(std::ostream& out, const Matrix& x) {
  out << "# " << x.rows() << " x " << x.cols() << '\n';
  for (Index r = 0; r < x.rows(); ++r) {
    for (Index c = 0; c < x.cols(); ++c) {
      if (c) out << ',';
      out << detail::format_number(x(r, c));
    }
    out << '\n';
  }
}

inline void save_matrix(const Matrix& x, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw input_error("cannot write '" + path + "'");
  write_matrix(out, x);
  if (!out) throw input_error("write failed for '" + path + "'");
}

inline std::vector<std::string> load_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open '" + path + "'");
  std::vector<std::string> labels;
  std::string line;
  while (std::getline(in, line)) {
    const auto body = detail::trim(line);
    if (body.empty() || body.front() == '#') continue;
    labels.emplace_back(body);
  }
  if (labels.empty()) throw input_error(path + ": label file is empty");
  return labels;
}

inline void save_labels(const std::vector<std::string>& labels, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw input_error("cannot write '" + path + "'");
  for (const auto& l : labels) out << l << '\n';
}

// ---------------------------------------------------------------------------
// JSON encoding of matrices: dense row-major values, or (index, value) pairs
// when more than half of the entries are exactly zero.

inline json matrix_to_json(const Matrix& x) {
  json j;
  j["rows"] = x.rows();
  j["cols"] = x.cols();
  const auto zeros = (x.array() == 0.0).count();
  if (x.size() > 0 && 2 * zeros > x.size()) {
    j["encoding"] = "sparse";
    json entries = json::array();
    for (Index r = 0; r < x.rows(); ++r)
      for (Index c = 0; c < x.cols(); ++c)
        if (x(r, c) != 0.0) entries.push_back(json::array({r * x.cols() + c, x(r, c)}));
    j["entries"] = std::move(entries);
  } else {
    j["encoding"] = "dense";
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(x.size()));
    for (Index r = 0; r < x.rows(); ++r)
      for (Index c = 0; c < x.cols(); ++c) values.push_back(x(r, c));
    j["values"] = std::move(values);
  }
  return j;
}

inline Matrix matrix_from_json(const json& j) {
  const Index rows = j.at("rows").get<Index>();
  const Index cols = j.at("cols").get<Index>();
  detail::require(rows >= 0 && cols >= 0, "negative matrix dimensions");
  Matrix x = Matrix::Zero(rows, cols);
  const auto enc = j.at("encoding").get<std::string>();
  if (enc == "dense") {
    const auto values = j.at("values").get<std::vector<double>>();
    detail::require(static_cast<Index>(values.size()) == rows * cols, "dense payload size mismatch");
    for (Index r = 0; r < rows; ++r)
      for (Index c = 0; c < cols; ++c) x(r, c) = values[static_cast<std::size_t>(r * cols + c)];
  } else if (enc == "sparse") {
    for (const auto& e : j.at("entries")) {
      const Index idx = e.at(0).get<Index>();
      detail::require(idx >= 0 && idx < rows * cols, "sparse entry index out of range");
      x(idx / cols, idx % cols) = e.at(1).get<double>();
    }
  } else {
    throw input_error("unknown matrix encoding '" + enc + "'");
  }
  return x;
}

inline json model_to_json(const CanonicalModel& model) {
  json j;
  j["format"] = "sgcca-model";
  j["version"] = kModelFormatVersion;
  j["algorithm"] = to_string(model.algorithm);
  j["ell"] = model.ell;
  j["g"] = matrix_to_json(model.g);
  j["weights"] = json::array();
  for (const auto& w : model.weights) j["weights"].push_back(matrix_to_json(w));
  j["feature_means"] = json::array();
  for (const auto& mu : model.feature_means)
    j["feature_means"].push_back(std::vector<double>(mu.data(), mu.data() + mu.size()));
  if (model.classifier) {
    j["classifier"]["classes"] = model.classifier->classes;
    j["classifier"]["centroids"] = matrix_to_json(model.classifier->centroids);
  }
  j["metadata"] = model.metadata;
  return j;
}

inline CanonicalModel model_from_json(const json& j) {
  if (!j.is_object() || j.value("format", "") != "sgcca-model")
    throw input_error("not an sgcca model file");
  const int version = j.at("version").get<int>();
  if (version != kModelFormatVersion)
    throw input_error("unsupported model format version " + std::to_string(version));
  CanonicalModel m;
  m.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
  m.ell = j.at("ell").get<Index>();
  m.g = matrix_from_json(j.at("g"));
  for (const auto& w : j.at("weights")) m.weights.push_back(matrix_from_json(w));
  for (const auto& mu : j.at("feature_means")) {
    const auto v = mu.get<std::vector<double>>();
    m.feature_means.push_back(Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size())));
  }
  if (j.contains("classifier")) {
    CentroidClassifier clf;
    clf.classes = j["classifier"].at("classes").get<std::vector<std::string>>();
    clf.centroids = matrix_from_json(j["classifier"].at("centroids"));
    m.classifier = std::move(clf);
  }
  m.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
  detail::require(m.g.rows() == m.ell, "G row count does not match ell");
  for (const auto& w : m.weights) detail::require(w.cols() == m.ell, "weight width does not match ell");
  detail::require(m.feature_means.empty() || m.feature_means.size() == m.weights.size(),
                  "feature mean count does not match the view count");
  return m;
}

inline void save_model(const CanonicalModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw input_error("cannot write '" + path + "'");
  out << model_to_json(model).dump(1) << '\n';
  if (!out) throw input_error("write failed for '" + path + "'");
}

/// Parses the whole document before building the model; any defect throws
/// input_error and nothing is returned.
inline CanonicalModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open '" + path + "'");
  try {
    return model_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw input_error(path + ": malformed model file (" + e.what() + ")");
  } catch (const input_error& e) {
    throw input_error(path + ": " + e.what());
  }
}

inline json report_to_json(const MetricsReport& r) {
  json j;
  j["format"] = "sgcca-report";
  j["version"] = kReportFormatVersion;
  j["correlation"] = r.correlation;
  j["reconstruction_error"] = r.reconstruction_error ? json(*r.reconstruction_error) : json(nullptr);
  j["sparsity_per_view"] = r.sparsity_per_view;
  j["sparsity_avg"] = r.sparsity_avg;
  j["accuracy"] = r.accuracy ? json(*r.accuracy) : json(nullptr);
  json pairs = json::object();
  for (const auto& [key, value] : r.aroc_pairs)
    pairs[std::to_string(key.first) + "-" + std::to_string(key.second)] = value;
  j["aroc_pairs"] = std::move(pairs);
  j["aroc_avg"] = r.aroc_avg ? json(*r.aroc_avg) : json(nullptr);
  return j;
}

/// 64-bit FNV-1a of a file's bytes, as 16 hex digits.
inline std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open '" + path + "'");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::istreambuf_iterator<char> it(in), end; it != end; ++it) {
    h ^= static_cast<unsigned char>(*it);
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace sgcca
