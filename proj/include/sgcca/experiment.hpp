#pragma once

// End-to-end pipelines shared by the command-line tool and the acceptance
// suite: fit with optional centering and label view, evaluate on held-out
// data, and repeated synthetic benchmarks with mean/std aggregation.

#include <bit>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sgcca/admm.hpp"
#include "sgcca/fista.hpp"
#include "sgcca/io.hpp"
#include "sgcca/metrics.hpp"
#include "sgcca/synthetic.hpp"

namespace sgcca {

inline constexpr const char* kVersion = "0.1.0";

struct FitOptions {
  Algorithm algorithm = Algorithm::sgcca_admm;
  Index ell = 1;  // 0 selects rank(X_1 X_label^T) when labels are given
  bool center = true;
  SolverConfig admm;
  FistaConfig fista;
};

struct FitOutcome {
  CanonicalModel model;
  std::optional<IterationTrace> trace;
  std::optional<KktReport> kkt;
};

namespace detail {

inline std::string num(double v) { return format_number(v); }

/// FNV-1a over the bit patterns of every view entry, as 16 hex digits.
inline std::string views_fingerprint(const std::vector<Matrix>& views) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t word) {
    for (int b = 0; b < 8; ++b) {
      h ^= (word >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& v : views) {
    mix(static_cast<std::uint64_t>(v.rows()));
    mix(static_cast<std::uint64_t>(v.cols()));
    for (Index i = 0; i < v.size(); ++i) mix(std::bit_cast<std::uint64_t>(v.data()[i]));
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace detail

/// Centers (optionally), appends the one-hot label view when labels are given,
/// fits the chosen algorithm and attaches means, classifier and metadata.
inline FitOutcome fit_pipeline(std::vector<Matrix> views,
                               const std::optional<std::vector<std::string>>& labels,
                               const FitOptions& opt) {
  detail::require(!views.empty(), "no views given");
  const std::string fingerprint = detail::views_fingerprint(views);
  std::optional<std::vector<std::string>> classes;
  if (labels) {
    detail::require(static_cast<Index>(labels->size()) == views.front().cols(),
                    "label count does not match the sample count");
    classes = sorted_classes(*labels);
    views.push_back(one_hot(*labels, *classes));
  }

  std::vector<Vector> means;
  if (opt.center) {
    for (auto& v : views) {
      means.push_back(feature_means(v));
      v = center_with(v, means.back());
    }
  }

  MultiviewDataset data;
  data.views = std::move(views);
  data.labels = labels;
  data.ell = opt.ell;
  if (labels && opt.ell == 0) data.ell = classification_ell(data.views.front(), data.views.back());
  data.validate();

  FitOutcome out;
  const double rank_tol = opt.admm.rank_tol;
  const std::size_t threads = opt.admm.threads;
  auto ops = decompose_views(data, rank_tol, threads);
  switch (opt.algorithm) {
    case Algorithm::maxvar:
      out.model = fit_maxvar(ops, data.ell);
      break;
    case Algorithm::sgcca_admm: {
      auto res = fit_admm(augment(std::move(ops)), data.ell, opt.admm);
      out.model = std::move(res.model);
      out.trace = std::move(res.trace);
      out.kkt = std::move(res.kkt);
      break;
    }
    case Algorithm::sgcca_fista:
      out.model = fit_fixed_g(ops, data.ell, opt.fista);
      break;
  }

  out.model.feature_means = std::move(means);
  if (labels)
    out.model.classifier = build_centroid_classifier(out.model.weights.front(),
                                                     data.views.front(), *labels);
  auto& md = out.model.metadata;
  md["version"] = kVersion;
  md["center"] = opt.center ? "true" : "false";
  md["rank_tol"] = detail::num(rank_tol);
  md["samples"] = std::to_string(data.num_samples());
  md["train_fingerprint"] = fingerprint;
  if (opt.algorithm == Algorithm::sgcca_admm) {
    md["delta"] = detail::num(opt.admm.delta);
    md["rho"] = detail::num(opt.admm.rho);
    md["beta_max"] = detail::num(opt.admm.beta_max);
    md["eps1"] = detail::num(opt.admm.eps1);
    md["eps2"] = detail::num(opt.admm.eps2);
    md["max_iter"] = std::to_string(opt.admm.max_iter);
    md["strict"] = opt.admm.strict ? "true" : "false";
    md["iterations"] = std::to_string(out.trace->records.size());
    md["decision"] = to_string(out.trace->decision);
  } else if (opt.algorithm == Algorithm::sgcca_fista) {
    md["fista_max_iter"] = std::to_string(opt.fista.max_iter);
    md["fista_tol"] = detail::num(opt.fista.tol);
    md["fista_weight"] = detail::num(opt.fista.weight);
  }
  return out;
}

/// True when `views` (raw, before label view and centering) are the data the
/// model was fitted on, so G describes their samples.
inline bool is_training_data(const CanonicalModel& model, const std::vector<Matrix>& views) {
  const auto it = model.metadata.find("train_fingerprint");
  return it != model.metadata.end() && it->second == detail::views_fingerprint(views);
}

/// Applies the model's centering to raw views and appends the one-hot label
/// view when the model was fitted with labels.
inline std::vector<Matrix> prepare_views(const CanonicalModel& model, std::vector<Matrix> views,
                                         const std::vector<std::string>* labels) {
  if (model.classifier) {
    detail::require(labels != nullptr, "model was fitted with labels; test labels are required");
    detail::require(static_cast<Index>(labels->size()) == views.front().cols(),
                    "label count does not match the sample count");
    views.push_back(one_hot(*labels, model.classifier->classes));
  }
  detail::require(views.size() == model.num_views(),
                  "model has " + std::to_string(model.num_views()) + " views, got " +
                      std::to_string(views.size()));
  if (!model.feature_means.empty())
    for (std::size_t j = 0; j < views.size(); ++j) {
      detail::require(views[j].rows() == model.feature_means[j].size(),
                      "view " + std::to_string(j + 1) + ": feature count does not match the model");
      views[j] = center_with(views[j], model.feature_means[j]);
    }
  return views;
}

// ---------------------------------------------------------------------------
// Repeated synthetic benchmark.

struct BenchConfig {
  SyntheticConfig synth;
  int repeats = 1;
  std::uint64_t master_seed = 0;
  double train_fraction = 0.5;
  std::vector<Algorithm> algorithms{Algorithm::maxvar, Algorithm::sgcca_admm,
                                    Algorithm::sgcca_fista};
  FitOptions fit;              // algorithm and ell fields are overridden per run
  double zero_tol = 1e-6;
  std::size_t run_threads = 1;  // concurrent sub-runs
};

/// Metric name -> value for one (run, algorithm). Names are stable keys.
using RunMetrics = std::map<std::string, double>;

struct BenchRun {
  int index = 0;
  std::uint64_t data_seed = 0;
  std::uint64_t split_seed = 0;
  std::map<std::string, RunMetrics> by_algorithm;
};

struct Aggregate {
  double mean = 0.0;
  double stddev = 0.0;
};

struct BenchResult {
  std::vector<BenchRun> runs;
  std::map<std::string, std::map<std::string, Aggregate>> aggregates;  // algo -> metric
};

/// Synthesize, split, fit on the training half and evaluate one run.
inline BenchRun bench_single(const BenchConfig& cfg, int index) {
  BenchRun run;
  run.index = index;
  run.data_seed = derive_seed(cfg.master_seed, 2 * static_cast<std::uint64_t>(index));
  run.split_seed = derive_seed(cfg.master_seed, 2 * static_cast<std::uint64_t>(index) + 1);

  SyntheticConfig sc = cfg.synth;
  sc.seed = run.data_seed;
  const auto data = generate_synthetic(sc);
  const auto parts = split(data.dataset, cfg.train_fraction, run.split_seed);

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < parts.test.views.size(); ++i)
    for (std::size_t j = i + 1; j < parts.test.views.size(); ++j) pairs.emplace_back(i, j);

  for (const auto algo : cfg.algorithms) {
    FitOptions fo = cfg.fit;
    fo.algorithm = algo;
    fo.ell = cfg.synth.ell;
    const auto fitted = fit_pipeline(parts.train.views, std::nullopt, fo);
    const auto& model = fitted.model;
    const auto train_views = prepare_views(model, parts.train.views, nullptr);
    const auto test_views = prepare_views(model, parts.test.views, nullptr);

    RunMetrics m;
    m["train_reconstruction_error"] = reconstruction_error(model, train_views);
    m["train_correlation"] = total_correlation(model, train_views);
    m["test_correlation"] = total_correlation(model, test_views);
    const auto [per_view, avg] = sparsity(model, cfg.zero_tol);
    for (std::size_t j = 0; j < per_view.size(); ++j) {
      m["sparsity_" + std::to_string(j + 1)] = per_view[j];
      m["support_recovery_" + std::to_string(j + 1)] =
          support_recovery(model.weights[j], data.loadings[j], cfg.zero_tol);
    }
    m["sparsity_avg"] = avg;
    double aroc_sum = 0.0;
    for (const auto& [i, j] : pairs) {
      const double a = aroc(model, test_views, i, j);
      m["aroc_" + std::to_string(i + 1) + "_" + std::to_string(j + 1)] = a;
      aroc_sum += a;
    }
    if (!pairs.empty()) m["aroc_avg"] = aroc_sum / static_cast<double>(pairs.size());
    if (fitted.trace) {
      m["iterations"] = static_cast<double>(fitted.trace->records.size());
      double res = 0.0;
      for (double r : fitted.kkt->feasibility) res = std::max(res, r);
      m["final_primal_residual"] = res;
      double st = 0.0;
      for (double r : fitted.kkt->stationarity) st = std::max(st, r);
      m["kkt_stationarity"] = st;
      double first = 0.0, orth = 0.0;
      for (double r : fitted.trace->records.front().primal_residual) first = std::max(first, r);
      for (const auto& rec : fitted.trace->records) orth = std::max(orth, rec.orthogonality_error);
      m["initial_primal_residual"] = first;
      m["max_orthogonality_error"] = orth;
    }
    run.by_algorithm[to_string(algo)] = std::move(m);
  }
  return run;
}

inline BenchResult run_bench(const BenchConfig& cfg) {
  detail::require(cfg.repeats >= 1, "repeat count must be at least 1");
  BenchResult out;
  out.runs.resize(static_cast<std::size_t>(cfg.repeats));
  detail::parallel_for(out.runs.size(), cfg.run_threads, [&](std::size_t r) {
    try {
      out.runs[r] = bench_single(cfg, static_cast<int>(r));
    } catch (const std::exception& e) {
      throw numerical_error("run " + std::to_string(r) + " (data seed " +
                            std::to_string(derive_seed(cfg.master_seed, 2 * r)) +
                            ") failed: " + e.what());
    }
  });

  // Aggregate in run order.
  std::map<std::string, std::map<std::string, std::vector<double>>> samples;
  for (const auto& run : out.runs)
    for (const auto& [algo, metrics] : run.by_algorithm)
      for (const auto& [name, value] : metrics) samples[algo][name].push_back(value);
  for (const auto& [algo, metrics] : samples)
    for (const auto& [name, values] : metrics) {
      Aggregate a;
      for (double v : values) a.mean += v;
      a.mean /= static_cast<double>(values.size());
      if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - a.mean) * (v - a.mean);
        a.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
      }
      out.aggregates[algo][name] = a;
    }
  return out;
}

inline json bench_to_json(const BenchResult& res) {
  json j;
  j["format"] = "sgcca-bench";
  j["version"] = kReportFormatVersion;
  j["runs"] = json::array();
  for (const auto& run : res.runs) {
    json r;
    r["index"] = run.index;
    r["data_seed"] = run.data_seed;
    r["split_seed"] = run.split_seed;
    r["metrics"] = run.by_algorithm;
    j["runs"].push_back(std::move(r));
  }
  json agg = json::object();
  for (const auto& [algo, metrics] : res.aggregates)
    for (const auto& [name, a] : metrics) agg[algo][name] = {{"mean", a.mean}, {"std", a.stddev}};
  j["aggregates"] = std::move(agg);
  return j;
}

}  // namespace sgcca
