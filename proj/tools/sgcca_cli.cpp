// sgcca: synthesize data, fit GCCA / sparse GCCA models, evaluate them and
// run repeated benchmarks.
//
// Exit codes: 0 success, 1 numerical failure, 2 usage or input error.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sgcca/sgcca.hpp"

namespace fs = std::filesystem;
using namespace sgcca;

namespace {

std::size_t thread_count() {
  if (const char* env = std::getenv("SGCCA_NUM_THREADS")) {
    try {
      const long n = std::stol(env);
      if (n >= 1) return static_cast<std::size_t>(n);
    } catch (const std::exception&) {
    }
    throw input_error("SGCCA_NUM_THREADS must be a positive integer");
  }
  return detail::hardware_threads();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw input_error("cannot create output directory '" + dir + "'");
}

void write_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw input_error("cannot write '" + path + "'");
  out << j.dump(1) << '\n';
  if (!out) throw input_error("write failed for '" + path + "'");
}

struct Manifest {
  std::string command;
  json config = json::object();
  json inputs = json::array();
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void add_input(const std::string& path) {
    inputs.push_back({{"path", path}, {"fnv1a64", file_digest(path)}});
  }

  void write(const std::string& path) const {
    json j;
    j["command"] = command;
    j["config"] = config;
    j["inputs"] = inputs;
    j["seed"] = seed;
    j["threads"] = threads;
    j["version"] = kVersion;
    j["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_json(j, path);
  }
};

std::vector<Matrix> load_views(const std::vector<std::string>& paths) {
  std::vector<Matrix> views;
  for (const auto& p : paths) {
    if (!fs::exists(p)) throw input_error("view file '" + p + "' does not exist");
    views.push_back(load_matrix(p));
    if (views.size() > 1 && views.back().cols() != views.front().cols())
      throw input_error("'" + p + "' has " + std::to_string(views.back().cols()) +
                        " samples but '" + paths.front() + "' has " +
                        std::to_string(views.front().cols()));
  }
  return views;
}

// Solver flags shared by fit and bench; names mirror SolverConfig / FistaConfig.
struct SolverFlags {
  FitOptions fit;
  double fista_weight = 1.0;

  void attach(CLI::App* app) {
    app->add_option("--delta", fit.admm.delta, "proximity parameter")->capture_default_str();
    app->add_option("--rho", fit.admm.rho, "penalty growth factor")->capture_default_str();
    app->add_option("--beta-max", fit.admm.beta_max, "penalty cap")->capture_default_str();
    app->add_option("--tol1", fit.admm.eps1, "feasibility tolerance")->capture_default_str();
    app->add_option("--tol2", fit.admm.eps2, "scaled W-change tolerance")->capture_default_str();
    app->add_option("--max-iter", fit.admm.max_iter, "ADMM iteration cap")->capture_default_str();
    app->add_flag("--strict", fit.admm.strict, "stop on feasibility alone");
    app->add_option("--rank-tol", fit.admm.rank_tol, "relative singular value cut")->capture_default_str();
    app->add_flag("--center,!--no-center", fit.center, "center features (default on)");
    app->add_option("--fista-weight", fit.fista.weight, "l1 weight of the fixed-G variant")->capture_default_str();
    app->add_option("--fista-max-iter", fit.fista.max_iter, "FISTA iteration cap")->capture_default_str();
    app->add_option("--fista-tol", fit.fista.tol, "FISTA step tolerance")->capture_default_str();
  }

  json to_json() const {
    return {{"delta", fit.admm.delta},       {"rho", fit.admm.rho},
            {"beta_max", fit.admm.beta_max}, {"tol1", fit.admm.eps1},
            {"tol2", fit.admm.eps2},         {"max_iter", fit.admm.max_iter},
            {"strict", fit.admm.strict},     {"rank_tol", fit.admm.rank_tol},
            {"center", fit.center},          {"fista_weight", fit.fista.weight},
            {"fista_max_iter", fit.fista.max_iter}, {"fista_tol", fit.fista.tol}};
  }
};

struct SynthFlags {
  std::vector<Index> dims{1000, 1500, 1700};
  Index samples = 100;
  std::vector<double> sigmas{0.3, 0.4, 0.5};

  void attach(CLI::App* app) {
    app->add_option("--dims", dims, "view heights")->delimiter(',')->capture_default_str();
    app->add_option("--samples", samples, "sample count")->capture_default_str();
    app->add_option("--sigmas", sigmas, "per-view noise levels")->delimiter(',')->capture_default_str();
  }

  SyntheticConfig config() const {
    SyntheticConfig c;
    detail::require(dims.size() == c.patterns.size(),
                    "--dims needs exactly " + std::to_string(c.patterns.size()) + " values");
    c.dims = dims;
    c.samples = samples;
    c.sigmas = sigmas;
    return c;
  }

  json to_json() const { return {{"dims", dims}, {"samples", samples}, {"sigmas", sigmas}}; }
};

Algorithm parse_algo(const std::string& s) {
  if (s == "gcca") return Algorithm::maxvar;
  return algorithm_from_string(s);
}

std::vector<std::pair<std::size_t, std::size_t>> parse_pairs(const std::string& text,
                                                             std::size_t views) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-');
    detail::require(dash != std::string::npos, "retrieval pair '" + item + "' is not of the form i-j");
    const auto i = std::stoul(item.substr(0, dash));
    const auto j = std::stoul(item.substr(dash + 1));
    detail::require(i >= 1 && j >= 1 && i <= views && j <= views && i != j,
                    "retrieval pair '" + item + "' is out of range");
    out.emplace_back(i - 1, j - 1);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse generalized canonical correlation analysis toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  // synth
  auto* synth = app.add_subcommand("synth", "generate the rank-one three-view synthetic family");
  SynthFlags synth_flags;
  synth_flags.attach(synth);
  std::uint64_t synth_seed = 0;
  std::string synth_out;
  synth->add_option("--seed", synth_seed, "generator seed")->capture_default_str();
  synth->add_option("--out", synth_out, "output directory")->required();

  // fit
  auto* fit = app.add_subcommand("fit", "fit a model to view files");
  std::string algo_name;
  std::vector<std::string> fit_views;
  std::string fit_labels, fit_out;
  Index fit_ell = 1;
  std::uint64_t fit_seed = 0;
  SolverFlags fit_flags;
  fit->add_option("--algo", algo_name, "gcca | sgcca-admm | sgcca-fista")
      ->required()
      ->check(CLI::IsMember({"gcca", "sgcca-admm", "sgcca-fista"}));
  fit->add_option("--views", fit_views, "view matrix files")->required()->expected(1, -1);
  fit->add_option("--labels", fit_labels, "label file; adds a one-hot label view");
  fit->add_option("--ell", fit_ell, "latent dimension (0 = rank of X1 Xlabel^T with --labels)")
      ->capture_default_str();
  fit->add_option("--seed", fit_seed, "recorded in the manifest")->capture_default_str();
  fit->add_option("--out", fit_out, "output directory")->required();
  fit_flags.attach(fit);

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate a model on view files");
  std::string eval_model, eval_labels, eval_out, eval_pairs;
  std::vector<std::string> eval_views;
  double eval_zero_tol = 1e-6;
  bool eval_no_retrieval = false;
  eval->add_option("--model", eval_model, "model file")->required();
  eval->add_option("--views", eval_views, "view matrix files")->required()->expected(1, -1);
  eval->add_option("--labels", eval_labels, "label file for classification accuracy");
  eval->add_option("--zero-tol", eval_zero_tol, "sparsity threshold")->capture_default_str();
  eval->add_option("--retrieval-pairs", eval_pairs, "view pairs for AROC, e.g. 1-2,1-3 (default: all)");
  eval->add_flag("--no-retrieval", eval_no_retrieval, "skip AROC");
  eval->add_option("--out", eval_out, "report file")->required();

  // bench
  auto* bench = app.add_subcommand("bench", "repeat synth -> split -> fit -> eval");
  SynthFlags bench_synth;
  SolverFlags bench_flags;
  int repeats = 1;
  std::uint64_t bench_seed = 0;
  double train_fraction = 0.5;
  double bench_zero_tol = 1e-6;
  std::vector<std::string> bench_algos{"gcca", "sgcca-admm", "sgcca-fista"};
  std::string bench_out;
  Index bench_ell = 1;
  bench_synth.attach(bench);
  bench_flags.attach(bench);
  bench->add_option("--repeats", repeats, "number of runs")->capture_default_str();
  bench->add_option("--seed", bench_seed, "master seed")->capture_default_str();
  bench->add_option("--train-fraction", train_fraction, "training share")->capture_default_str();
  bench->add_option("--zero-tol", bench_zero_tol, "sparsity threshold")->capture_default_str();
  bench->add_option("--ell", bench_ell, "latent dimension")->capture_default_str();
  bench->add_option("--algos", bench_algos, "algorithms")
      ->delimiter(',')
      ->check(CLI::IsMember({"gcca", "sgcca-admm", "sgcca-fista"}))
      ->capture_default_str();
  bench->add_option("--out", bench_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const std::size_t threads = thread_count();
    Manifest manifest;
    manifest.threads = threads;

    if (*synth) {
      manifest.command = "synth";
      auto cfg = synth_flags.config();
      cfg.seed = synth_seed;
      manifest.seed = synth_seed;
      manifest.config = synth_flags.to_json();
      const auto data = generate_synthetic(cfg);
      ensure_dir(synth_out);
      for (std::size_t j = 0; j < data.dataset.views.size(); ++j) {
        const auto tag = std::to_string(j + 1);
        save_matrix(data.dataset.views[j], synth_out + "/view_" + tag + ".csv");
        save_matrix(data.loadings[j], synth_out + "/support_" + tag + ".csv");
      }
      save_matrix(data.latent, synth_out + "/latent.csv");
      manifest.write(synth_out + "/manifest.json");
      return 0;
    }

    if (*fit) {
      manifest.command = "fit";
      manifest.seed = fit_seed;
      auto opt = fit_flags.fit;
      opt.algorithm = parse_algo(algo_name);
      opt.ell = fit_ell;
      opt.admm.threads = threads;
      opt.fista.threads = threads;
      auto views = load_views(fit_views);
      for (const auto& p : fit_views) manifest.add_input(p);
      std::optional<std::vector<std::string>> labels;
      if (!fit_labels.empty()) {
        labels = load_labels(fit_labels);
        manifest.add_input(fit_labels);
      } else {
        detail::require(fit_ell >= 1, "--ell 0 requires --labels");
      }
      manifest.config = fit_flags.to_json();
      manifest.config["algo"] = algo_name;
      manifest.config["ell"] = fit_ell;
      manifest.config["views"] = fit_views;
      manifest.config["labels"] = fit_labels;

      const auto outcome = fit_pipeline(std::move(views), labels, opt);
      ensure_dir(fit_out);
      save_model(outcome.model, fit_out + "/model.json");
      if (outcome.trace) {
        std::ofstream trace(fit_out + "/trace.csv");
        write_trace(trace, *outcome.trace);
        json kkt;
        kkt["stationarity"] = outcome.kkt->stationarity;
        kkt["feasibility"] = outcome.kkt->feasibility;
        kkt["orthogonality"] = outcome.kkt->orthogonality;
        kkt["decision"] = to_string(outcome.trace->decision);
        write_json(kkt, fit_out + "/kkt.json");
      }
      manifest.write(fit_out + "/manifest.json");
      return 0;
    }

    if (*eval) {
      manifest.command = "eval";
      const auto model = load_model(eval_model);
      manifest.add_input(eval_model);
      auto views = load_views(eval_views);
      for (const auto& p : eval_views) manifest.add_input(p);
      std::optional<std::vector<std::string>> labels;
      if (!eval_labels.empty()) {
        labels = load_labels(eval_labels);
        manifest.add_input(eval_labels);
      }
      const std::size_t data_views = views.size();
      const bool training = is_training_data(model, views);
      const auto prepared = prepare_views(model, std::move(views), labels ? &*labels : nullptr);

      EvalOptions opt;
      opt.zero_tol = eval_zero_tol;
      opt.training_data = training;
      if (labels && model.classifier) opt.labels = &*labels;
      if (!eval_no_retrieval) {
        if (!eval_pairs.empty()) {
          opt.retrieval_pairs = parse_pairs(eval_pairs, data_views);
        } else if (prepared.front().cols() >= 2) {
          for (std::size_t i = 0; i < data_views; ++i)
            for (std::size_t j = i + 1; j < data_views; ++j) opt.retrieval_pairs.emplace_back(i, j);
        }
      }
      const auto report = evaluate(model, prepared, opt);
      manifest.config = {{"model", eval_model}, {"views", eval_views}, {"labels", eval_labels},
                         {"zero_tol", eval_zero_tol}, {"retrieval_pairs", eval_pairs}};
      const fs::path out_path(eval_out);
      if (out_path.has_parent_path()) ensure_dir(out_path.parent_path().string());
      write_json(report_to_json(report), eval_out);
      manifest.write(eval_out + ".manifest.json");
      return 0;
    }

    if (*bench) {
      manifest.command = "bench";
      manifest.seed = bench_seed;
      BenchConfig cfg;
      cfg.synth = bench_synth.config();
      cfg.synth.ell = bench_ell;
      cfg.repeats = repeats;
      cfg.master_seed = bench_seed;
      cfg.train_fraction = train_fraction;
      cfg.zero_tol = bench_zero_tol;
      cfg.fit = bench_flags.fit;
      cfg.fit.admm.threads = 1;
      cfg.fit.fista.threads = 1;
      cfg.run_threads = threads;
      cfg.algorithms.clear();
      for (const auto& a : bench_algos) cfg.algorithms.push_back(parse_algo(a));
      manifest.config = bench_flags.to_json();
      manifest.config.update(bench_synth.to_json());
      manifest.config["repeats"] = repeats;
      manifest.config["train_fraction"] = train_fraction;
      manifest.config["zero_tol"] = bench_zero_tol;
      manifest.config["ell"] = bench_ell;
      manifest.config["algos"] = bench_algos;

      const auto result = run_bench(cfg);
      ensure_dir(bench_out);
      write_json(bench_to_json(result), bench_out + "/bench.json");
      manifest.write(bench_out + "/manifest.json");
      return 0;
    }
  } catch (const input_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const numerical_error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
