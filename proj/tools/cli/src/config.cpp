#include "fsda_cli/config.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <map>

namespace fsda::cli {

namespace fs = std::filesystem;

ConfigError::ConfigError(std::string field, const std::string& message)
    : PreconditionError("invalid '" + field + "': " + message), field_(std::move(field)) {}

std::string_view to_string(Command c) {
  switch (c) {
    case Command::build_graph: return "build-graph";
    case Command::train: return "train";
    case Command::cv: return "cv";
    case Command::bench: return "bench";
    case Command::info: return "info";
  }
  return "?";
}

std::string_view to_string(GraphKind g) {
  switch (g) {
    case GraphKind::knn: return "knn";
    case GraphKind::threshold: return "threshold";
    case GraphKind::precomputed: return "precomputed";
  }
  return "?";
}

ShiftGrid wide_bench_grid() { return ShiftGrid::decades(-9, 2); }

ShiftGrid tight_bench_grid() {
  std::vector<double> b;
  for (int i = 10; i <= 21; ++i) b.push_back(i * 1e-7);
  return ShiftGrid(std::move(b));
}

namespace {

void require_readable(const std::string& field, const std::string& path) {
  if (path.empty()) throw ConfigError(field, "a path is required");
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw ConfigError(field, "cannot read '" + path + "'");
}

void require_writable(const std::string& field, const std::string& path) {
  if (path.empty()) throw ConfigError(field, "an output path is required");
  fs::path parent = fs::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty() && !fs::is_directory(parent, ec))
    throw ConfigError(field, "directory '" + parent.string() + "' does not exist");
}

}  // namespace

void RunConfig::validate() const {
  require_readable("data", data);
  if (command == Command::info) return;

  switch (graph) {
    case GraphKind::knn:
      if (k < 1) throw ConfigError("k", "must be at least 1");
      break;
    case GraphKind::threshold:
      if (!(theta > 0.0 && theta <= 1.0)) throw ConfigError("theta", "must lie in (0, 1]");
      break;
    case GraphKind::precomputed:
      if (command == Command::build_graph)
        throw ConfigError("graph", "build-graph needs knn or threshold");
      if (needs_graph()) require_readable("graph-file", graph_file);
      break;
  }
  if (threads < 0) throw ConfigError("threads", "must be >= 0");
  if (command == Command::build_graph) {
    require_writable("output", output);
    return;
  }

  require_readable("labels", labels);
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha", "must lie in [0, 1]");
  if (algorithm == Algorithm::sa_sda && alpha == 0.0)
    throw ConfigError("alpha", "sa-sda requires alpha != 0 (with alpha = 0 every unlabeled sample is rated 0)");
  if (!(tol > 0.0)) throw ConfigError("tol", "must be positive");
  if (iters_spectral < 1) throw ConfigError("iters-spectral", "must be at least 1");
  if (iters_regression < 1) throw ConfigError("iters-regression", "must be at least 1");
  try {
    (void)beta_grid();
  } catch (const Error& e) {
    throw ConfigError("beta", e.what());
  }
  for (int it : iters_sweep)
    if (it < 1) throw ConfigError("iters-sweep", "entries must be at least 1");
  if (folds < 2) throw ConfigError("folds", "must be at least 2");
  if (inner_folds < 2) throw ConfigError("inner-folds", "must be at least 2");
  if (command == Command::train || command == Command::cv) require_writable("output", output);
  if (command == Command::bench && !output.empty()) require_writable("output", output);
}

ShiftGrid RunConfig::beta_grid() const {
  if (!betas.empty()) return ShiftGrid(betas);
  switch (command) {
    case Command::cv: return ShiftGrid::decades();
    case Command::bench: return bench_grid == BenchGrid::wide ? wide_bench_grid() : tight_bench_grid();
    default: return ShiftGrid({1e-3});
  }
}

std::vector<std::uint64_t> RunConfig::seed_list() const {
  if (!seeds.empty()) return seeds;
  if (command == Command::cv) return {1, 2, 3, 4, 5};
  return {1};
}

bool RunConfig::needs_graph() const {
  if (command == Command::build_graph) return true;
  if (command == Command::bench || command == Command::info) return false;
  return algorithm != Algorithm::lda && alpha > 0.0;
}

SdaProblem RunConfig::settings() const {
  SdaProblem p;
  p.alpha = algorithm == Algorithm::lda ? 0.0 : alpha;
  p.betas = beta_grid();
  p.sample_solve = {tol, iters_spectral};
  p.feature_solve = {tol, iters_regression};
  p.seed = seed_list().front();
  return p;
}

void register_options(CLI::App& app, RunConfig& cfg) {
  const std::map<std::string, Command> commands{{"build-graph", Command::build_graph},
                                                {"train", Command::train},
                                                {"cv", Command::cv},
                                                {"bench", Command::bench},
                                                {"info", Command::info}};
  const std::map<std::string, GraphKind> graphs{
      {"knn", GraphKind::knn}, {"threshold", GraphKind::threshold}, {"precomputed", GraphKind::precomputed}};
  const std::map<std::string, Algorithm> algorithms{{"fsda", Algorithm::fsda},
                                                    {"csr-sda", Algorithm::csr_sda},
                                                    {"sa-sda", Algorithm::sa_sda},
                                                    {"sr-sda", Algorithm::sr_sda},
                                                    {"lda", Algorithm::lda}};
  const std::map<std::string, BenchGrid> grids{{"wide", BenchGrid::wide}, {"tight", BenchGrid::tight}};

  app.set_config("--config", "", "key = value file; keys are the flag names");
  app.add_option_function<std::string>(
         "command", [&cfg, commands](const std::string& v) { cfg.command = commands.at(v); },
         "build-graph | train | cv | bench | info")
      ->required()
      ->check(CLI::IsMember(commands));
  app.add_option("--data", cfg.data, "sparse data matrix (text or binary)");
  app.add_option("--labels", cfg.labels, "label file, one of +1/-1/0 per line");
  app.add_option_function<std::string>(
         "--graph", [&cfg, graphs](const std::string& v) { cfg.graph = graphs.at(v); },
         "knn | threshold | precomputed")
      ->check(CLI::IsMember(graphs));
  app.add_option("--k", cfg.k, "neighbours per sample for knn");
  app.add_option("--theta", cfg.theta, "Tanimoto threshold");
  app.add_option("--graph-file", cfg.graph_file, "adjacency written by build-graph");
  app.add_option_function<std::string>(
         "--algorithm", [&cfg, algorithms](const std::string& v) { cfg.algorithm = algorithms.at(v); },
         "fsda | csr-sda | sa-sda | sr-sda | lda")
      ->check(CLI::IsMember(algorithms));
  app.add_option("--alpha", cfg.alpha, "graph regularization weight in [0, 1]");
  app.add_option("--beta", cfg.betas, "regularization value (repeatable)");
  app.add_option("--tol", cfg.tol, "relative residual tolerance");
  app.add_option("--iters-spectral", cfg.iters_spectral, "iteration budget of N-dimensional solves");
  app.add_option("--iters-regression", cfg.iters_regression, "iteration budget of D-dimensional solves");
  app.add_option("--seed", cfg.seeds, "random seed (repeatable)");
  app.add_option("--threads", cfg.threads, "kernel threads; 0 uses every core");
  app.add_option("--output", cfg.output, "output file or prefix");
  app.add_option("--iters-sweep", cfg.iters_sweep, "cv: iteration budgets to sweep, e.g. 2 3 5 10 20 40 60 80");
  app.add_option("--folds", cfg.folds, "cv: outer folds");
  app.add_option("--inner-folds", cfg.inner_folds, "cv: inner folds");
  app.add_option_function<std::string>(
         "--bench-grid", [&cfg, grids](const std::string& v) { cfg.bench_grid = grids.at(v); },
         "bench: wide | tight (ignored when --beta is given)")
      ->check(CLI::IsMember(grids));
  app.add_flag("--text-ratings", cfg.text_ratings, "train: also write ratings as CSV");
}

}  // namespace fsda::cli
