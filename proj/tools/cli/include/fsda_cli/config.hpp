#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fsda/error.hpp"
#include "fsda/krylov.hpp"
#include "fsda/sda.hpp"

namespace CLI {
class App;
}

namespace fsda::cli {

enum class Command { build_graph, train, cv, bench, info };
enum class GraphKind { knn, threshold, precomputed };
enum class BenchGrid { wide, tight };

// A config invariant failed; field() names the offending key.
class ConfigError : public PreconditionError {
 public:
  ConfigError(std::string field, const std::string& message);
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct RunConfig {
  Command command = Command::info;
  std::string data;
  std::string labels;
  GraphKind graph = GraphKind::knn;
  Index k = 5;
  double theta = 0.4;
  std::string graph_file;
  Algorithm algorithm = Algorithm::fsda;
  double alpha = 0.5;
  std::vector<double> betas;  // empty: the command's default grid
  double tol = 1e-6;
  int iters_spectral = 1000;
  int iters_regression = 1000;
  std::vector<std::uint64_t> seeds;  // empty: {1} for train, {1..5} for cv
  int threads = 0;                   // 0: all available cores
  std::string output;
  std::vector<int> iters_sweep;  // cv only; empty: one run at the given budgets
  int folds = 5;
  int inner_folds = 5;
  BenchGrid bench_grid = BenchGrid::wide;
  bool text_ratings = false;

  // Throws ConfigError naming the first offending field.
  void validate() const;

  ShiftGrid beta_grid() const;
  std::vector<std::uint64_t> seed_list() const;
  bool needs_graph() const;
  SdaProblem settings() const;
};

std::string_view to_string(Command c);
std::string_view to_string(GraphKind g);

// Registers the positional command, every flag and --config on `app`,
// binding them to `cfg`. Config files hold "key = value" lines with the
// flag names as keys; lists use [a, b, ...].
void register_options(CLI::App& app, RunConfig& cfg);

// Wide and tight 12-value grids of the shifted-CG timing table.
ShiftGrid wide_bench_grid();
ShiftGrid tight_bench_grid();

}  // namespace fsda::cli
