#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fsda/graph.hpp"
#include "fsda/io.hpp"
#include "fsda_cli/config.hpp"

namespace fsda::cli {

// Stable process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitIo = 4;

// Maps a library exception to its exit code (1 for anything unexpected).
int exit_code_for(const std::exception& e);

// Provenance written ahead of a graph file.
io::Provenance graph_provenance(const RunConfig& cfg, const SparseMatrix& x);

// The Laplacian for cfg: built from X, or read from graph-file after checking
// that its recorded data checksum and row count match X.
Laplacian load_or_build_laplacian(const RunConfig& cfg, const SparseMatrix& x);

int cmd_build_graph(const RunConfig& cfg, std::ostream& out);
int cmd_train(const RunConfig& cfg, std::ostream& out);
int cmd_cv(const RunConfig& cfg, std::ostream& out);
int cmd_bench(const RunConfig& cfg, std::ostream& out);
int cmd_info(const RunConfig& cfg, std::ostream& out);

int run_command(const RunConfig& cfg, std::ostream& out);

// Full entry point: parses argv, validates, runs, and reports errors on `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace fsda::cli
