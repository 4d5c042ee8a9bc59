#include "fsda_cli/commands.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "fsda/eval.hpp"
#include "fsda/parallel.hpp"

namespace fsda::cli {

using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string join(std::span<const double> v, char sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += num(v[i]);
  }
  return s;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  return f;
}

void finish(std::ofstream& f, const std::string& path) {
  f.flush();
  if (!f) throw IoError("write to '" + path + "' failed");
}

struct Inputs {
  SparseMatrix x;
  LabelVector labels;
};

Inputs load_inputs(const RunConfig& cfg) {
  Inputs in{io::load_sparse(cfg.data), io::load_labels(cfg.labels)};
  if (in.labels.size() != static_cast<std::size_t>(in.x.rows()))
    throw ConfigError("labels", std::to_string(in.labels.size()) + " labels for " +
                                    std::to_string(in.x.rows()) + " data rows");
  return in;
}

SimilarityGraph build_graph(const RunConfig& cfg, const SparseMatrix& x) {
  if (cfg.graph == GraphKind::threshold) return threshold_graph(x, cfg.theta);
  if (cfg.k >= x.rows())
    throw ConfigError("k", "must be below the number of samples (" + std::to_string(x.rows()) + ")");
  return knn_graph(x, cfg.k);
}

json data_json(const SparseMatrix& x) {
  return {{"rows", x.rows()}, {"cols", x.cols()}, {"nnz", x.nnz()}, {"checksum", io::hex64(x.checksum())}};
}

json graph_json(const RunConfig& cfg) {
  json g{{"kind", to_string(cfg.graph)}};
  if (cfg.graph == GraphKind::knn) g["k"] = cfg.k;
  if (cfg.graph == GraphKind::threshold) g["theta"] = cfg.theta;
  if (cfg.graph == GraphKind::precomputed) g["file"] = cfg.graph_file;
  return g;
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const IoError*>(&e)) return kExitIo;
  if (dynamic_cast<const NumericalError*>(&e)) return kExitSolver;
  if (dynamic_cast<const Error*>(&e)) return kExitInput;
  return 1;
}

io::Provenance graph_provenance(const RunConfig& cfg, const SparseMatrix& x) {
  io::Provenance p{{"metric", "tanimoto"},
                   {"graph", std::string(to_string(cfg.graph))},
                   {"data_checksum", io::hex64(x.checksum())},
                   {"data_rows", std::to_string(x.rows())}};
  if (cfg.graph == GraphKind::knn) p["k"] = std::to_string(cfg.k);
  if (cfg.graph == GraphKind::threshold) p["theta"] = num(cfg.theta);
  return p;
}

Laplacian load_or_build_laplacian(const RunConfig& cfg, const SparseMatrix& x) {
  if (cfg.graph != GraphKind::precomputed) return laplacian(build_graph(cfg, x));
  io::Provenance prov;
  SparseMatrix s = io::load_sparse(cfg.graph_file, &prov);
  const auto sum = prov.find("data_checksum");
  if (sum == prov.end())
    throw ConfigError("graph-file", "no data_checksum provenance; rebuild it with build-graph");
  if (sum->second != io::hex64(x.checksum()))
    throw ConfigError("graph-file", "built from different data (checksum " + sum->second +
                                        ", data has " + io::hex64(x.checksum()) + ")");
  if (s.rows() != x.rows())
    throw DimensionError("graph has " + std::to_string(s.rows()) + " vertices, data has " +
                         std::to_string(x.rows()) + " rows");
  return laplacian(graph_from_adjacency(std::move(s)));
}

int cmd_build_graph(const RunConfig& cfg, std::ostream& out) {
  const SparseMatrix x = io::load_sparse(cfg.data);
  const SimilarityGraph g = build_graph(cfg, x);
  io::save_sparse(cfg.output, g.s, false, graph_provenance(cfg, x));
  Index isolated = 0;
  for (double d : g.degrees) isolated += d == 0.0;
  out << "graph " << to_string(cfg.graph) << ": " << x.rows() << " vertices, " << g.s.nnz() / 2
      << " edges, " << isolated << " isolated -> " << cfg.output << '\n';
  return kExitOk;
}

int cmd_train(const RunConfig& cfg, std::ostream& out) {
  const Inputs in = load_inputs(cfg);
  std::optional<Laplacian> l;
  if (cfg.needs_graph()) l = load_or_build_laplacian(cfg, in.x);

  SdaProblem settings = cfg.settings();
  const auto prepared = prepare_problem(in.x, l ? &*l : nullptr, in.labels, settings);
  const SdaSolution sol = solve(cfg.algorithm, prepared.problem);

  io::RatingsTable table;
  table.betas = sol.betas;
  for (const auto& r : sol.ratings) table.scores.push_back(prepared.restore(r.scores));

  const std::string ratings_path = cfg.output + ".ratings";
  {
    auto f = open_out(ratings_path);
    io::write_ratings_binary(f, table);
    finish(f, ratings_path);
  }
  if (cfg.text_ratings) {
    const std::string csv = cfg.output + ".ratings.csv";
    auto f = open_out(csv);
    io::write_ratings_text(f, table);
    finish(f, csv);
  }

  const SolveReport& r = sol.report;
  json report{
      {"command", "train"},
      {"algorithm", to_string(cfg.algorithm)},
      {"alpha", prepared.problem.alpha},
      {"betas", sol.betas},
      {"seed", settings.seed},
      {"tol", cfg.tol},
      {"iters_spectral", cfg.iters_spectral},
      {"iters_regression", cfg.iters_regression},
      {"data", data_json(in.x)},
      {"labels",
       {{"labeled", in.labels.n_labeled()}, {"class1", in.labels.n_class1()}, {"class2", in.labels.n_class2()}}},
      {"solve",
       {{"sample_iterations", r.sample_iterations},
        {"sample_converged", r.sample_converged},
        {"shifted_iterations", r.shifted_iterations},
        {"residual_norms", r.residual_norms},
        {"converged", r.converged},
        {"sample_applications", r.sample_applications},
        {"feature_applications", r.feature_applications}}},
      {"ratings_file", ratings_path},
      {"wall_ms", r.wall_ms}};
  if (cfg.needs_graph()) report["graph"] = graph_json(cfg);
  if (cfg.algorithm == Algorithm::sr_sda) {
    report["solve"]["lambda_nondiscriminative"] = r.lambda_nondiscriminative;
    report["solve"]["lambda_discriminative"] = r.lambda_discriminative;
  }
  const std::string report_path = cfg.output + ".json";
  {
    auto f = open_out(report_path);
    f << report.dump(2) << '\n';
    finish(f, report_path);
  }

  const bool ok = sol.all_converged();
  out << to_string(cfg.algorithm) << ": " << sol.betas.size() << " beta value(s), "
      << (ok ? "converged" : "NOT converged") << ", " << std::fixed << std::setprecision(1) << r.wall_ms
      << " ms -> " << ratings_path << '\n';
  return ok ? kExitOk : kExitSolver;
}

int cmd_cv(const RunConfig& cfg, std::ostream& out) {
  const Inputs in = load_inputs(cfg);
  std::optional<Laplacian> l;
  if (cfg.needs_graph()) l = load_or_build_laplacian(cfg, in.x);

  CvPlan plan;
  plan.outer_folds = cfg.folds;
  plan.inner_folds = cfg.inner_folds;
  plan.beta_grid = cfg.beta_grid();
  plan.seeds = cfg.seed_list();

  std::vector<std::pair<int, int>> budgets;
  if (cfg.iters_sweep.empty()) budgets.emplace_back(cfg.iters_spectral, cfg.iters_regression);
  for (int it : cfg.iters_sweep) budgets.emplace_back(it, it);

  const std::string jsonl_path = cfg.output + ".jsonl";
  const std::string csv_path = cfg.output + ".csv";
  auto jsonl = open_out(jsonl_path);
  auto csv = open_out(csv_path);
  csv << "algorithm,alpha,beta_grid,iterations,fold,seed,auc,wall_ms,chosen_beta\n";

  out << "algorithm  alpha  iterations  mean_auc  std_auc  mean_ms\n";
  for (auto [k1, k2] : budgets) {
    SdaProblem settings = cfg.settings();
    settings.sample_solve.max_iter = k1;
    settings.feature_solve.max_iter = k2;
    const ExperimentResult res = nested_cv(in.x, l ? &*l : nullptr, in.labels, cfg.algorithm, settings, plan);
    const std::string alg(to_string(res.algorithm));
    const std::string grid = join(res.beta_grid, ';');
    for (const auto& rec : res.records) {
      jsonl << json{{"kind", "fold"},
                    {"algorithm", alg},
                    {"alpha", res.alpha},
                    {"beta_grid", res.beta_grid},
                    {"iterations", k2},
                    {"iters_spectral", k1},
                    {"fold", rec.fold},
                    {"seed", rec.seed},
                    {"auc", rec.auc},
                    {"wall_ms", rec.wall_ms},
                    {"chosen_beta", rec.chosen_beta},
                    {"inner_auc", rec.inner_auc}}
                   .dump()
            << '\n';
      csv << alg << ',' << num(res.alpha) << ',' << grid << ',' << k2 << ',' << rec.fold << ',' << rec.seed
          << ',' << num(rec.auc) << ',' << num(rec.wall_ms) << ',' << num(rec.chosen_beta) << '\n';
    }
    jsonl << json{{"kind", "summary"},
                  {"algorithm", alg},
                  {"alpha", res.alpha},
                  {"beta_grid", res.beta_grid},
                  {"iterations", k2},
                  {"iters_spectral", k1},
                  {"records", res.records.size()},
                  {"mean_auc", res.mean_auc},
                  {"std_auc", res.std_auc},
                  {"mean_wall_ms", res.mean_wall_ms}}
                 .dump()
          << '\n';
    out << std::left << std::setw(11) << alg << std::setw(7) << num(res.alpha) << std::setw(12) << k2
        << std::fixed << std::setprecision(4) << std::setw(10) << res.mean_auc << std::setw(9) << res.std_auc
        << std::setprecision(2) << res.mean_wall_ms << '\n'
        << std::defaultfloat;
  }
  finish(jsonl, jsonl_path);
  finish(csv, csv_path);
  return kExitOk;
}

int cmd_bench(const RunConfig& cfg, std::ostream& out) {
  const Inputs in = load_inputs(cfg);
  const ShiftGrid grid = cfg.beta_grid();
  const ShiftedBenchReport rep = bench_shifted(in.x, in.labels, grid, cfg.tol, cfg.iters_regression);

  out << "X: " << in.x.rows() << " x " << in.x.cols() << ", nnz " << in.x.nnz() << ", tol " << cfg.tol
      << ", " << rep.betas.size() << " shifts\n";
  out << std::left << std::setw(14) << "beta" << std::setw(10) << "cg_iters" << "shifted_iters\n";
  for (std::size_t s = 0; s < rep.betas.size(); ++s)
    out << std::setw(14) << num(rep.betas[s]) << std::setw(10) << rep.cg_per_beta[s] << rep.shifted_per_beta[s]
        << '\n';
  out << std::fixed << std::setprecision(2) << "repeated CG " << rep.repeated_ms << " ms, shifted CG "
      << rep.shifted_ms << " ms (" << rep.shifted_iterations << " iterations), speed-up " << rep.speedup
      << "x\n"
      << std::defaultfloat;

  if (!cfg.output.empty()) {
    json j{{"command", "bench"},
           {"data", data_json(in.x)},
           {"tol", rep.tol},
           {"betas", rep.betas},
           {"cg_iterations", rep.cg_per_beta},
           {"shifted_iterations", rep.shifted_per_beta},
           {"shifted_base_iterations", rep.shifted_iterations},
           {"repeated_ms", rep.repeated_ms},
           {"shifted_ms", rep.shifted_ms},
           {"speedup", rep.speedup}};
    auto f = open_out(cfg.output);
    f << j.dump(2) << '\n';
    finish(f, cfg.output);
  }
  return kExitOk;
}

int cmd_info(const RunConfig& cfg, std::ostream& out) {
  io::Provenance prov;
  const SparseMatrix x = io::load_sparse(cfg.data, &prov);
  const double density =
      x.rows() && x.cols() ? static_cast<double>(x.nnz()) / (static_cast<double>(x.rows()) * x.cols()) : 0.0;
  out << "data      " << cfg.data << '\n'
      << "shape     " << x.rows() << " x " << x.cols() << '\n'
      << "nnz       " << x.nnz() << " (density " << density << ")\n"
      << "checksum  " << io::hex64(x.checksum()) << '\n';
  for (const auto& [k, v] : prov) out << "meta      " << k << " = " << v << '\n';
  if (!cfg.labels.empty()) {
    const LabelVector lv = io::load_labels(cfg.labels);
    out << "labels    " << lv.size() << " samples, " << lv.n_class1() << " class +1, " << lv.n_class2()
        << " class -1, " << lv.size() - static_cast<std::size_t>(lv.n_labeled()) << " unlabeled\n";
  }
  if (!cfg.graph_file.empty()) {
    io::Provenance gp;
    const SparseMatrix s = io::load_sparse(cfg.graph_file, &gp);
    out << "graph     " << s.rows() << " vertices, " << s.nnz() / 2 << " edges";
    const auto it = gp.find("data_checksum");
    if (it != gp.end()) out << (it->second == io::hex64(x.checksum()) ? ", matches data" : ", DIFFERENT data");
    out << '\n';
  }
  out << "threads   " << num_threads() << (have_openmp() ? " (OpenMP)" : " (serial build)") << '\n';
  return kExitOk;
}

int run_command(const RunConfig& cfg, std::ostream& out) {
  switch (cfg.command) {
    case Command::build_graph: return cmd_build_graph(cfg, out);
    case Command::train: return cmd_train(cfg, out);
    case Command::cv: return cmd_cv(cfg, out);
    case Command::bench: return cmd_bench(cfg, out);
    case Command::info: return cmd_info(cfg, out);
  }
  return kExitInput;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Semi-supervised discriminant analysis on sparse binary data", "fsda"};
  RunConfig cfg;
  register_options(app, cfg);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }
  try {
    cfg.validate();
    set_num_threads(cfg.threads);
    return run_command(cfg, out);
  } catch (const std::exception& e) {
    err << "fsda " << to_string(cfg.command) << ": " << e.what() << '\n';
    return exit_code_for(e);
  }
}

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"fsda"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace fsda::cli
