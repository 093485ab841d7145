// entcert: generate datasets, certify entanglement, evaluate witnesses,
// search product states and run parameter sweeps.
//
// Exit codes: 0 separable-compatible / ok, 3 entanglement detected,
// 1 solver failure, 2 usage or input error.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "entcert/certify.hpp"
#include "entcert/corrdata.hpp"
#include "entcert/error.hpp"
#include "entcert/physmodels.hpp"
#include "entcert/seporacle.hpp"
#include "entcert/witness.hpp"
#include "entcert/witnesslab.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace entcert;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSolver = 1;
constexpr int kExitUsage = 2;
constexpr int kExitEntangled = 3;
constexpr int kFormatVersion = 1;

struct Globals {
  std::string out = ".";
  std::uint64_t seed = 1;
  double tol = 1e-8;
  int max_iter = 200;
  int level = 1;
  std::string scheme = "auto";
  bool dump_layout = false;
  std::string solver_trace;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string timestamp() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + path.string());
  f << text;
}

json globals_json(const Globals& g) {
  return {{"out", g.out},       {"seed", g.seed},           {"tol", g.tol},
          {"max_iter", g.max_iter}, {"level", g.level},      {"scheme", g.scheme},
          {"dump_layout", g.dump_layout}, {"solver_trace", g.solver_trace}};
}

void write_manifest(const Globals& g, const std::string& command, const json& config, const json& outputs, int exit_code) {
  json m;
  m["format_version"] = kFormatVersion;
  m["command"] = command;
  m["globals"] = globals_json(g);
  m["config"] = config;
  m["outputs"] = outputs;
  m["exit_code"] = exit_code;
  m["timestamp"] = timestamp();
  write_text(fs::path(g.out) / "manifest.json", m.dump(2) + "\n");
}

SolverOptions solver_options(const Globals& g) {
  SolverOptions o;
  o.gap_tol = g.tol;
  o.feas_tol = g.tol;
  o.max_iter = g.max_iter;
  o.validate();
  return o;
}

CertifyOptions certify_options(const Globals& g) {
  CertifyOptions o;
  o.level = g.level;
  if (g.scheme != "auto") o.scheme = parse_scheme_kind(g.scheme);
  o.solver = solver_options(g);
  return o;
}

// ---- generate

struct GenerateArgs {
  std::string kind;
  double lambda = 0.0;
  int n = 2;
  double time = 0.0;
  std::string model = "heisenberg";
  double temp = 1.0;
  double g = 0.0;
  double j = 1.0;
  std::string file;
};

ModelSpec model_spec(const std::string& model, int n, double g, double j) {
  ModelSpec s;
  if (model == "heisenberg") {
    s.kind = ModelKind::Heisenberg;
  } else if (model == "ising") {
    s.kind = ModelKind::TransverseIsing;
  } else {
    throw UsageError("unknown model '" + model + "' (heisenberg or ising)");
  }
  s.n = n;
  s.g = g;
  s.J = j;
  return s;
}

CorrelationDataset generate_dataset(const GenerateArgs& a, std::uint64_t seed, json& config) {
  config = {{"generator", a.kind}};
  if (a.kind == "werner") {
    config["lambda"] = a.lambda;
    return werner_dataset(a.lambda);
  }
  if (a.kind == "quench-1d") {
    config["n"] = a.n;
    config["time"] = a.time;
    return quench_dataset(quench_amplitudes(a.n, a.time));
  }
  if (a.kind == "thermal") {
    config["model"] = a.model;
    config["n"] = a.n;
    config["temp"] = a.temp;
    config["g"] = a.g;
    config["J"] = a.j;
    return thermal_dataset_ed(model_spec(a.model, a.n, a.g, a.j), a.temp);
  }
  config["n"] = a.n;
  config["seed"] = seed;
  return dataset_of(random_product_state(a.n, seed));
}

int cmd_generate(const Globals& g, const GenerateArgs& a) {
  json config;
  const CorrelationDataset ds = generate_dataset(a, g.seed, config);
  const fs::path path = a.file.empty() ? fs::path(g.out) / (a.kind + ".json") : fs::path(a.file);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_dataset(ds, path);
  std::cout << "wrote " << ds.size() << " correlators on " << ds.n_sites() << " sites to " << path.string() << "\n";
  write_manifest(g, "generate", config, {{"dataset", path.string()}}, kExitOk);
  return kExitOk;
}

// ---- certify

json solution_json(const Certification& c) {
  const SdpSolution& s = c.solution;
  json doc;
  doc["format_version"] = kFormatVersion;
  doc["status"] = to_string(s.status);
  doc["scheme"] = scheme_name(c.scheme);
  doc["level"] = c.problem.layout.basis.level;
  doc["gamma_dim"] = c.problem.layout.dim();
  doc["free_var_count"] = c.problem.layout.free_var_count;
  doc["lambda_star"] = s.lambda_star;
  doc["entangled"] = c.entangled;
  doc["duality_gap"] = s.duality_gap;
  doc["primal_objective"] = s.primal_objective;
  doc["dual_objective"] = s.dual_objective;
  doc["w_dot_c"] = s.w_dot_c;
  doc["dual_residual"] = s.dual_residual;
  doc["iterations"] = s.iterations;
  json w = json::array();
  for (std::size_t a = 0; a < c.problem.labels.size(); ++a) w.push_back({{"label", c.problem.labels[a].str()}, {"value", s.w_data[a]}});
  doc["dual_weights"] = w;
  return doc;
}

std::string trace_csv(const std::vector<IterationRecord>& trace) {
  std::ostringstream os;
  os.precision(17);
  os << "iteration,primal_obj,dual_obj,gap,slack_infeas,cert_infeas,mu,step_x,step_s\n";
  for (const auto& r : trace) {
    os << r.iteration << ',' << r.primal_obj << ',' << r.dual_obj << ',' << r.gap << ',' << r.slack_infeas << ','
       << r.cert_infeas << ',' << r.mu << ',' << r.step_x << ',' << r.step_s << '\n';
  }
  return os.str();
}

int cmd_certify(const Globals& g, const std::string& dataset_path) {
  const CorrelationDataset ds = read_dataset(dataset_path);
  const Certification c = certify(ds, certify_options(g));
  const SdpSolution& s = c.solution;
  const fs::path out(g.out);
  json outputs;

  std::printf("scheme      %s\n", scheme_name(c.scheme).c_str());
  std::printf("status      %s\n", to_string(s.status).c_str());
  std::printf("lambda*     %.12g\n", s.lambda_star);
  std::printf("gap         %.3e\n", s.duality_gap);
  std::printf("iterations  %d\n", s.iterations);

  write_text(out / "solution.json", solution_json(c).dump(2) + "\n");
  outputs["solution"] = (out / "solution.json").string();
  if (g.dump_layout) {
    write_text(out / "layout.txt", dump_layout(c.problem.layout));
    outputs["layout"] = (out / "layout.txt").string();
  }
  if (!g.solver_trace.empty()) {
    write_text(g.solver_trace, trace_csv(s.trace));
    outputs["solver_trace"] = g.solver_trace;
  }

  int code = kExitOk;
  if (s.status != SolveStatus::Optimal) {
    std::printf("verdict     solver failure\n");
    code = kExitSolver;
  } else if (c.entangled) {
    const Witness w = extract_witness(s, c.problem);
    write_witness(w, out / "witness.json");
    outputs["witness"] = (out / "witness.json").string();
    std::printf("verdict     entangled\n");
    code = kExitEntangled;
  } else {
    std::printf("verdict     separable-compatible\n");
  }
  write_manifest(g, "certify", {{"dataset", dataset_path}}, outputs, code);
  return code;
}

// ---- witness eval

int cmd_witness_eval(const Globals& g, const std::string& witness_path, const std::string& dataset_path) {
  const Witness w = read_witness(witness_path);
  const CorrelationDataset ds = read_dataset(dataset_path);
  const WitnessEvaluation e = eval_witness(w, ds);
  std::printf("value    %.12g\n", e.value);
  std::printf("bound    %.12g (%s)\n", w.separable_bound, to_string(w.orientation).c_str());
  std::printf("margin   %.6e\n", e.margin);
  std::printf("verdict  %s\n", e.violated ? "violated" : "satisfied");
  const int code = e.violated ? kExitEntangled : kExitOk;
  write_manifest(g, "witness eval", {{"witness", witness_path}, {"dataset", dataset_path}},
                 {{"value", e.value}, {"margin", e.margin}, {"violated", e.violated}}, code);
  return code;
}

// ---- oracle product-search

int cmd_oracle(const Globals& g, const std::string& witness_path, int n, int restarts) {
  const Witness w = read_witness(witness_path);
  if (n <= 0) n = std::max(2, w.min_sites());
  OracleOptions o;
  o.restarts = restarts;
  o.seed = g.seed;
  const OracleResult r = max_over_product_states(w, n, o);
  const bool upper = w.orientation == Orientation::UpperBound;
  std::printf("%s over product states  %.12g\n", upper ? "max" : "min", r.best_value);
  std::printf("separable bound           %.12g\n", w.separable_bound);
  std::printf("converged restarts        %d / %d\n", r.converged_restarts, restarts);

  json state = json::array();
  for (const Bloch& b : r.best_state.bloch()) state.push_back({b[0], b[1], b[2]});
  json doc{{"format_version", kFormatVersion},
           {"best_value", r.best_value},
           {"separable_bound", w.separable_bound},
           {"orientation", to_string(w.orientation)},
           {"best_restart", r.best_restart},
           {"converged_restarts", r.converged_restarts},
           {"restarts", restarts},
           {"bloch", state}};
  const fs::path path = fs::path(g.out) / "oracle.json";
  write_text(path, doc.dump(2) + "\n");
  write_manifest(g, "oracle product-search", {{"witness", witness_path}, {"n", n}, {"restarts", restarts}},
                 {{"oracle", path.string()}}, kExitOk);
  return kExitOk;
}

// ---- sweep

struct SweepArgs {
  std::string generator;
  std::string values;
  std::string range;
  int n = 8;
  double lambda = 0.0;
  double time = 0.0;
  std::string model = "heisenberg";
  double g = 0.0;
  double j = 1.0;
  int jobs = 0;
  std::string file;
};

std::vector<double> parse_grid(const SweepArgs& a) {
  std::vector<double> grid;
  if (!a.values.empty()) {
    std::stringstream ss(a.values);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) continue;
      try {
        grid.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw UsageError("bad grid value '" + tok + "'");
      }
    }
  }
  if (!a.range.empty()) {
    double lo = 0, hi = 0, step = 0;
    char c1 = 0, c2 = 0;
    std::istringstream is(a.range);
    if (!(is >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || !(step > 0.0)) {
      throw UsageError("range must be START:STOP:STEP with STEP > 0");
    }
    const long count = std::lround(std::floor((hi - lo) / step + 1e-9));
    for (long k = 0; k <= count; ++k) grid.push_back(lo + k * step);
  }
  if (grid.empty()) throw UsageError("parameter grid is empty");
  return grid;
}

struct SweepRow {
  double parameter = 0.0;
  std::optional<double> lambda_star, gap;
  std::optional<int> iterations;
  std::optional<double> structure, bipartite, concurrence;
  std::string status;
};

std::string fmt(const std::optional<double>& v) {
  if (!v) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", *v);
  return buf;
}

SweepRow sweep_point(const SweepArgs& a, double p, const CertifyOptions& copts) {
  SweepRow row;
  row.parameter = p;
  try {
    CorrelationDataset ds;
    PhaseAssignment phases;
    std::optional<QuenchAmplitudes> amps;
    if (a.generator == "werner") {
      ds = werner_dataset(p);
    } else if (a.generator == "quench-1d") {
      amps = quench_amplitudes(a.n, p);
      ds = quench_dataset(*amps);
      phases = PhaseAssignment::zeros(a.n);
    } else {
      const ModelSpec spec = model_spec(a.model, a.n, a.g, a.j);
      ds = thermal_dataset_ed(spec, p);
      phases = spec.kind == ModelKind::TransverseIsing ? PhaseAssignment::ising_staggered(a.n) : PhaseAssignment::zeros(a.n);
    }
    if (a.generator != "werner") {
      row.structure = optimal_structure_witness(ds, commensurate_grid(ds.n_sites())).value;
      if (ds.n_sites() % 4 == 0) row.bipartite = bipartite_witness_value(ds, phases);
    }
    if (amps) row.concurrence = quench_concurrence_robustness(*amps);
    const Certification c = certify(ds, copts);
    row.lambda_star = c.solution.lambda_star;
    row.gap = c.solution.duality_gap;
    row.iterations = c.solution.iterations;
    row.status = c.solution.status == SolveStatus::Optimal ? (c.entangled ? "entangled" : "separable-compatible")
                                                           : to_string(c.solution.status);
  } catch (const std::exception& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), ',', ';');
    row.status = "error: " + msg;
  }
  return row;
}

int cmd_sweep(const Globals& g, const SweepArgs& a) {
  const std::vector<double> grid = parse_grid(a);
  if (a.generator != "werner" && a.generator != "quench-1d" && a.generator != "thermal") {
    throw UsageError("unknown generator '" + a.generator + "'");
  }
  if (a.generator == "thermal") model_spec(a.model, a.n, a.g, a.j);
  const CertifyOptions copts = certify_options(g);

  const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const int workers = std::clamp(a.jobs > 0 ? a.jobs : hw, 1, static_cast<int>(grid.size()));
  std::vector<SweepRow> rows(grid.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto work = [&] {
    for (std::size_t k = next++; k < grid.size(); k = next++) {
      rows[k] = sweep_point(a, grid[k], copts);
      std::lock_guard lock(log_mutex);
      std::fprintf(stderr, "point %zu/%zu  parameter %g  %s\n", k + 1, grid.size(), grid[k], rows[k].status.c_str());
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < workers; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();

  std::ostringstream os;
  os << "parameter,lambda_star,gap,iterations,structure_witness,bipartite_witness,concurrence_robustness,status\n";
  for (const SweepRow& r : rows) {
    os << fmt(r.parameter) << ',' << fmt(r.lambda_star) << ',' << fmt(r.gap) << ','
       << (r.iterations ? std::to_string(*r.iterations) : "") << ',' << fmt(r.structure) << ',' << fmt(r.bipartite) << ','
       << fmt(r.concurrence) << ',' << r.status << '\n';
  }
  const fs::path path = a.file.empty() ? fs::path(g.out) / "sweep.csv" : fs::path(a.file);
  write_text(path, os.str());
  std::cout << os.str();

  json config{{"generator", a.generator}, {"grid", grid}, {"n", a.n}, {"jobs", workers}};
  if (a.generator == "thermal") config.update({{"model", a.model}, {"g", a.g}, {"J", a.j}});
  const bool failed = std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) {
    return r.status != "entangled" && r.status != "separable-compatible";
  });
  const int code = failed ? kExitSolver : kExitOk;
  write_manifest(g, "sweep", config, {{"csv", path.string()}}, code);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entanglement certification from partial correlation data"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--tol", g.tol, "Solver gap and feasibility tolerance")->check(CLI::PositiveNumber);
  app.add_option("--max-iter", g.max_iter, "Solver iteration limit")->check(CLI::PositiveNumber);
  app.add_option("--level", g.level, "Relaxation level")->check(CLI::IsMember({1, 2}));
  app.add_option("--scheme", g.scheme, "Symmetry scheme")
      ->check(CLI::IsMember({"auto", "general", "axis", "transverse", "rotation"}));
  app.add_flag("--dump-layout", g.dump_layout, "Write the moment-matrix entry grid");
  app.add_option("--solver-trace", g.solver_trace, "Write per-iteration solver records as CSV");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a correlation dataset");
  generate->require_subcommand(1);
  generate->add_option("--file", gen.file, "Dataset path (default OUT/<generator>.json)");
  auto* gw = generate->add_subcommand("werner", "Singlet with white noise");
  gw->add_option("--lambda", gen.lambda, "Noise fraction")->required();
  auto* gq = generate->add_subcommand("quench-1d", "Single spin flip on an XX ring");
  gq->add_option("--n", gen.n, "Ring size")->required();
  gq->add_option("--time", gen.time, "Evolution time tJ")->required();
  auto* gt = generate->add_subcommand("thermal", "Thermal ring by exact diagonalization");
  gt->add_option("--model", gen.model, "heisenberg or ising")->check(CLI::IsMember({"heisenberg", "ising"}));
  gt->add_option("--n", gen.n, "Ring size")->required();
  gt->add_option("--temp", gen.temp, "Temperature T/J")->required();
  gt->add_option("--g", gen.g, "Transverse field (ising)");
  gt->add_option("--J", gen.j, "Coupling");
  auto* gp = generate->add_subcommand("product-random", "Random product state (uses --seed)");
  gp->add_option("--n", gen.n, "Number of sites")->required();
  for (auto* s : {gw, gq, gt, gp}) {
    s->callback([&gen, s] { gen.kind = s->get_name(); });
  }

  std::string dataset_path;
  auto* cert = app.add_subcommand("certify", "Solve the separability relaxation for a dataset");
  cert->add_option("dataset", dataset_path, "Dataset JSON")->required()->check(CLI::ExistingFile);

  std::string witness_path, eval_dataset;
  auto* witness = app.add_subcommand("witness", "Witness utilities");
  witness->require_subcommand(1);
  auto* weval = witness->add_subcommand("eval", "Evaluate a witness on a dataset");
  weval->add_option("witness", witness_path, "Witness JSON")->required()->check(CLI::ExistingFile);
  weval->add_option("dataset", eval_dataset, "Dataset JSON")->required()->check(CLI::ExistingFile);

  std::string oracle_witness;
  int oracle_n = 0;
  int restarts = 1000;
  auto* oracle = app.add_subcommand("oracle", "Separable-side searches");
  oracle->require_subcommand(1);
  auto* psearch = oracle->add_subcommand("product-search", "Optimise a witness over product states");
  psearch->add_option("witness", oracle_witness, "Witness JSON")->required()->check(CLI::ExistingFile);
  psearch->add_option("--n", oracle_n, "Number of sites (default: from the witness)");
  psearch->add_option("--restarts", restarts, "Random restarts")->check(CLI::PositiveNumber);

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "Certify a generator over a parameter grid, one CSV row per point");
  sweep->add_option("generator", sw.generator, "werner (lambda), quench-1d (time) or thermal (temperature)")
      ->required()
      ->check(CLI::IsMember({"werner", "quench-1d", "thermal"}));
  sweep->add_option("--values", sw.values, "Comma-separated parameter values");
  sweep->add_option("--range", sw.range, "START:STOP:STEP");
  sweep->add_option("--n", sw.n, "Number of sites");
  sweep->add_option("--model", sw.model, "heisenberg or ising (thermal)");
  sweep->add_option("--g", sw.g, "Transverse field (thermal ising)");
  sweep->add_option("--J", sw.j, "Coupling (thermal)");
  sweep->add_option("--jobs", sw.jobs, "Worker threads (default: hardware concurrency)");
  sweep->add_option("--file", sw.file, "CSV path (default OUT/sweep.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    fs::create_directories(g.out);
    if (*generate) return cmd_generate(g, gen);
    if (*cert) return cmd_certify(g, dataset_path);
    if (*weval) return cmd_witness_eval(g, witness_path, eval_dataset);
    if (*psearch) return cmd_oracle(g, oracle_witness, oracle_n, restarts);
    if (*sweep) return cmd_sweep(g, sw);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSolver;
  }
  return kExitUsage;
}
