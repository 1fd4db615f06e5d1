#include "cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <sstream>

#include "cimtune/io.hpp"
#include "cimtune/tuner.hpp"

namespace cimtune::cli {
namespace {

using io::Json;
using tuner::WeightMap;

struct SolveOptions {
  std::string input;
  std::string label;
  int iterations = 3;
  std::string weights;
  std::string policy = "rule";
  double policy_timeout_s = 30.0;
  std::uint64_t seed = 0;
  std::string out = "cimtune-out";
  bool deterministic = false;
  bool quantized = false;
  bool cim_realism = false;
  int sweeps = 5000;
  int restarts = 8;
  int top_k = 10;
  double readout_flip_prob = 0.0;
  int max_history = 20;
};

std::vector<double> parse_list(const std::string& text, std::size_t expected, const std::string& names) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw InputError("weights", "'" + item + "' is not a number");
    values.push_back(v);
  }
  if (values.size() != expected) throw InputError("weights", "expected " + names);
  return values;
}

SolverConfig solver_config(const SolveOptions& o) {
  SolverConfig cfg;
  cfg.sweeps = o.sweeps;
  cfg.restarts = o.restarts;
  cfg.top_k = o.top_k;
  cfg.seed = o.seed;
  cfg.readout_flip_prob = o.readout_flip_prob;
  if (o.cim_realism) cfg = SolverConfig::cim_realism(cfg);
  cfg.validate();
  return cfg;
}

tuner::Policy make_policy(const SolveOptions& o, tuner::ProblemKind kind, std::vector<std::string> names) {
  if (o.policy == "rule") return tuner::rule_policy(kind);
  if (o.policy.starts_with("external:")) {
    const auto ms = std::chrono::milliseconds(static_cast<std::int64_t>(o.policy_timeout_s * 1000.0));
    return tuner::external_policy(o.policy.substr(9), std::move(names), ms);
  }
  throw InputError("policy", "expected 'rule' or 'external:<command-or-url>'");
}

Json settings_json(const SolveOptions& o, const SolverConfig& cfg) {
  return Json{{"iterations", o.iterations},
              {"policy", o.policy},
              {"seed", o.seed},
              {"quantized", o.quantized},
              {"max_history", o.max_history},
              {"solver",
               {{"sweeps", cfg.sweeps},
                {"restarts", cfg.restarts},
                {"top_k", cfg.top_k},
                {"readout_flip_prob", cfg.readout_flip_prob},
                {"emulate_latency_ms", cfg.emulate_latency_ms}}}};
}

Json weights_json(const WeightMap& w) {
  Json j = Json::object();
  for (const auto& [k, v] : w) j[k] = v;
  return j;
}

Json quant_report(const std::vector<tuner::IterationRecord>& records) {
  Json rounds = Json::array();
  for (const auto& r : records) {
    rounds.push_back(Json{{"iteration", r.iteration},
                          {"weights", weights_json(r.weights)},
                          {"scale", r.solve_meta.value("quantization_scale", Json(nullptr))},
                          {"report", r.solve_meta.value("quantization", Json(nullptr))}});
  }
  return Json{{"v", tuner::kSchemaVersion}, {"rounds", std::move(rounds)}};
}

std::filesystem::path prepare_out(const std::string& dir) {
  std::filesystem::path p(dir);
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec) throw InputError("out", "cannot create directory " + dir + ": " + ec.message());
  return p;
}

// Shared driver: runs the loop, writes the log and result, returns the report.
// On a policy failure the records written so far are still saved.
tuner::TuningReport tune(const tuner::TuningProblem& problem, const WeightMap& initial, const SolveOptions& o,
                         const SolverConfig& cfg, const std::filesystem::path& out) {
  tuner::TuningOptions topts;
  topts.max_iter = o.iterations;
  topts.max_history = static_cast<std::size_t>(o.max_history);
  topts.deterministic = o.deterministic;
  const tuner::Policy policy = make_policy(o, problem.kind(), problem.weight_names());
  try {
    tuner::TuningReport report = tuner::run_tuning(problem, initial, policy, cfg, topts);
    io::write_text_file((out / "iterations.jsonl").string(), tuner::to_jsonl(report.records));
    if (o.quantized) io::write_text_file((out / "quant_report.json").string(), io::pretty(quant_report(report.records)));
    return report;
  } catch (const tuner::TuningAborted& e) {
    io::write_text_file((out / "iterations.jsonl").string(), tuner::to_jsonl(e.records()));
    throw;
  }
}

Json run_summary(const tuner::TuningReport& report, const WeightMap& initial) {
  return Json{{"stop_reason", report.stop_reason},
              {"iterations", report.records.size()},
              {"initial_weights", weights_json(initial)},
              {"final_weights", weights_json(report.records.back().weights)},
              {"last_decision", tuner::to_json(report.records.back().decision)}};
}

void add_common(CLI::App* cmd, SolveOptions& o) {
  cmd->add_option("-p,--problem-label", o.label, "Free-text label echoed into result.json");
  cmd->add_option("-i,--iterations", o.iterations, "Maximum tuning iterations")->check(CLI::PositiveNumber);
  cmd->add_option("--policy", o.policy, "rule | external:<command-or-url>");
  cmd->add_option("--policy-timeout", o.policy_timeout_s, "External policy timeout in seconds")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "Seed for every random choice");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_flag("--deterministic-output", o.deterministic, "Leave timestamps and timings out of the artifacts");
  cmd->add_flag("--quantized", o.quantized, "Solve the int8-quantized model");
  cmd->add_flag("--cim-realism", o.cim_realism, "Emulate hardware latency (61-121 s per solve)");
  cmd->add_option("--sweeps", o.sweeps, "Annealing sweeps per restart")->check(CLI::PositiveNumber);
  cmd->add_option("--restarts", o.restarts, "Annealing restarts")->check(CLI::PositiveNumber);
  cmd->add_option("--top-k", o.top_k, "Solutions kept per solve")->check(CLI::Range(1, kMaxTopK));
  cmd->add_option("--readout-noise", o.readout_flip_prob, "Per-spin readout flip probability");
  cmd->add_option("--max-history", o.max_history, "Tuner memory size")->check(CLI::PositiveNumber);
}

// ---------------------------------------------------------------------------

struct FjspOptions {
  SolveOptions common;
  std::optional<int> t_max;
  std::string h3 = "strict";
};

fjsp::H3Mode parse_h3(const std::string& s) {
  if (s == "strict") return fjsp::H3Mode::Strict;
  if (s == "paper-literal") return fjsp::H3Mode::Closed;
  throw InputError("h3", "expected 'strict' or 'paper-literal'");
}

fjsp::Instance load_instance(const std::string& path, std::optional<int> t_max) {
  fjsp::Instance inst = io::instance_from_json(io::read_json_file(path));
  return t_max ? inst.with_horizon(*t_max) : inst;
}

int cmd_fjsp_solve(const FjspOptions& f, std::ostream& out) {
  const SolveOptions& o = f.common;
  const auto t0 = std::chrono::steady_clock::now();
  const fjsp::Instance inst = load_instance(o.input, f.t_max);
  WeightMap initial = tuner::FjspTuning::to_map({});
  if (!o.weights.empty()) {
    const auto v = parse_list(o.weights, 4, "alpha,beta,gamma,delta");
    initial = tuner::FjspTuning::to_map({v[0], v[1], v[2], v[3]});
  }
  const SolverConfig cfg = solver_config(o);
  const tuner::FjspTuning problem(inst, {parse_h3(f.h3), o.quantized});
  try {
    problem.validate(initial);
  } catch (const ArgumentError& e) {
    throw InputError("weights", e.what());
  }
  const auto dir = prepare_out(o.out);
  const tuner::TuningReport report = tune(problem, initial, o, cfg, dir);

  // The incumbent schedule, or the best effort of the last round when nothing was feasible.
  const Json& chosen = report.incumbent ? report.incumbent_best : report.last.best;
  const fjsp::Schedule schedule = io::schedule_from_json(chosen["schedule"], inst);
  const std::string title = o.label.empty() ? "FJSP schedule" : o.label;
  io::write_text_file((dir / "gantt.txt").string(), fjsp::gantt_text(inst, schedule));
  io::write_text_file((dir / "gantt.svg").string(), fjsp::gantt_svg(inst, schedule, title));

  Json result{{"v", tuner::kSchemaVersion}, {"command", "fjsp-solve"}, {"problem_label", o.label}};
  result["instance"] = Json{{"machines", inst.machines()},
                            {"jobs", inst.job_count()},
                            {"operations", inst.operation_count()},
                            {"t_max", inst.t_max()},
                            {"horizon_lower_bound", inst.horizon_lower_bound()}};
  result["settings"] = settings_json(o, cfg);
  result["settings"]["h3"] = f.h3;
  result["model"] = report.last.extra;
  result["run"] = run_summary(report, initial);
  if (report.incumbent) {
    result["incumbent"] = Json{{"makespan", static_cast<int>(report.incumbent->metric)},
                               {"weights", weights_json(report.incumbent->weights)},
                               {"iteration", report.incumbent->iteration},
                               {"schedule", chosen["schedule"]},
                               {"diagnostics", chosen["diagnostics"]}};
  } else {
    result["incumbent"] = nullptr;
    result["last_attempt"] = Json{{"schedule", chosen["schedule"]}, {"diagnostics", chosen["diagnostics"]}};
  }
  if (!o.deterministic) {
    result["wall_time_ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  }
  io::write_text_file((dir / "result.json").string(), io::pretty(result));

  out << "iterations: " << report.records.size() << " (" << report.stop_reason << ")\n";
  if (!report.incumbent) {
    out << "no feasible schedule found\n";
    return kNoFeasible;
  }
  out << "makespan: " << static_cast<int>(report.incumbent->metric) << "\n";
  return kFeasible;
}

// ---------------------------------------------------------------------------

struct PeptideOptions {
  SolveOptions common;
  std::optional<int> positions;
  std::string encoding = "onehot";
  int bits_per_acid = 5;
};

int cmd_peptide_solve(const PeptideOptions& p, std::ostream& out) {
  const SolveOptions& o = p.common;
  const auto t0 = std::chrono::steady_clock::now();
  Json doc = io::read_json_file(o.input);
  if (p.positions) {
    if (*p.positions < 1) throw InputError("positions", "must be >= 1");
    if (doc.is_object()) doc["positions"] = *p.positions;
  }
  const peptide::Problem problem = io::problem_from_json(doc);
  WeightMap initial{{"mass", 1.0}, {"pos", 1.0}};
  if (!o.weights.empty()) {
    const auto v = parse_list(o.weights, 2, "pos,mass");
    initial = {{"mass", v[1]}, {"pos", v[0]}};
  }
  tuner::PeptideProblemOptions popts;
  try {
    popts.encoding = tuner::parse_encoding(p.encoding);
  } catch (const ArgumentError&) {
    throw InputError("encoding", "expected 'onehot' or 'count'");
  }
  popts.count.bits_per_acid = p.bits_per_acid;
  popts.quantized = o.quantized;
  const SolverConfig cfg = solver_config(o);
  const tuner::PeptideTuning tuning(problem, popts);
  try {
    tuning.validate(initial);
  } catch (const ArgumentError& e) {
    throw InputError("weights", e.what());
  }
  const auto dir = prepare_out(o.out);
  const tuner::TuningReport report = tune(tuning, initial, o, cfg, dir);

  Json result{{"v", tuner::kSchemaVersion}, {"command", "peptide-solve"}, {"problem_label", o.label}};
  result["problem"] = io::to_json(problem);
  if (doc.contains("sequence")) result["problem"]["sequence"] = doc["sequence"];
  result["settings"] = settings_json(o, cfg);
  result["settings"]["encoding"] = p.encoding;
  if (popts.encoding == tuner::Encoding::Count) result["settings"]["bits_per_acid"] = p.bits_per_acid;
  result["model"] = report.last.extra;
  result["run"] = run_summary(report, initial);
  result["metrics"] = report.last.diagnostics;
  if (report.incumbent) {
    result["incumbent"] = Json{{"deviation_da", report.incumbent->metric},
                               {"weights", weights_json(report.incumbent->weights)},
                               {"iteration", report.incumbent->iteration},
                               {"solution", report.incumbent_best}};
  } else {
    result["incumbent"] = nullptr;
  }
  if (!o.deterministic) {
    result["wall_time_ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  }
  io::write_text_file((dir / "result.json").string(), io::pretty(result));

  out << "positions: " << problem.positions << (problem.positions_defaulted ? " (defaulted)" : "") << "\n";
  out << "iterations: " << report.records.size() << " (" << report.stop_reason << ")\n";
  out << "violation rate: " << report.last.diagnostics["violation_rate"].get<double>() << "\n";
  if (!report.incumbent) {
    out << "no violation-free composition found\n";
    return kNoFeasible;
  }
  out << "best deviation: " << report.incumbent->metric << " Da\n";
  if (report.incumbent_best.contains("composition")) {
    out << "composition: " << report.incumbent_best["composition"].get<std::string>() << "\n";
  }
  return kFeasible;
}

// ---------------------------------------------------------------------------

int cmd_qubo_to_ising(const std::string& path, const std::string& convention, std::ostream& out) {
  const QuboMatrix<double> q = io::qubo_from_json(io::read_json_file(path));
  IsingConvention c = IsingConvention::PositiveSum;
  if (convention == "negated_sum") {
    c = IsingConvention::NegatedSum;
  } else if (convention != "positive_sum") {
    throw InputError("convention", "expected 'positive_sum' or 'negated_sum'");
  }
  out << io::pretty(io::to_json(qubo_to_ising(q, c)));
  return kFeasible;
}

int cmd_qubo_quantize(const std::string& path, const std::string& out_dir, std::ostream& out) {
  const QuboMatrix<double> q = io::qubo_from_json(io::read_json_file(path));
  const QuantizedQubo qq = quantize_int8(q);
  out << io::pretty(io::to_json(qq));
  if (!out_dir.empty()) {
    const auto dir = prepare_out(out_dir);
    io::write_text_file((dir / "quant_report.json").string(),
                        io::pretty(Json{{"v", tuner::kSchemaVersion}, {"scale", qq.scale}, {"report", io::to_json(qq.report)}}));
  }
  return kFeasible;
}

int cmd_qubo_energy(const std::string& path, const std::string& bits, std::ostream& out) {
  const QuboMatrix<double> q = io::qubo_from_json(io::read_json_file(path));
  BinaryAssignment x;
  try {
    x = parse_bits(bits);
  } catch (const Error& e) {
    throw InputError("bits", e.what());
  }
  if (x.size() != q.size()) {
    throw InputError("bits", "expected " + std::to_string(q.size()) + " bits, got " + std::to_string(x.size()));
  }
  out << Json(qubo_energy(q, x)).dump() << "\n";
  return kFeasible;
}

int cmd_oracle(const std::string& path, std::optional<int> t_max, std::int64_t budget, std::ostream& out) {
  const fjsp::Instance inst = load_instance(path, t_max);
  const fjsp::OracleResult r = fjsp::solve_min_makespan(inst, budget);
  out << r.makespan << "\n";
  return kFeasible;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"QUBO modelling, annealing and closed-loop weight tuning", "cimtune"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "cimtune 1.0");

  FjspOptions fjsp_opts;
  auto* fjsp_cmd = app.add_subcommand("fjsp-solve", "Tune and solve a flexible job-shop instance");
  fjsp_cmd->add_option("instance", fjsp_opts.common.input, "Instance JSON")->required();
  fjsp_cmd->add_option("-t,--t-max", fjsp_opts.t_max, "Override the horizon");
  fjsp_cmd->add_option("--weights", fjsp_opts.common.weights, "alpha,beta,gamma,delta (default 150,100,100,15)");
  fjsp_cmd->add_option("--h3", fjsp_opts.h3, "strict | paper-literal");
  add_common(fjsp_cmd, fjsp_opts.common);

  PeptideOptions pep_opts;
  auto* pep_cmd = app.add_subcommand("peptide-solve", "Tune and solve a peptide composition problem");
  pep_cmd->add_option("problem", pep_opts.common.input, "Problem JSON")->required();
  pep_cmd->add_option("--positions", pep_opts.positions, "Override the position count");
  pep_cmd->add_option("--weights", pep_opts.common.weights, "pos,mass (default 1,1)");
  pep_cmd->add_option("--encoding", pep_opts.encoding, "onehot | count");
  pep_cmd->add_option("--bits-per-acid", pep_opts.bits_per_acid, "Count-encoding bits per acid")
      ->check(CLI::Range(1, 20));
  add_common(pep_cmd, pep_opts.common);

  auto* qubo_cmd = app.add_subcommand("qubo", "Inspect a QUBO JSON file");
  qubo_cmd->require_subcommand(1);
  std::string qubo_path, convention = "positive_sum", bits, quant_out;
  auto* to_ising = qubo_cmd->add_subcommand("to-ising", "Print the equivalent Ising model");
  to_ising->add_option("qubo", qubo_path, "QUBO JSON")->required();
  to_ising->add_option("--convention", convention, "positive_sum | negated_sum");
  auto* quantize = qubo_cmd->add_subcommand("quantize", "Print the int8 quantization and its loss report");
  quantize->add_option("qubo", qubo_path, "QUBO JSON")->required();
  quantize->add_option("--out", quant_out, "Also write quant_report.json here");
  auto* energy = qubo_cmd->add_subcommand("energy", "Print the energy of one assignment");
  energy->add_option("qubo", qubo_path, "QUBO JSON")->required();
  energy->add_option("bits", bits, "Assignment as a 0/1 string")->required();

  std::string oracle_path;
  std::optional<int> oracle_t_max;
  std::int64_t budget = 50'000'000;
  auto* oracle_cmd = app.add_subcommand("oracle", "Print the exact minimum makespan");
  oracle_cmd->add_option("instance", oracle_path, "Instance JSON")->required();
  oracle_cmd->add_option("-t,--t-max", oracle_t_max, "Override the horizon");
  oracle_cmd->add_option("--budget", budget, "Branch-and-bound node budget")->check(CLI::PositiveNumber);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kFeasible : kInputError;
  }

  try {
    if (*fjsp_cmd) return cmd_fjsp_solve(fjsp_opts, out);
    if (*pep_cmd) return cmd_peptide_solve(pep_opts, out);
    if (*to_ising) return cmd_qubo_to_ising(qubo_path, convention, out);
    if (*quantize) return cmd_qubo_quantize(qubo_path, quant_out, out);
    if (*energy) return cmd_qubo_energy(qubo_path, bits, out);
    if (*oracle_cmd) return cmd_oracle(oracle_path, oracle_t_max, budget, out);
  } catch (const BudgetExhaustedError& e) {
    err << "error: " << e.what() << "\n";
    err << "incumbent: " << (e.incumbent() ? std::to_string(*e.incumbent()) : "none") << ", lower bound: " << e.bound()
        << "\n";
    return kBudgetExhausted;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

}  // namespace cimtune::cli
