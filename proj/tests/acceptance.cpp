// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include "cimtune/io.hpp"
#include "cimtune/tuner.hpp"
#include "cli.hpp"
#include "fixtures.hpp"

using namespace cimtune;
namespace fs = std::filesystem;
using io::Json;

namespace {

const std::string kData = CIMTUNE_DATA_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct CliRun {
  int code = 0;
  std::string out, err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "cimtune");
  std::ostringstream out, err;
  CliRun r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string bits_string(const BinaryAssignment& x) {
  std::string s;
  for (auto v : x.values()) s += v ? '1' : '0';
  return s;
}

// ---------------------------------------------------------------------------

Outcome pruning_count() {
  const fjsp::Instance inst = fixtures::table1(18);
  const fjsp::VariableIndex idx = fjsp::prune_variables(inst);
  // Raw count from first principles: every (eligible machine, start in 0..t_max) pair.
  Index raw = 0;
  for (const auto& ref : inst.operations()) {
    raw += static_cast<Index>(inst.operation(ref).eligible_machines().size()) * (inst.t_max() + 1);
  }
  const bool ok = raw == 513 && idx.raw_count() == 513 && idx.size() == 264;
  return {ok, fmt("raw %ld (index %ld), pruned %ld; expected 513 -> 264", long(raw), long(idx.raw_count()),
                  long(idx.size()))};
}

Outcome exact_optimum() {
  const CliRun r = cli({"oracle", kData + "/table1.json"});
  const fjsp::Instance inst = io::instance_from_json(io::read_json_file(kData + "/table1.json"));
  const fjsp::Schedule s = io::schedule_from_json(io::read_json_file(kData + "/makespan11_schedule.json"), inst);
  const fjsp::Diagnostics d = fjsp::validate_schedule(inst, s);
  const bool schedule_ok = d.feasible() && *d.makespan == 11;
  std::string printed = r.out;
  while (!printed.empty() && printed.back() == '\n') printed.pop_back();
  const bool ok = r.code == 0 && printed == "11" && schedule_ok;
  return {ok, fmt("oracle printed '%s' (exit %d), expected 11; reference schedule %s with makespan %d",
                  printed.c_str(), r.code, d.feasible() ? "conflict-free" : "INVALID", d.makespan.value_or(-1))};
}

Outcome qubo_ising_equivalence() {
  std::mt19937_64 rng(31337);
  std::uniform_int_distribution<int> size(1, 12);
  std::uniform_real_distribution<double> coeff(-100.0, 100.0), scale_exp(-3.0, 3.0);
  std::bernoulli_distribution present(0.6);
  double worst = 0.0;
  long checked = 0;
  for (int m = 0; m < 200; ++m) {
    const int n = size(rng);
    const double scale = std::pow(10.0, scale_exp(rng));
    std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
    QuboBuilder<double> b(n);
    double max_abs = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        if (!present(rng)) continue;
        const double v = coeff(rng) * scale;
        dense[i][j] = v;
        max_abs = std::max(max_abs, std::abs(v));
        if (i == j) {
          b.add_linear(i, v);
        } else {
          b.add_quadratic(i, j, v);
        }
      }
    }
    const double offset = coeff(rng) * scale;
    b.add_offset(offset);
    const QuboMatrix<double> q = b.build();
    const auto pos = qubo_to_ising(q, IsingConvention::PositiveSum);
    const auto neg = qubo_to_ising(q, IsingConvention::NegatedSum);
    const double tol = 1e-9 * std::max(1.0, max_abs);
    for (std::uint32_t c = 0; c < (1u << n); ++c) {
      std::vector<std::int8_t> x(n), s(n);
      double expected = offset;
      for (int i = 0; i < n; ++i) {
        x[i] = (c >> i) & 1;
        s[i] = x[i] ? 1 : -1;
      }
      for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) expected += dense[i][j] * x[i] * x[j];
      }
      const double e1 = ising_energy(pos, SpinAssignment(s));
      const double e2 = ising_energy(neg, SpinAssignment(s));
      const double e3 = qubo_energy(q, BinaryAssignment(x));
      const double err = std::max({std::abs(e1 - expected), std::abs(e2 - expected), std::abs(e3 - expected)});
      worst = std::max(worst, err / tol);
      ++checked;
    }
  }
  return {worst <= 1.0, fmt("200 matrices, %ld assignments, worst error %.3g of tolerance", checked, worst)};
}

// Every minimum-energy assignment of a QUBO with at most 24 variables, by Gray-code walk.
std::vector<std::vector<std::int8_t>> all_ground_states(const QuboMatrix<double>& q) {
  const int n = static_cast<int>(q.size());
  std::vector<std::vector<double>> sym(n, std::vector<double>(n, 0.0));
  q.for_each_coupling([&](Index i, Index j, double v) {
    sym[i][j] += v;
    sym[j][i] += v;
  });
  std::vector<std::int8_t> x(n, 0);
  std::vector<double> field(n, 0.0);  // sum_j sym[i][j] x_j
  double e = q.offset(), best = e;
  std::vector<std::vector<std::int8_t>> ground{x};
  for (std::uint64_t k = 1; k < (1ull << n); ++k) {
    const int i = std::countr_zero(k);
    const int dir = x[i] ? -1 : 1;
    e += dir * (q.diag()[i] + field[i]);
    x[i] = static_cast<std::int8_t>(1 - x[i]);
    for (int j = 0; j < n; ++j) field[j] += dir * sym[j][i];
    if (e < best - 1e-6) {
      best = e;
      ground.assign(1, x);
    } else if (e <= best + 1e-6) {
      ground.push_back(x);
    }
  }
  return ground;
}

Outcome micro_oracle_agreement() {
  // Seed fixed before the first run; penalties dominate the makespan term.
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> horizon(2, 6);
  const fjsp::Weights w{1e4, 1e4, 1e4, 1.0};
  int instances = 0, agree = 0, states = 0, first_bad = -1;
  while (instances < 50) {
    std::optional<fjsp::Instance> inst;
    while (!inst) {
      try {
        inst = fixtures::random_instance(rng, 2, 2, 2, 3, horizon(rng));
      } catch (const InfeasibleHorizonError&) {
      }
    }
    const int opt = fjsp::exact_min_makespan(*inst);
    if (opt > inst->t_max()) continue;  // horizon cannot hold an optimal schedule
    const fjsp::VariableIndex idx = fjsp::prune_variables(*inst);
    if (idx.size() > 22) continue;
    const auto ground = all_ground_states(fjsp::build_qubo(*inst, w, idx));
    bool all = true;
    for (const auto& g : ground) {
      const auto d = fjsp::decode_schedule(*inst, idx, BinaryAssignment(g)).diagnostics;
      all = all && d.feasible() && *d.makespan == opt;
    }
    states += static_cast<int>(ground.size());
    if (all) {
      ++agree;
    } else if (first_bad < 0) {
      first_bad = instances;
    }
    ++instances;
  }
  std::string detail = fmt("%d/50 instances with every ground state optimal (%d ground states)", agree, states);
  if (first_bad >= 0) {
    detail += fmt("; first disagreement at instance %d", first_bad);
  }
  return {agree == 50, detail};
}

Outcome tuner_reproduction() {
  const tuner::FjspTuning problem(fixtures::table1(18));
  const auto policy = tuner::rule_policy(tuner::ProblemKind::Fjsp);
  tuner::TuningOptions opts;
  opts.max_iter = 6;
  opts.deterministic = true;
  int good = 0, conflict_rounds = 0;
  bool monotone = true;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SolverConfig cfg;
    cfg.seed = seed;
    const auto report = tuner::run_tuning(problem, tuner::FjspTuning::to_map({150, 100, 100, 15}), policy, cfg, opts);
    for (std::size_t k = 0; k < report.records.size(); ++k) {
      const auto& rec = report.records[k];
      if (rec.diagnostics["machine_conflicts"].get<int>() == 0) continue;
      ++conflict_rounds;
      const double g = rec.weights.at("gamma");
      if (rec.decision.action != tuner::Action::Adjust || !(rec.decision.new_weights.at("gamma") > g)) monotone = false;
      if (k + 1 < report.records.size() && !(report.records[k + 1].weights.at("gamma") > g)) monotone = false;
    }
    if (report.incumbent && report.incumbent->metric <= 14.0) {
      const auto& diag = report.incumbent_best["diagnostics"];
      if (diag["feasible"] == true && diag["machine_conflicts"].empty()) ++good;
    }
  }
  return {monotone && good >= 19,
          fmt("%d/20 seeds reach a conflict-free makespan <= 14 within 6 rounds (need 19); gamma %s over %d "
              "conflicted rounds",
              good, monotone ? "strictly increasing" : "NOT increasing", conflict_rounds)};
}

Outcome peptide_recovery() {
  const Vector<double> masses = (Vector<double>(4) << 57.0519, 71.0788, 87.0782, 97.1167).finished();
  const double target = masses[1] + masses[3];
  const peptide::Problem p = peptide::custom_problem("GASP", masses, target, 2);
  const QuboMatrix<double> q = peptide::build_onehot_qubo(p, {1e6, 1.0});
  const SolveResult r = solve_exact(q, kMaxTopK);
  const double ground = r.solutions.front().energy;
  bool exact = true;
  int ground_states = 0;
  for (const auto& s : r.solutions) {
    if (s.energy > ground + 1e-9 * std::abs(q.offset())) break;
    ++ground_states;
    const auto c = peptide::decode_onehot(p, to_bits(s.spins));
    exact = exact && c.onehot_violations.empty() && c.deviation_da && *c.deviation_da == 0.0;
  }
  std::vector<peptide::CompositionSolution> population(10);
  for (int k = 0; k < 9; ++k) population[k].onehot_violations = {k % 2};
  population[9].deviation_da = 0.0;
  population[9].total_mass = target;
  population[9].relative_deviation = 0.0;
  const double rate = peptide::evaluate_population(population).violation_rate;
  return {exact && rate == 0.9,
          fmt("%d ground states, deviation %s with zero violations; constructed population rate %.17g", ground_states,
              exact ? "0 Da" : "NONZERO", rate)};
}

Outcome mass_table() {
  const double lib = peptide::residue_sum("KKSKAKEPPPKKT", peptide::MassTable::Average);
  // Average residue masses, typed independently of the library table.
  const std::map<char, double> avg{{'K', 128.1741}, {'S', 87.0782}, {'A', 71.0788},
                                   {'E', 129.1155}, {'P', 97.1167}, {'T', 101.1051}};
  double own = 0.0;
  for (char c : std::string("KKSKAKEPPPKKT")) own += avg.at(c);
  return {std::abs(lib - 1448.77) <= 0.01 && std::abs(own - lib) < 1e-9,
          fmt("library %.4f Da, independent %.4f Da, expected 1448.77 +/- 0.01", lib, own)};
}

Outcome quantization_loss() {
  QuboBuilder<double> b(3);
  b.add_linear(0, 1e5).add_linear(1, 400.0).add_linear(2, 500.0);
  b.add_quadratic(0, 1, 400.0).add_quadratic(0, 2, -0.05).add_quadratic(1, 2, -1000.0);
  const QuboMatrix<double> q = b.build();
  const QuantizedQubo qq = quantize_int8(q);
  bool in_range = true;
  for (Index i = 0; i < 3; ++i) in_range = in_range && qq.integers.diag()[i] >= -128 && qq.integers.diag()[i] <= 127;
  qq.integers.for_each_coupling([&](Index, Index, int v) { in_range = in_range && v >= -128 && v <= 127; });

  const SolveResult exact = solve_exact(q, 1);
  const SolveResult quant = solve_exact(qq.integers.cast<double>(), kMaxTopK);
  const BinaryAssignment orig_ground = to_bits(exact.solutions[0].spins);
  const BinaryAssignment quant_ground = to_bits(quant.solutions[0].spins);
  const bool unique = quant.solutions.size() > 1 && quant.solutions[1].energy > quant.solutions[0].energy;
  const double orig_of_quant = qubo_energy(q, quant_ground), orig_best = qubo_energy(q, orig_ground);
  const bool inversion = unique && orig_of_quant > orig_best;
  const bool ok = qq.report.dynamic_range_orders >= 6.0 && qq.report.zeroed_fraction > 0.0 && in_range && inversion;
  return {ok, fmt("range %.2f orders, zeroed_fraction %.3f, integers in [-128,127]: %s; quantized ground %s has "
                  "original energy %g vs true ground %s at %g",
                  qq.report.dynamic_range_orders, qq.report.zeroed_fraction, in_range ? "yes" : "NO",
                  bits_string(quant_ground).c_str(), orig_of_quant, bits_string(orig_ground).c_str(), orig_best)};
}

Outcome encoding_suppression() {
  const peptide::Problem p = io::problem_from_json(io::read_json_file(kData + "/lacrp4.json"));
  const auto onehot = coefficient_stats(normalize_max_abs(peptide::build_onehot_qubo(p, {})), 1e-4);
  const auto count = coefficient_stats(normalize_max_abs(peptide::build_count_qubo(p, {})), 1e-4);
  return {count.near_zero_fraction >= onehot.near_zero_fraction,
          fmt("near-zero fraction below 1e-4: count %.4f (%.2f orders) vs one-hot %.4f (%.2f orders)",
              count.near_zero_fraction, count.dynamic_range_orders, onehot.near_zero_fraction,
              onehot.dynamic_range_orders)};
}

Outcome determinism_and_protocol() {
  const fs::path dir = fs::temp_directory_path() / ("cimtune_acceptance_" + std::to_string(std::random_device{}()));
  fs::create_directories(dir);
  auto solve = [&](const std::string& sub, const std::string& policy) {
    return cli({"fjsp-solve", kData + "/table1.json", "-i", "3", "--seed", "77", "--sweeps", "1000", "--policy",
                policy, "--deterministic-output", "--out", (dir / sub).string()});
  };
  const CliRun a = solve("a", "rule"), b = solve("b", "rule");
  const bool identical = a.code == b.code && slurp(dir / "a/result.json") == slurp(dir / "b/result.json") &&
                         slurp(dir / "a/iterations.jsonl") == slurp(dir / "b/iterations.jsonl");

  const fs::path seen = dir / "context.json";
  const CliRun mock = solve("mock", "external:cat > '" + seen.string() +
                                        "'; echo '{\"v\":1,\"action\":\"stop\",\"rationale\":\"mock\",\"confidence\":\"high\"}'");
  bool round_trip = false;
  try {
    const Json sent = Json::parse(slurp(seen));
    round_trip = tuner::to_json(tuner::context_from_json(sent)) == sent;
  } catch (const std::exception&) {
  }
  const Json mock_result = Json::parse(slurp(dir / "mock/result.json"));
  const bool mock_ok = (mock.code == 0 || mock.code == 2) && mock_result["run"]["iterations"] == 1 &&
                       mock_result["run"]["stop_reason"] == "stop" && round_trip;

  const CliRun bad = solve("bad", "external:cat >/dev/null; echo '{\"action\":\"adjust\",\"weights\":"
                                  "{\"alpha\":150,\"beta\":100,\"gamma\":-1,\"delta\":15}}'");
  const bool bad_ok = bad.code == 1 && bad.err.find("non-positive weight") != std::string::npos;
  fs::remove_all(dir);
  return {identical && mock_ok && bad_ok,
          fmt("repeat run byte-identical: %s; mock stop after 1 round with lossless context: %s; malformed decision "
              "-> exit %d (%s)",
              identical ? "yes" : "NO", mock_ok ? "yes" : "NO", bad.code, bad_ok ? "policy error" : "UNEXPECTED")};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "pruning count", 1.0, pruning_count},
      {2, "exact optimum", 60.0, exact_optimum},
      {3, "QUBO/Ising equivalence", 30.0, qubo_ising_equivalence},
      {4, "micro-FJSP oracle agreement", 300.0, micro_oracle_agreement},
      {5, "tuner reproduction", 600.0, tuner_reproduction},
      {6, "peptide recovery", 10.0, peptide_recovery},
      {7, "mass table", 1.0, mass_table},
      {8, "quantization loss", 1.0, quantization_loss},
      {9, "encoding suppression", 30.0, encoding_suppression},
      {10, "determinism and protocol", 10.0, determinism_and_protocol},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.limit_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("%s %2d %s: %s [%.2f s, limit %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                secs, c.limit_s, in_time ? "" : ", TOO SLOW");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
