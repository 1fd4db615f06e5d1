#include <algorithm>

#include "cimtune/tuner.hpp"

namespace cimtune::tuner {
namespace {

SolveResult run_solver(const QuboMatrix<double>& q, const SolverConfig& cfg, bool quantized) {
  return quantized ? solve_quantized(q, cfg) : solve_annealed(q, cfg);
}

Json summarize(const SolveResult& r) {
  Json energies = Json::array(), original = Json::array();
  for (const auto& s : r.solutions) {
    energies.push_back(s.energy);
    if (s.original_energy) original.push_back(*s.original_energy);
  }
  Json j{{"count", r.solutions.size()}, {"energies", std::move(energies)}};
  if (!original.empty()) j["original_energies"] = std::move(original);
  return j;
}

Json model_stats(const QuboMatrix<double>& q, const SolveResult& r) {
  Json j{{"variables", q.size()}, {"couplings", q.coupling_count()}};
  if (coefficient_stats(q).count > 0) {
    j["coefficient_stats"] = io::to_json(coefficient_stats(normalize_max_abs(q), 1e-4));
  }
  if (r.meta.quantization) j["quantization"] = io::to_json(*r.meta.quantization);
  return j;
}

}  // namespace

// ---------------------------------------------------------------------------
// FJSP
// ---------------------------------------------------------------------------

FjspTuning::FjspTuning(fjsp::Instance inst, FjspProblemOptions opts)
    : inst_(std::move(inst)), index_(fjsp::prune_variables(inst_)), opts_(opts) {}

WeightMap FjspTuning::to_map(const fjsp::Weights& w) {
  return {{"alpha", w.alpha}, {"beta", w.beta}, {"gamma", w.gamma}, {"delta", w.delta}};
}

fjsp::Weights FjspTuning::from_map(const WeightMap& m) {
  return {m.at("alpha"), m.at("beta"), m.at("gamma"), m.at("delta")};
}

Evaluation FjspTuning::evaluate(const WeightMap& w, const SolverConfig& cfg) const {
  validate(w);
  const QuboMatrix<double> q = fjsp::build_qubo(inst_, from_map(w), index_, opts_.h3);
  const SolveResult r = run_solver(q, cfg, opts_.quantized);

  Evaluation ev;
  ev.meta = r.meta;
  ev.solve_summary = summarize(r);
  ev.extra = model_stats(q, r);
  ev.extra["raw_variables"] = index_.raw_count();

  std::optional<std::size_t> best;
  int feasible = 0;
  std::vector<fjsp::DecodedSchedule> decoded;
  for (std::size_t k = 0; k < r.solutions.size(); ++k) {
    decoded.push_back(fjsp::decode_schedule(inst_, index_, to_bits(r.solutions[k].spins)));
    const auto& d = decoded.back().diagnostics;
    if (!d.feasible()) continue;
    ++feasible;
    if (!best || *d.makespan < *decoded[*best].diagnostics.makespan) best = k;
  }

  const fjsp::Diagnostics& first = decoded.front().diagnostics;
  ev.diagnostics = Json{{"assignment_violations", first.assignment_violations.size()},
                        {"sequence_violations", first.sequence_violations.size()},
                        {"machine_conflicts", first.machine_conflicts.size()},
                        {"makespan", first.makespan ? Json(*first.makespan) : Json(nullptr)},
                        {"feasible_solutions", feasible},
                        {"best_makespan", best ? Json(*decoded[*best].diagnostics.makespan) : Json(nullptr)}};
  if (best) ev.metric = *decoded[*best].diagnostics.makespan;

  const std::size_t shown = best.value_or(0);
  ev.best = Json{{"rank", shown},
                 {"energy", r.solutions[shown].energy},
                 {"schedule", io::to_json(decoded[shown].schedule)},
                 {"diagnostics", io::to_json(decoded[shown].diagnostics)}};
  return ev;
}

// ---------------------------------------------------------------------------
// Peptide
// ---------------------------------------------------------------------------

std::string_view to_string(Encoding e) { return e == Encoding::OneHot ? "onehot" : "count"; }

Encoding parse_encoding(std::string_view s) {
  if (s == "onehot") return Encoding::OneHot;
  if (s == "count") return Encoding::Count;
  throw ArgumentError("unknown encoding '" + std::string(s) + "'");
}

PeptideTuning::PeptideTuning(peptide::Problem problem, PeptideProblemOptions opts)
    : problem_(std::move(problem)), opts_(std::move(opts)) {
  opts_.count.validate();
  if (!opts_.acid_bias.empty() && static_cast<int>(opts_.acid_bias.size()) != problem_.acid_count()) {
    throw ArgumentError("acid bias needs one entry per acid");
  }
}

QuboMatrix<double> PeptideTuning::build(const WeightMap& w) const {
  validate(w);
  if (opts_.encoding == Encoding::OneHot) {
    return peptide::build_onehot_qubo(problem_, {w.at("pos"), w.at("mass")}, opts_.acid_bias);
  }
  peptide::CountEncodingConfig cfg = opts_.count;
  cfg.A = w.at("mass");
  cfg.E = w.at("pos");
  return peptide::build_count_qubo(problem_, cfg);
}

Evaluation PeptideTuning::evaluate(const WeightMap& w, const SolverConfig& cfg) const {
  const QuboMatrix<double> q = build(w);
  const SolveResult r = run_solver(q, cfg, opts_.quantized);

  Evaluation ev;
  ev.meta = r.meta;
  ev.solve_summary = summarize(r);
  ev.extra = model_stats(q, r);
  ev.extra["encoding"] = std::string(to_string(opts_.encoding));

  if (opts_.encoding == Encoding::OneHot) {
    std::vector<peptide::CompositionSolution> population;
    for (const auto& s : r.solutions) population.push_back(peptide::decode_onehot(problem_, to_bits(s.spins)));
    const peptide::PopulationMetrics m = peptide::evaluate_population(population);
    ev.diagnostics = io::to_json(m);
    ev.metric = m.best_deviation_da;
    const std::size_t shown = static_cast<std::size_t>(m.best_index.value_or(0));
    ev.best = io::to_json(population[shown], problem_);
    ev.best["rank"] = shown;
    ev.best["energy"] = r.solutions[shown].energy;
    return ev;
  }

  // Count encoding has no positions; a solution is clean when its length is S.
  int violating = 0;
  std::optional<std::size_t> best;
  std::vector<peptide::CountSolution> decoded;
  for (std::size_t k = 0; k < r.solutions.size(); ++k) {
    decoded.push_back(peptide::decode_count(problem_, opts_.count, to_bits(r.solutions[k].spins)));
    if (decoded.back().length != problem_.positions) {
      ++violating;
    } else if (!best || decoded.back().deviation_da < decoded[*best].deviation_da) {
      best = k;
    }
  }
  auto opt = [](bool has, double v) { return has ? Json(v) : Json(nullptr); };
  ev.diagnostics = Json{{"size", r.solutions.size()},
                        {"violation_rate", static_cast<double>(violating) / r.solutions.size()},
                        {"best_deviation_da", opt(best.has_value(), best ? decoded[*best].deviation_da : 0.0)},
                        {"best_relative",
                         opt(best.has_value(), best ? decoded[*best].deviation_da / problem_.calibrated_mass : 0.0)},
                        {"best_index", best ? Json(*best) : Json(nullptr)}};
  if (best) ev.metric = decoded[*best].deviation_da;
  const std::size_t shown = best.value_or(0);
  Json counts = Json::object();
  for (int a = 0; a < problem_.acid_count(); ++a) {
    if (decoded[shown].counts[a] > 0) counts[std::string(1, problem_.codes[a])] = decoded[shown].counts[a];
  }
  ev.best = Json{{"rank", shown},
                 {"energy", r.solutions[shown].energy},
                 {"counts", std::move(counts)},
                 {"length", decoded[shown].length},
                 {"total_mass", decoded[shown].total_mass},
                 {"deviation_da", decoded[shown].deviation_da}};
  return ev;
}

}  // namespace cimtune::tuner
