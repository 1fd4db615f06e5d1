#include <algorithm>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <sstream>

#include "cimtune/tuner.hpp"

namespace cimtune::tuner {
namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%S") << '.' << std::setw(3) << std::setfill('0') << ms << 'Z';
  return os.str();
}

}  // namespace

TunerMemory::TunerMemory(std::size_t max_history) : max_history_(max_history) {
  if (max_history_ < 1) throw ArgumentError("max_history must be >= 1");
}

void TunerMemory::record(const HistoryEntry& entry, int iteration) {
  if (tried_.contains(entry.weights)) throw ArgumentError("weights were already tried");
  tried_.insert(entry.weights);
  history_.push_back(entry);
  while (history_.size() > max_history_) history_.pop_front();
  if (entry.feasible && entry.metric && (!best_ || *entry.metric < best_->metric)) {
    best_ = Incumbent{*entry.metric, entry.weights, iteration};
  }
}

void TuningProblem::validate(const WeightMap& w) const {
  const auto names = weight_names();
  for (const auto& n : names) {
    auto it = w.find(n);
    if (it == w.end()) throw ArgumentError("missing weight '" + n + "'");
    if (!std::isfinite(it->second) || it->second <= 0.0) throw ArgumentError("weight '" + n + "' must be positive");
  }
  for (const auto& [k, v] : w) {
    if (std::find(names.begin(), names.end(), k) == names.end()) throw ArgumentError("unknown weight '" + k + "'");
  }
}

std::uint64_t iteration_seed(std::uint64_t seed, int iteration) {
  // splitmix64 finalizer so neighbouring runs do not share chain seeds.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(iteration + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

TuningReport run_tuning(const TuningProblem& problem, const WeightMap& initial, const Policy& policy,
                        const SolverConfig& solver, const TuningOptions& opts) {
  if (opts.max_iter < 1) throw ArgumentError("max_iter must be >= 1");
  problem.validate(initial);
  solver.validate();

  TunerMemory memory(opts.max_history);
  TuningReport report;
  WeightMap weights = initial;

  for (int it = 0;; ++it) {
    const std::string started = opts.deterministic ? "" : utc_now();
    const auto t0 = std::chrono::steady_clock::now();

    SolverConfig cfg = solver;
    cfg.seed = iteration_seed(solver.seed, it);
    Evaluation ev = problem.evaluate(weights, cfg);

    const std::optional<Incumbent> before = memory.best();
    memory.record(HistoryEntry{weights, ev.metric, ev.metric.has_value()}, it);
    if (memory.best() != before) report.incumbent_best = ev.best;

    PolicyContext ctx;
    ctx.iteration = it;
    ctx.kind = problem.kind();
    ctx.current_weights = weights;
    ctx.solve_summary = ev.solve_summary;
    ctx.diagnostics = ev.diagnostics;
    ctx.history.assign(memory.history().begin(), memory.history().end());
    ctx.incumbent = memory.best();

    PolicyDecision decision;
    try {
      decision = policy(ctx);
    } catch (const Error& e) {
      throw TuningAborted(e.what(), report.records);
    }

    IterationRecord rec;
    rec.iteration = it;
    rec.weights = weights;
    rec.solve_meta = io::to_json(ev.meta, !opts.deterministic);
    rec.solve_summary = ev.solve_summary;
    rec.diagnostics = ev.diagnostics;
    rec.metric = ev.metric;
    rec.decision = decision;
    if (!opts.deterministic) {
      rec.meta = Json{{"started_at", started},
                      {"finished_at", utc_now()},
                      {"wall_time_ms", std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                                           .count()}};
    }
    report.records.push_back(std::move(rec));
    report.last = std::move(ev);

    if (decision.action == Action::Stop) {
      report.stop_reason = "stop";
      break;
    }
    if (it + 1 >= opts.max_iter) {
      report.stop_reason = "max_iter";
      break;
    }
    try {
      problem.validate(decision.new_weights);
    } catch (const ArgumentError& e) {
      throw TuningAborted(std::string("policy proposed invalid weights: ") + e.what(), report.records);
    }
    if (memory.tried(decision.new_weights)) {
      report.stop_reason = "duplicate";
      break;
    }
    weights = decision.new_weights;
  }

  report.incumbent = memory.best();
  report.history.assign(memory.history().begin(), memory.history().end());
  return report;
}

}  // namespace cimtune::tuner
