#pragma once

// Closed-loop weight tuning: build a QUBO from the current weights, solve it,
// summarize the outcome, and ask a policy for the next weights or a stop.

#include <chrono>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cimtune/fjsp.hpp"
#include "cimtune/io.hpp"
#include "cimtune/peptide.hpp"
#include "cimtune/solver.hpp"

namespace cimtune::tuner {

using io::Json;
using WeightMap = std::map<std::string, double>;

inline constexpr int kSchemaVersion = 1;

enum class ProblemKind { Fjsp, Peptide };
enum class Action { Adjust, Stop };
enum class Confidence { High, Medium, Low };

std::string_view to_string(ProblemKind k);
std::string_view to_string(Action a);
std::string_view to_string(Confidence c);

struct HistoryEntry {
  WeightMap weights;
  std::optional<double> metric;  // key metric of that round, lower is better
  bool feasible = false;
  friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

struct Incumbent {
  double metric = 0.0;
  WeightMap weights;
  int iteration = 0;
  friend bool operator==(const Incumbent&, const Incumbent&) = default;
};

/// What a policy sees. Carries summaries only, never raw spin vectors.
struct PolicyContext {
  int iteration = 0;
  ProblemKind kind = ProblemKind::Fjsp;
  WeightMap current_weights;
  Json solve_summary;
  Json diagnostics;
  std::vector<HistoryEntry> history;
  std::optional<Incumbent> incumbent;
  friend bool operator==(const PolicyContext&, const PolicyContext&) = default;
};

struct PolicyDecision {
  Action action = Action::Stop;
  WeightMap new_weights;  // complete map, required iff adjust
  std::string rationale;
  Confidence confidence = Confidence::Medium;
  friend bool operator==(const PolicyDecision&, const PolicyDecision&) = default;
};

Json to_json(const PolicyContext& ctx);
/// Throws ArgumentError on a malformed document.
PolicyContext context_from_json(const Json& j);
Json to_json(const PolicyDecision& d);
/// Throws PolicyError on schema violations or non-positive weights. Adjust
/// decisions must name exactly `required`.
PolicyDecision decision_from_json(const Json& j, const std::vector<std::string>& required);

using Policy = std::function<PolicyDecision(const PolicyContext&)>;

struct FjspRuleConfig {
  double growth = 2.2;     // multiplicative step
  double max_step = 300.0;  // additive cap per step
  double gamma_ceiling = 500.0;
};

/// Raises gamma while machine conflicts persist, alpha/beta for the other
/// violations, and stops once the lowest-energy schedule is clean.
PolicyDecision rule_policy_fjsp(const PolicyContext& ctx, const FjspRuleConfig& cfg = {});

struct PeptideRuleConfig {
  double violation_threshold = 0.2;
  double min_ratio = 0.1;
  double max_ratio = 8.5e4;
};

/// Steps the pos:mass ratio in log space from violation rate and deviation trend.
PolicyDecision rule_policy_peptide(const PolicyContext& ctx, const PeptideRuleConfig& cfg = {});

Policy rule_policy(ProblemKind kind);

/// "cmd:<shell command>" or "http://host:port/path"; a bare string is a command.
/// The request is the context JSON on one line; the reply is one decision JSON.
Policy external_policy(const std::string& endpoint, std::vector<std::string> required_weights,
                       std::chrono::milliseconds timeout = std::chrono::seconds(30));

class TunerMemory {
 public:
  explicit TunerMemory(std::size_t max_history = 20);

  bool tried(const WeightMap& w) const { return tried_.contains(w); }
  /// Appends (evicting the oldest past max_history) and updates the incumbent
  /// when the round is feasible and strictly better.
  void record(const HistoryEntry& entry, int iteration);

  const std::deque<HistoryEntry>& history() const noexcept { return history_; }
  const std::optional<Incumbent>& best() const noexcept { return best_; }
  std::size_t max_history() const noexcept { return max_history_; }

 private:
  std::size_t max_history_;
  std::deque<HistoryEntry> history_;
  std::set<WeightMap> tried_;
  std::optional<Incumbent> best_;
};

/// One solved round as the loop needs it.
struct Evaluation {
  SolveMeta meta;
  Json solve_summary;
  Json diagnostics;               // what the policy sees
  std::optional<double> metric;   // set iff the round produced a feasible answer
  Json best;                      // best decoded answer of the round
  Json extra = Json::object();    // model statistics, quantization report
};

class TuningProblem {
 public:
  virtual ~TuningProblem() = default;
  virtual ProblemKind kind() const = 0;
  virtual std::vector<std::string> weight_names() const = 0;
  /// Throws ArgumentError when weights are missing or invalid.
  virtual void validate(const WeightMap& w) const;
  virtual Evaluation evaluate(const WeightMap& w, const SolverConfig& cfg) const = 0;
};

struct FjspProblemOptions {
  fjsp::H3Mode h3 = fjsp::H3Mode::Strict;
  bool quantized = false;
};

class FjspTuning : public TuningProblem {
 public:
  FjspTuning(fjsp::Instance inst, FjspProblemOptions opts = {});
  ProblemKind kind() const override { return ProblemKind::Fjsp; }
  std::vector<std::string> weight_names() const override { return {"alpha", "beta", "gamma", "delta"}; }
  Evaluation evaluate(const WeightMap& w, const SolverConfig& cfg) const override;

  const fjsp::Instance& instance() const noexcept { return inst_; }
  const fjsp::VariableIndex& index() const noexcept { return index_; }
  static WeightMap to_map(const fjsp::Weights& w);
  static fjsp::Weights from_map(const WeightMap& m);

 private:
  fjsp::Instance inst_;
  fjsp::VariableIndex index_;
  FjspProblemOptions opts_;
};

enum class Encoding { OneHot, Count };
std::string_view to_string(Encoding e);
Encoding parse_encoding(std::string_view s);

struct PeptideProblemOptions {
  Encoding encoding = Encoding::OneHot;
  peptide::CountEncodingConfig count;  // bits and L_mid; A and E come from the weights
  std::vector<double> acid_bias;       // optional per-acid diagonal bias (one-hot only)
  bool quantized = false;
};

/// Weights are {"pos", "mass"}. Under count encoding pos weighs the length
/// term (E) and mass the mass term (A).
class PeptideTuning : public TuningProblem {
 public:
  PeptideTuning(peptide::Problem problem, PeptideProblemOptions opts = {});
  ProblemKind kind() const override { return ProblemKind::Peptide; }
  std::vector<std::string> weight_names() const override { return {"mass", "pos"}; }
  Evaluation evaluate(const WeightMap& w, const SolverConfig& cfg) const override;

  const peptide::Problem& problem() const noexcept { return problem_; }
  QuboMatrix<double> build(const WeightMap& w) const;

 private:
  peptide::Problem problem_;
  PeptideProblemOptions opts_;
};

struct IterationRecord {
  int iteration = 0;
  WeightMap weights;
  Json solve_meta;
  Json solve_summary;
  Json diagnostics;
  std::optional<double> metric;
  PolicyDecision decision;
  Json meta = Json::object();  // timestamps; empty in deterministic mode
  friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

Json to_json(const IterationRecord& r);
IterationRecord record_from_json(const Json& j);
/// One compact JSON document per line.
std::string to_jsonl(const std::vector<IterationRecord>& records);

struct TuningOptions {
  int max_iter = 3;
  std::size_t max_history = 20;
  bool deterministic = false;
};

struct TuningReport {
  std::vector<IterationRecord> records;
  std::string stop_reason;  // "stop" | "max_iter" | "duplicate"
  std::optional<Incumbent> incumbent;
  Json incumbent_best;  // decoded answer of the incumbent round
  Evaluation last;
  std::vector<HistoryEntry> history;
};

/// Raised when the policy fails mid-run; carries the records written so far.
class TuningAborted : public PolicyError {
 public:
  TuningAborted(const std::string& what, std::vector<IterationRecord> records)
      : PolicyError(what), records_(std::move(records)) {}
  const std::vector<IterationRecord>& records() const noexcept { return records_; }

 private:
  std::vector<IterationRecord> records_;
};

/// Seed used for round `iteration` (zero-based) of a run seeded with `seed`.
std::uint64_t iteration_seed(std::uint64_t seed, int iteration);

TuningReport run_tuning(const TuningProblem& problem, const WeightMap& initial, const Policy& policy,
                        const SolverConfig& solver, const TuningOptions& opts = {});

}  // namespace cimtune::tuner
