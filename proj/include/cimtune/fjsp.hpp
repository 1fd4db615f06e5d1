#pragma once

// Flexible job-shop scheduling: instances, time-indexed QUBO construction,
// schedule decoding and an exact makespan oracle.
//
// A binary variable k(i, t, o) is 1 when operation o starts on machine i at
// integer time t. Jobs, operations and machines are zero-based in code and
// one-based in anything printed for humans.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cimtune/qubo.hpp"

namespace cimtune::fjsp {

/// (job, position within job), both zero-based.
struct OpRef {
  int job = 0;
  int op = 0;
  friend auto operator<=>(const OpRef&, const OpRef&) = default;
};

/// "O1,2"-style one-based label.
std::string label(OpRef ref);

class Operation {
 public:
  /// times[i] is the processing time on machine i, or nullopt if ineligible.
  explicit Operation(std::vector<std::optional<int>> times);

  const std::vector<std::optional<int>>& times() const noexcept { return times_; }
  bool eligible(int machine) const;
  /// Processing time on an eligible machine; throws ArgumentError otherwise.
  int time(int machine) const;
  int min_time() const noexcept { return min_time_; }
  std::vector<int> eligible_machines() const;

 private:
  std::vector<std::optional<int>> times_;
  int min_time_ = 0;
};

struct Job {
  std::vector<Operation> operations;
};

class Instance {
 public:
  /// Validates eligibility, positive times and that t_max admits every job.
  Instance(int machines, std::vector<Job> jobs, int t_max);

  int machines() const noexcept { return machines_; }
  int t_max() const noexcept { return t_max_; }
  const std::vector<Job>& jobs() const noexcept { return jobs_; }
  int job_count() const noexcept { return static_cast<int>(jobs_.size()); }
  int operation_count() const noexcept { return operation_count_; }
  const Operation& operation(OpRef ref) const;
  bool is_last(OpRef ref) const;
  /// All operations, job-major.
  std::vector<OpRef> operations() const;
  /// Dense id of an operation in job-major order.
  int flat_id(OpRef ref) const;

  /// max over jobs of the sum of minimum processing times.
  int horizon_lower_bound() const;
  Instance with_horizon(int t_max) const;

 private:
  int machines_;
  std::vector<Job> jobs_;
  int t_max_;
  int operation_count_ = 0;
  std::vector<int> job_offset_;
};

/// Sum of minimum processing times of the operations before `ref` in its job.
int min_predecessor_time(const Instance& inst, OpRef ref);
/// t_max minus the minimum processing times of the operations after `ref`.
int max_start_time(const Instance& inst, OpRef ref);

/// Penalty weights: alpha (assignment), beta (sequence), gamma (machine
/// conflict), delta (makespan objective).
struct Weights {
  double alpha = 150.0;
  double beta = 100.0;
  double gamma = 100.0;
  double delta = 15.0;

  /// Throws ArgumentError unless every weight is finite and non-negative.
  void validate() const;
  friend bool operator==(const Weights&, const Weights&) = default;
};

struct VarKey {
  int machine = 0;
  int start = 0;
  OpRef op;
  friend auto operator<=>(const VarKey&, const VarKey&) = default;
};

/// Dense numbering of the variables that survive pruning.
class VariableIndex {
 public:
  VariableIndex(std::vector<VarKey> keys, Index raw_count, int operation_count, const Instance& inst);

  Index size() const noexcept { return static_cast<Index>(keys_.size()); }
  /// Variable count before pruning: sum over operations of |machines| * (t_max + 1).
  Index raw_count() const noexcept { return raw_count_; }
  const VarKey& key(Index i) const { return keys_.at(static_cast<std::size_t>(i)); }
  const std::vector<VarKey>& keys() const noexcept { return keys_; }
  std::optional<Index> find(const VarKey& key) const;
  /// Variables belonging to one operation (by flat id), ascending.
  std::span<const Index> variables_of(int flat_op) const;
  int operation_count() const noexcept { return static_cast<int>(by_operation_.size()); }

 private:
  std::vector<VarKey> keys_;
  std::map<VarKey, Index> lookup_;
  std::vector<std::vector<Index>> by_operation_;
  Index raw_count_;
};

/// Keeps (i, t, o) iff i is eligible for o and P_o <= t and t + p(i,o) <= S_o.
/// Throws InfeasibleHorizonError naming the first operation with an empty window.
VariableIndex prune_variables(const Instance& inst);

/// Boundary rule for the machine-conflict term.
enum class H3Mode {
  Strict,        // half-open intervals [t, t+p) must intersect; back-to-back is legal
  Closed,  // closed sets 0 <= t - t' <= p_A or 0 <= t' - t <= p_B, ordered pairs
};

enum class Term { Assignment, Sequence, MachineConflict, Makespan };

/// One Hamiltonian term with unit weight.
QuboMatrix<double> build_term(const Instance& inst, const VariableIndex& index, Term term,
                              H3Mode mode = H3Mode::Strict);

/// alpha H1 + beta H2 + gamma H3 + delta H4 over the pruned variables.
QuboMatrix<double> build_qubo(const Instance& inst, const Weights& weights, const VariableIndex& index,
                              H3Mode mode = H3Mode::Strict);

struct ScheduledOp {
  int machine = 0;
  int start = 0;
  int end = 0;
  friend bool operator==(const ScheduledOp&, const ScheduledOp&) = default;
};

/// Per job, per operation: the placement, or nullopt when undetermined.
struct Schedule {
  std::vector<std::vector<std::optional<ScheduledOp>>> ops;

  static Schedule empty_for(const Instance& inst);
  const std::optional<ScheduledOp>& at(OpRef ref) const;
  std::optional<ScheduledOp>& at(OpRef ref);
  friend bool operator==(const Schedule&, const Schedule&) = default;
};

struct SequenceViolation {
  OpRef predecessor;
  OpRef successor;
};

struct MachineConflict {
  int machine = 0;
  OpRef first;
  OpRef second;
  int overlap_begin = 0;
  int overlap_end = 0;
};

struct Diagnostics {
  std::vector<OpRef> assignment_violations;  // 0 or >= 2 selected (machine, start) pairs
  std::vector<SequenceViolation> sequence_violations;
  std::vector<MachineConflict> machine_conflicts;
  std::optional<int> makespan;  // present iff every list above is empty

  bool feasible() const noexcept { return makespan.has_value(); }
};

/// Checks a schedule against the assignment, precedence and machine rules.
/// Missing entries count as assignment violations. Throws ArgumentError if an
/// entry uses an ineligible machine or a wrong duration.
Diagnostics validate_schedule(const Instance& inst, const Schedule& schedule);

struct DecodedSchedule {
  Schedule schedule;
  Diagnostics diagnostics;
};

DecodedSchedule decode_schedule(const Instance& inst, const VariableIndex& index, const BinaryAssignment& bits);

/// Bits selecting exactly the schedule's placements. Throws ArgumentError if a
/// placement is missing or was pruned.
BinaryAssignment encode_schedule(const Instance& inst, const VariableIndex& index, const Schedule& schedule);

struct OracleResult {
  int makespan = 0;
  Schedule schedule;
  std::int64_t nodes = 0;
};

/// Depth-first branch and bound over machine assignments and dispatch orders.
/// Ignores t_max. Throws BudgetExhaustedError after `node_budget` nodes.
OracleResult solve_min_makespan(const Instance& inst, std::int64_t node_budget = 50'000'000);
int exact_min_makespan(const Instance& inst, std::int64_t node_budget = 50'000'000);

/// Fixed-width text chart, one row per machine.
std::string gantt_text(const Instance& inst, const Schedule& schedule);
/// Self-contained SVG chart, one row per machine, one labeled block per operation.
std::string gantt_svg(const Instance& inst, const Schedule& schedule, const std::string& title = "");

}  // namespace cimtune::fjsp
