#include <algorithm>
#include <limits>
#include <tuple>

#include "cimtune/fjsp.hpp"

namespace cimtune::fjsp {

namespace {

// Every semi-active schedule is reproduced by dispatching its operations in
// (start, job) order, each appended to its machine at the earliest time. The
// search therefore only explores dispatch sequences in that canonical order.
class BranchAndBound {
 public:
  BranchAndBound(const Instance& inst, std::int64_t budget)
      : inst_(inst),
        budget_(budget),
        next_op_(inst.job_count(), 0),
        job_ready_(inst.job_count(), 0),
        machine_ready_(inst.machines(), 0),
        remaining_(inst.job_count(), 0),
        current_(Schedule::empty_for(inst)) {
    for (int j = 0; j < inst.job_count(); ++j) {
      for (const Operation& o : inst.jobs()[j].operations) remaining_[j] += o.min_time();
      remaining_total_ += remaining_[j];
    }
  }

  OracleResult run() {
    seed_incumbent();
    root_bound_ = lower_bound(0, -1);
    if (root_bound_ < best_) search(0, -1, -1, 0);
    return {best_, best_schedule_, nodes_};
  }

 private:
  int lower_bound(int makespan, int last_start) const {
    int bound = makespan;
    std::int64_t machine_total = remaining_total_;
    for (int m = 0; m < inst_.machines(); ++m) machine_total += machine_ready_[m];
    const int machines = inst_.machines();
    bound = std::max(bound, static_cast<int>((machine_total + machines - 1) / machines));
    for (int j = 0; j < inst_.job_count(); ++j) {
      if (remaining_[j] == 0) continue;
      bound = std::max(bound, std::max(job_ready_[j], last_start) + remaining_[j]);
    }
    return bound;
  }

  // Earliest-completion greedy dispatch gives the first incumbent.
  void seed_incumbent() {
    std::vector<int> next(inst_.job_count(), 0), job_ready(inst_.job_count(), 0), machine_ready(inst_.machines(), 0);
    Schedule schedule = Schedule::empty_for(inst_);
    int makespan = 0;
    for (int step = 0; step < inst_.operation_count(); ++step) {
      int best_end = std::numeric_limits<int>::max(), best_job = -1, best_machine = -1, best_start = 0;
      for (int j = 0; j < inst_.job_count(); ++j) {
        if (next[j] >= static_cast<int>(inst_.jobs()[j].operations.size())) continue;
        const Operation& op = inst_.jobs()[j].operations[next[j]];
        for (const int m : op.eligible_machines()) {
          const int start = std::max(job_ready[j], machine_ready[m]);
          if (start + op.time(m) < best_end) {
            best_end = start + op.time(m);
            best_job = j;
            best_machine = m;
            best_start = start;
          }
        }
      }
      schedule.at({best_job, next[best_job]}) = ScheduledOp{best_machine, best_start, best_end};
      job_ready[best_job] = machine_ready[best_machine] = best_end;
      ++next[best_job];
      makespan = std::max(makespan, best_end);
    }
    best_ = makespan;
    best_schedule_ = schedule;
  }

  void search(int depth, int last_job, int last_start, int makespan) {
    if (++nodes_ > budget_) {
      throw BudgetExhaustedError("branch-and-bound budget of " + std::to_string(budget_) + " nodes exhausted",
                                 best_, root_bound_);
    }
    if (depth == inst_.operation_count()) {
      if (makespan < best_) {
        best_ = makespan;
        best_schedule_ = current_;
      }
      return;
    }

    struct Child {
      int end, start, job, machine;
    };
    std::vector<Child> children;
    for (int j = 0; j < inst_.job_count(); ++j) {
      if (next_op_[j] >= static_cast<int>(inst_.jobs()[j].operations.size())) continue;
      const Operation& op = inst_.jobs()[j].operations[next_op_[j]];
      for (const int m : op.eligible_machines()) {
        const int start = std::max(job_ready_[j], machine_ready_[m]);
        if (start < last_start || (start == last_start && j <= last_job)) continue;
        children.push_back({start + op.time(m), start, j, m});
      }
    }
    std::sort(children.begin(), children.end(), [](const Child& a, const Child& b) {
      return std::tie(a.end, a.start, a.job, a.machine) < std::tie(b.end, b.start, b.job, b.machine);
    });

    for (const Child& c : children) {
      const Operation& op = inst_.jobs()[c.job].operations[next_op_[c.job]];
      const OpRef ref{c.job, next_op_[c.job]};
      const int saved_job_ready = job_ready_[c.job];
      const int saved_machine_ready = machine_ready_[c.machine];

      job_ready_[c.job] = c.end;
      machine_ready_[c.machine] = c.end;
      remaining_[c.job] -= op.min_time();
      remaining_total_ -= op.min_time();
      ++next_op_[c.job];
      current_.at(ref) = ScheduledOp{c.machine, c.start, c.end};

      const int span = std::max(makespan, c.end);
      if (lower_bound(span, c.start) < best_) search(depth + 1, c.job, c.start, span);

      current_.at(ref).reset();
      --next_op_[c.job];
      remaining_total_ += op.min_time();
      remaining_[c.job] += op.min_time();
      machine_ready_[c.machine] = saved_machine_ready;
      job_ready_[c.job] = saved_job_ready;
    }
  }

  const Instance& inst_;
  std::int64_t budget_;
  std::int64_t nodes_ = 0;
  std::vector<int> next_op_, job_ready_, machine_ready_, remaining_;
  std::int64_t remaining_total_ = 0;
  Schedule current_;
  int best_ = std::numeric_limits<int>::max();
  Schedule best_schedule_;
  int root_bound_ = 0;
};

}  // namespace

OracleResult solve_min_makespan(const Instance& inst, std::int64_t node_budget) {
  if (node_budget < 1) throw ArgumentError("node budget must be positive");
  return BranchAndBound(inst, node_budget).run();
}

int exact_min_makespan(const Instance& inst, std::int64_t node_budget) {
  return solve_min_makespan(inst, node_budget).makespan;
}

}  // namespace cimtune::fjsp
