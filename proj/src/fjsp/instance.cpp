#include <algorithm>
#include <cmath>
#include <numeric>

#include "cimtune/fjsp.hpp"

namespace cimtune::fjsp {

std::string label(OpRef ref) {
  return "O" + std::to_string(ref.job + 1) + "," + std::to_string(ref.op + 1);
}

Operation::Operation(std::vector<std::optional<int>> times) : times_(std::move(times)) {
  int best = 0;
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!times_[i]) continue;
    if (*times_[i] < 1) {
      throw ArgumentError("processing time on machine " + std::to_string(i + 1) + " must be >= 1");
    }
    best = best == 0 ? *times_[i] : std::min(best, *times_[i]);
  }
  if (best == 0) throw ArgumentError("operation has no eligible machine");
  min_time_ = best;
}

bool Operation::eligible(int machine) const {
  return machine >= 0 && machine < static_cast<int>(times_.size()) && times_[machine].has_value();
}

int Operation::time(int machine) const {
  if (!eligible(machine)) throw ArgumentError("machine " + std::to_string(machine + 1) + " is not eligible");
  return *times_[machine];
}

std::vector<int> Operation::eligible_machines() const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(times_.size()); ++i) {
    if (times_[i]) out.push_back(i);
  }
  return out;
}

Instance::Instance(int machines, std::vector<Job> jobs, int t_max)
    : machines_(machines), jobs_(std::move(jobs)), t_max_(t_max) {
  if (machines_ < 1) throw ArgumentError("instance needs at least one machine");
  if (jobs_.empty()) throw ArgumentError("instance needs at least one job");
  if (t_max_ < 0) throw ArgumentError("t_max must be non-negative");
  for (std::size_t j = 0; j < jobs_.size(); ++j) {
    job_offset_.push_back(operation_count_);
    if (jobs_[j].operations.empty()) throw ArgumentError("job " + std::to_string(j + 1) + " has no operations");
    for (std::size_t h = 0; h < jobs_[j].operations.size(); ++h) {
      if (static_cast<int>(jobs_[j].operations[h].times().size()) != machines_) {
        throw ArgumentError("operation " + label({int(j), int(h)}) + " lists " +
                            std::to_string(jobs_[j].operations[h].times().size()) + " machine times, expected " +
                            std::to_string(machines_));
      }
    }
    operation_count_ += static_cast<int>(jobs_[j].operations.size());
  }
  const int bound = horizon_lower_bound();
  if (t_max_ < bound) {
    throw InfeasibleHorizonError("infeasible horizon: t_max = " + std::to_string(t_max_) +
                                 " is below the critical job length " + std::to_string(bound));
  }
}

const Operation& Instance::operation(OpRef ref) const {
  if (ref.job < 0 || ref.job >= job_count() || ref.op < 0 ||
      ref.op >= static_cast<int>(jobs_[ref.job].operations.size())) {
    throw ArgumentError("no operation " + label(ref));
  }
  return jobs_[ref.job].operations[ref.op];
}

bool Instance::is_last(OpRef ref) const {
  operation(ref);
  return ref.op + 1 == static_cast<int>(jobs_[ref.job].operations.size());
}

std::vector<OpRef> Instance::operations() const {
  std::vector<OpRef> out;
  out.reserve(static_cast<std::size_t>(operation_count_));
  for (int j = 0; j < job_count(); ++j) {
    for (int h = 0; h < static_cast<int>(jobs_[j].operations.size()); ++h) out.push_back({j, h});
  }
  return out;
}

int Instance::flat_id(OpRef ref) const {
  operation(ref);
  return job_offset_[ref.job] + ref.op;
}

int Instance::horizon_lower_bound() const {
  int bound = 0;
  for (const Job& job : jobs_) {
    int sum = 0;
    for (const Operation& o : job.operations) sum += o.min_time();
    bound = std::max(bound, sum);
  }
  return bound;
}

Instance Instance::with_horizon(int t_max) const { return Instance(machines_, jobs_, t_max); }

int min_predecessor_time(const Instance& inst, OpRef ref) {
  inst.operation(ref);
  const auto& ops = inst.jobs()[ref.job].operations;
  return std::accumulate(ops.begin(), ops.begin() + ref.op, 0,
                         [](int acc, const Operation& o) { return acc + o.min_time(); });
}

int max_start_time(const Instance& inst, OpRef ref) {
  inst.operation(ref);
  const auto& ops = inst.jobs()[ref.job].operations;
  return inst.t_max() - std::accumulate(ops.begin() + ref.op + 1, ops.end(), 0,
                                        [](int acc, const Operation& o) { return acc + o.min_time(); });
}

void Weights::validate() const {
  const std::pair<const char*, double> named[] = {{"alpha", alpha}, {"beta", beta}, {"gamma", gamma}, {"delta", delta}};
  for (const auto& [name, v] : named) {
    if (!std::isfinite(v) || v < 0.0) throw ArgumentError(std::string("weight ") + name + " must be finite and >= 0");
  }
}

Schedule Schedule::empty_for(const Instance& inst) {
  Schedule s;
  for (const Job& job : inst.jobs()) s.ops.emplace_back(job.operations.size());
  return s;
}

const std::optional<ScheduledOp>& Schedule::at(OpRef ref) const { return ops.at(ref.job).at(ref.op); }
std::optional<ScheduledOp>& Schedule::at(OpRef ref) { return ops.at(ref.job).at(ref.op); }

}  // namespace cimtune::fjsp
