#include <algorithm>

#include "cimtune/fjsp.hpp"

namespace cimtune::fjsp {

Diagnostics validate_schedule(const Instance& inst, const Schedule& schedule) {
  if (static_cast<int>(schedule.ops.size()) != inst.job_count()) {
    throw DimensionError("schedule has " + std::to_string(schedule.ops.size()) + " jobs, instance has " +
                         std::to_string(inst.job_count()));
  }
  Diagnostics d;
  const std::vector<OpRef> ops = inst.operations();
  for (const OpRef ref : ops) {
    if (schedule.ops[ref.job].size() != inst.jobs()[ref.job].operations.size()) {
      throw DimensionError("schedule for job " + std::to_string(ref.job + 1) + " has the wrong operation count");
    }
    const auto& placed = schedule.at(ref);
    if (!placed) {
      d.assignment_violations.push_back(ref);
      continue;
    }
    const Operation& op = inst.operation(ref);
    if (!op.eligible(placed->machine)) {
      throw ArgumentError(label(ref) + " placed on ineligible machine " + std::to_string(placed->machine + 1));
    }
    if (placed->end - placed->start != op.time(placed->machine) || placed->start < 0) {
      throw ArgumentError(label(ref) + " has a duration that does not match its machine");
    }
  }

  for (const OpRef ref : ops) {
    if (inst.is_last(ref)) continue;
    const OpRef next{ref.job, ref.op + 1};
    const auto& a = schedule.at(ref);
    const auto& b = schedule.at(next);
    if (a && b && b->start < a->end) d.sequence_violations.push_back({ref, next});
  }

  for (std::size_t x = 0; x < ops.size(); ++x) {
    for (std::size_t y = x + 1; y < ops.size(); ++y) {
      const auto& a = schedule.at(ops[x]);
      const auto& b = schedule.at(ops[y]);
      if (!a || !b || a->machine != b->machine || ops[x].job == ops[y].job) continue;
      const int begin = std::max(a->start, b->start);
      const int end = std::min(a->end, b->end);
      if (begin < end) d.machine_conflicts.push_back({a->machine, ops[x], ops[y], begin, end});
    }
  }

  if (d.assignment_violations.empty() && d.sequence_violations.empty() && d.machine_conflicts.empty()) {
    int makespan = 0;
    for (const OpRef ref : ops) makespan = std::max(makespan, schedule.at(ref)->end);
    d.makespan = makespan;
  }
  return d;
}

DecodedSchedule decode_schedule(const Instance& inst, const VariableIndex& index, const BinaryAssignment& bits) {
  if (bits.size() != index.size()) {
    throw DimensionError("bit vector has " + std::to_string(bits.size()) + " entries, index has " +
                         std::to_string(index.size()));
  }
  Schedule schedule = Schedule::empty_for(inst);
  std::vector<OpRef> multiple;
  for (const OpRef ref : inst.operations()) {
    int selected = 0;
    for (const Index v : index.variables_of(inst.flat_id(ref))) {
      if (bits[v] == 0) continue;
      const VarKey& k = index.key(v);
      if (++selected == 1) {
        schedule.at(ref) = ScheduledOp{k.machine, k.start, k.start + inst.operation(ref).time(k.machine)};
      }
    }
    if (selected > 1) schedule.at(ref).reset();
  }
  Diagnostics d = validate_schedule(inst, schedule);
  return {std::move(schedule), std::move(d)};
}

BinaryAssignment encode_schedule(const Instance& inst, const VariableIndex& index, const Schedule& schedule) {
  std::vector<std::int8_t> bits(static_cast<std::size_t>(index.size()), 0);
  for (const OpRef ref : inst.operations()) {
    const auto& placed = schedule.at(ref);
    if (!placed) throw ArgumentError(label(ref) + " is not placed");
    const auto v = index.find({placed->machine, placed->start, ref});
    if (!v) {
      throw ArgumentError(label(ref) + " on machine " + std::to_string(placed->machine + 1) + " at t=" +
                          std::to_string(placed->start) + " was pruned");
    }
    bits[static_cast<std::size_t>(*v)] = 1;
  }
  return BinaryAssignment(std::move(bits));
}

}  // namespace cimtune::fjsp
