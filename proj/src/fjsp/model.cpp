#include <algorithm>

#include "cimtune/fjsp.hpp"

namespace cimtune::fjsp {

VariableIndex::VariableIndex(std::vector<VarKey> keys, Index raw_count, int operation_count, const Instance& inst)
    : keys_(std::move(keys)), by_operation_(static_cast<std::size_t>(operation_count)), raw_count_(raw_count) {
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    const auto [it, inserted] = lookup_.emplace(keys_[i], static_cast<Index>(i));
    if (!inserted) throw ArgumentError("duplicate variable key in index");
    by_operation_.at(static_cast<std::size_t>(inst.flat_id(keys_[i].op))).push_back(static_cast<Index>(i));
  }
}

std::optional<Index> VariableIndex::find(const VarKey& key) const {
  const auto it = lookup_.find(key);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

std::span<const Index> VariableIndex::variables_of(int flat_op) const {
  return by_operation_.at(static_cast<std::size_t>(flat_op));
}

VariableIndex prune_variables(const Instance& inst) {
  std::vector<VarKey> keys;
  Index raw = 0;
  for (const OpRef ref : inst.operations()) {
    const Operation& op = inst.operation(ref);
    const int earliest = min_predecessor_time(inst, ref);
    const int latest_end = max_start_time(inst, ref);
    const std::size_t before = keys.size();
    for (const int machine : op.eligible_machines()) {
      raw += inst.t_max() + 1;
      for (int t = earliest; t + op.time(machine) <= latest_end; ++t) keys.push_back({machine, t, ref});
    }
    if (keys.size() == before) {
      throw InfeasibleHorizonError("infeasible horizon: operation " + label(ref) + " has no admissible start time");
    }
  }
  return VariableIndex(std::move(keys), raw, inst.operation_count(), inst);
}

namespace {

void check_index(const Instance& inst, const VariableIndex& index) {
  if (index.operation_count() != inst.operation_count()) {
    throw DimensionError("variable index covers " + std::to_string(index.operation_count()) +
                         " operations, instance has " + std::to_string(inst.operation_count()));
  }
  for (const VarKey& k : index.keys()) {
    if (!inst.operation(k.op).eligible(k.machine) || k.start < 0 || k.start > inst.t_max()) {
      throw DimensionError("variable index does not belong to this instance");
    }
  }
}

bool overlaps(int start_a, int len_a, int start_b, int len_b) {
  return start_a < start_b + len_b && start_b < start_a + len_a;
}

bool literal_conflict(int t_a, int p_a, int t_b, int p_b) {
  return (0 <= t_a - t_b && t_a - t_b <= p_a) || (0 <= t_b - t_a && t_b - t_a <= p_b);
}

void add_term(QuboBuilder<double>& b, const Instance& inst, const VariableIndex& index, Term term, H3Mode mode,
              double weight) {
  if (weight == 0.0) return;
  const std::vector<OpRef> ops = inst.operations();

  switch (term) {
    case Term::Assignment:
      for (const OpRef ref : ops) {
        std::vector<std::pair<Index, double>> row;
        for (const Index v : index.variables_of(inst.flat_id(ref))) row.emplace_back(v, 1.0);
        b.add_squared_penalty(row, -1.0, weight);
      }
      break;

    case Term::Sequence:
      for (const OpRef ref : ops) {
        if (inst.is_last(ref)) continue;
        const OpRef next{ref.job, ref.op + 1};
        for (const Index a : index.variables_of(inst.flat_id(ref))) {
          const VarKey& ka = index.key(a);
          const int end = ka.start + inst.operation(ref).time(ka.machine);
          for (const Index c : index.variables_of(inst.flat_id(next))) {
            if (index.key(c).start < end) b.add_quadratic(a, c, weight);
          }
        }
      }
      break;

    case Term::MachineConflict:
      for (const OpRef ra : ops) {
        for (const OpRef rb : ops) {
          if (ra.job == rb.job) continue;
          // Strict mode counts each unordered pair once; the literal sets are
          // summed over ordered operation pairs.
          if (mode == H3Mode::Strict && !(ra < rb)) continue;
          const Operation& oa = inst.operation(ra);
          const Operation& ob = inst.operation(rb);
          for (const Index a : index.variables_of(inst.flat_id(ra))) {
            const VarKey& ka = index.key(a);
            for (const Index c : index.variables_of(inst.flat_id(rb))) {
              const VarKey& kc = index.key(c);
              if (ka.machine != kc.machine) continue;
              const int pa = oa.time(ka.machine);
              const int pc = ob.time(kc.machine);
              const bool hit = mode == H3Mode::Strict ? overlaps(ka.start, pa, kc.start, pc)
                                                      : literal_conflict(ka.start, pa, kc.start, pc);
              if (hit) b.add_quadratic(a, c, weight);
            }
          }
        }
      }
      break;

    case Term::Makespan:
      for (const OpRef ref : ops) {
        if (!inst.is_last(ref)) continue;
        const int earliest = min_predecessor_time(inst, ref);
        for (const Index v : index.variables_of(inst.flat_id(ref))) {
          const VarKey& k = index.key(v);
          b.add_linear(v, weight * (k.start + inst.operation(ref).time(k.machine) - earliest));
        }
      }
      break;
  }
}

}  // namespace

QuboMatrix<double> build_term(const Instance& inst, const VariableIndex& index, Term term, H3Mode mode) {
  check_index(inst, index);
  QuboBuilder<double> b(index.size());
  add_term(b, inst, index, term, mode, 1.0);
  return b.build();
}

QuboMatrix<double> build_qubo(const Instance& inst, const Weights& weights, const VariableIndex& index, H3Mode mode) {
  weights.validate();
  check_index(inst, index);
  QuboBuilder<double> b(index.size());
  add_term(b, inst, index, Term::Assignment, mode, weights.alpha);
  add_term(b, inst, index, Term::Sequence, mode, weights.beta);
  add_term(b, inst, index, Term::MachineConflict, mode, weights.gamma);
  add_term(b, inst, index, Term::Makespan, mode, weights.delta);
  return b.build();
}

}  // namespace cimtune::fjsp
