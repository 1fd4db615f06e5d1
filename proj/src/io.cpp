#include "cimtune/io.hpp"

#include <fstream>
#include <sstream>

namespace cimtune::io {
namespace {

std::string at(const std::string& parent, const std::string& key) { return parent.empty() ? key : parent + "." + key; }
std::string at(const std::string& parent, std::size_t i) { return parent + "[" + std::to_string(i) + "]"; }

const Json& field(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw InputError(path.empty() ? "<root>" : path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw InputError(at(path, key), "missing field");
  return *it;
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw InputError(path, "expected a number");
  return j.get<double>();
}

int integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) throw InputError(path, "expected an integer");
  return j.get<int>();
}

const Json& array(const Json& j, const std::string& path) {
  if (!j.is_array()) throw InputError(path, "expected an array");
  return j;
}

std::string text(const Json& j, const std::string& path) {
  if (!j.is_string()) throw InputError(path, "expected a string");
  return j.get<std::string>();
}

Json spins_json(const SpinAssignment& s) {
  Json a = Json::array();
  for (auto v : s.values()) a.push_back(static_cast<int>(v));
  return a;
}

std::string bits_string(const SpinAssignment& s) {
  std::string out;
  for (auto v : s.values()) out += v > 0 ? '1' : '0';
  return out;
}

Json upper_json(const auto& model) {
  Json upper = Json::array();
  model.for_each_coupling([&](Index i, Index j, auto v) { upper.push_back(Json::array({i, j, v})); });
  return upper;
}

Vector<double> read_vector(const Json& j, Index n, const std::string& path) {
  array(j, path);
  if (static_cast<Index>(j.size()) != n) {
    throw InputError(path, "expected " + std::to_string(n) + " entries, got " + std::to_string(j.size()));
  }
  Vector<double> v(n);
  for (Index i = 0; i < n; ++i) v[i] = number(j[i], at(path, i));
  return v;
}

UpperCouplings<double> read_upper(const Json& j, Index n, const std::string& path) {
  array(j, path);
  std::vector<Eigen::Triplet<double, int>> triplets;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string p = at(path, k);
    if (!j[k].is_array() || j[k].size() != 3) throw InputError(p, "expected [i, j, value]");
    const int r = integer(j[k][0], at(p, 0)), c = integer(j[k][1], at(p, 1));
    const double v = number(j[k][2], at(p, 2));
    if (r < 0 || c < 0 || r >= n || c >= n) throw InputError(p, "index out of range");
    if (r >= c) throw InputError(p, "couplings must satisfy i < j");
    triplets.emplace_back(r, c, v);
  }
  UpperCouplings<double> u(n, n);
  u.setFromTriplets(triplets.begin(), triplets.end());
  return u;
}

Index read_size(const Json& j) {
  const int n = integer(field(j, "n", ""), "n");
  if (n < 1) throw InputError("n", "must be >= 1");
  return n;
}

std::optional<int> one_based(const Json& j, const std::string& key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  const int v = integer(*it, at(path, key));
  if (v < 1) throw InputError(at(path, key), "must be >= 1");
  return v - 1;
}

}  // namespace

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("path", "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError("path", "'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("out", "cannot write '" + path + "'");
  out << content;
}

std::string pretty(const Json& j) { return j.dump(2) + "\n"; }

Json to_json(const QuboMatrix<double>& q) {
  return Json{{"n", q.size()},
              {"diag", std::vector<double>(q.diag().begin(), q.diag().end())},
              {"upper", upper_json(q)},
              {"offset", q.offset()}};
}

QuboMatrix<double> qubo_from_json(const Json& j) {
  const Index n = read_size(j);
  const double offset = j.contains("offset") ? number(j["offset"], "offset") : 0.0;
  try {
    return QuboMatrix<double>(read_vector(field(j, "diag", ""), n, "diag"),
                              read_upper(j.value("upper", Json::array()), n, "upper"), offset);
  } catch (const ArgumentError& e) {
    throw InputError("upper", e.what());
  }
}

Json to_json(const IsingModel<double>& m) {
  return Json{{"n", m.size()},
              {"diag", std::vector<double>(m.h().begin(), m.h().end())},
              {"upper", upper_json(m)},
              {"offset", m.offset()},
              {"convention", std::string(to_string(m.convention()))}};
}

IsingModel<double> ising_from_json(const Json& j) {
  const Index n = read_size(j);
  const std::string conv = j.contains("convention") ? text(j["convention"], "convention") : "positive_sum";
  IsingConvention c;
  if (conv == "positive_sum") {
    c = IsingConvention::PositiveSum;
  } else if (conv == "negated_sum") {
    c = IsingConvention::NegatedSum;
  } else {
    throw InputError("convention", "expected positive_sum or negated_sum");
  }
  const double offset = j.contains("offset") ? number(j["offset"], "offset") : 0.0;
  return IsingModel<double>(read_vector(field(j, "diag", ""), n, "diag"),
                            read_upper(j.value("upper", Json::array()), n, "upper"), offset, c);
}

Json to_json(const QuantizationReport& r) {
  return Json{{"nonzero_count", r.nonzero_count},
              {"zeroed_count", r.zeroed_count},
              {"zeroed_fraction", r.zeroed_fraction},
              {"dynamic_range_orders", r.dynamic_range_orders},
              {"max_abs_original", r.max_abs_original}};
}

Json to_json(const QuantizedQubo& q) {
  return Json{{"n", q.integers.size()},
              {"diag", std::vector<int>(q.integers.diag().begin(), q.integers.diag().end())},
              {"upper", upper_json(q.integers)},
              {"offset", q.offset},
              {"scale", q.scale},
              {"report", to_json(q.report)}};
}

Json to_json(const CoefficientStats& s) {
  return Json{{"count", s.count},
              {"max_abs", s.max_abs},
              {"min_nonzero_abs", s.min_nonzero_abs},
              {"dynamic_range_orders", s.dynamic_range_orders},
              {"near_zero_threshold", s.near_zero_threshold},
              {"near_zero_fraction", s.near_zero_fraction}};
}

Json to_json(const SolveMeta& m, bool include_timing) {
  Json j{{"method", m.method},         {"seed", m.seed},
         {"sweeps", m.sweeps},         {"restarts", m.restarts},
         {"quantized", m.quantized},   {"readout_flip_prob", m.readout_flip_prob},
         {"emulated_latency_ms", m.emulated_latency_ms}};
  if (m.quantization) j["quantization"] = to_json(*m.quantization);
  if (m.quantization_scale) j["quantization_scale"] = *m.quantization_scale;
  if (include_timing) j["wall_time_ms"] = m.wall_time_ms;
  return j;
}

Json to_json(const SolveResult& r, bool include_timing) {
  Json sols = Json::array();
  for (const auto& s : r.solutions) {
    Json e{{"energy", s.energy}, {"spins", spins_json(s.spins)}, {"bits", bits_string(s.spins)}};
    if (s.original_energy) e["original_energy"] = *s.original_energy;
    sols.push_back(std::move(e));
  }
  return Json{{"solutions", std::move(sols)}, {"meta", to_json(r.meta, include_timing)}};
}

Json to_json(const fjsp::Instance& inst) {
  Json jobs = Json::array();
  for (const auto& job : inst.jobs()) {
    Json ops = Json::array();
    for (const auto& op : job.operations) {
      Json times = Json::array();
      for (const auto& t : op.times()) times.push_back(t ? Json(*t) : Json(nullptr));
      ops.push_back(Json{{"times", std::move(times)}});
    }
    jobs.push_back(Json{{"operations", std::move(ops)}});
  }
  return Json{{"machines", inst.machines()}, {"t_max", inst.t_max()}, {"jobs", std::move(jobs)}};
}

fjsp::Instance instance_from_json(const Json& j) {
  const int machines = integer(field(j, "machines", ""), "machines");
  if (machines < 1) throw InputError("machines", "must be >= 1");
  const int t_max = integer(field(j, "t_max", ""), "t_max");
  if (t_max < 0) throw InputError("t_max", "must be >= 0");
  const Json& jobs_j = array(field(j, "jobs", ""), "jobs");
  if (jobs_j.empty()) throw InputError("jobs", "needs at least one job");

  std::vector<fjsp::Job> jobs;
  for (std::size_t jj = 0; jj < jobs_j.size(); ++jj) {
    const std::string jp = at("jobs", jj);
    const Json& ops_j = array(field(jobs_j[jj], "operations", jp), at(jp, "operations"));
    if (ops_j.empty()) throw InputError(at(jp, "operations"), "needs at least one operation");
    fjsp::Job job;
    for (std::size_t h = 0; h < ops_j.size(); ++h) {
      const std::string op_path = at(at(jp, "operations"), h);
      const std::string tp = at(op_path, "times");
      const Json& times_j = array(field(ops_j[h], "times", op_path), tp);
      if (static_cast<int>(times_j.size()) != machines) {
        throw InputError(tp, "expected " + std::to_string(machines) + " entries, got " +
                                 std::to_string(times_j.size()));
      }
      std::vector<std::optional<int>> times;
      for (std::size_t i = 0; i < times_j.size(); ++i) {
        if (times_j[i].is_null()) {
          times.emplace_back();
          continue;
        }
        const int t = integer(times_j[i], at(tp, i));
        if (t < 1) throw InputError(at(tp, i), "processing time must be >= 1");
        times.emplace_back(t);
      }
      try {
        job.operations.emplace_back(std::move(times));
      } catch (const ArgumentError& e) {
        throw InputError(tp, e.what());
      }
    }
    jobs.push_back(std::move(job));
  }
  return fjsp::Instance(machines, std::move(jobs), t_max);
}

Json to_json(const fjsp::Weights& w) {
  return Json{{"alpha", w.alpha}, {"beta", w.beta}, {"gamma", w.gamma}, {"delta", w.delta}};
}

fjsp::Weights fjsp_weights_from_json(const Json& j, const fjsp::Weights& base) {
  if (!j.is_object()) throw InputError("weights", "expected an object");
  fjsp::Weights w = base;
  for (const auto& [key, value] : j.items()) {
    const double v = number(value, at("weights", key));
    if (key == "alpha") {
      w.alpha = v;
    } else if (key == "beta") {
      w.beta = v;
    } else if (key == "gamma") {
      w.gamma = v;
    } else if (key == "delta") {
      w.delta = v;
    } else {
      throw InputError(at("weights", key), "unknown weight name");
    }
  }
  return w;
}

Json to_json(const fjsp::Schedule& s) {
  Json ops = Json::array();
  for (std::size_t j = 0; j < s.ops.size(); ++j) {
    for (std::size_t h = 0; h < s.ops[j].size(); ++h) {
      const fjsp::OpRef ref{static_cast<int>(j), static_cast<int>(h)};
      Json e{{"op", fjsp::label(ref)}, {"job", j + 1}, {"index", h + 1}};
      if (const auto& p = s.ops[j][h]) {
        e["machine"] = p->machine + 1;
        e["start"] = p->start;
        e["end"] = p->end;
      } else {
        e["machine"] = nullptr;
      }
      ops.push_back(std::move(e));
    }
  }
  return Json{{"operations", std::move(ops)}};
}

fjsp::Schedule schedule_from_json(const Json& j, const fjsp::Instance& inst) {
  fjsp::Schedule s = fjsp::Schedule::empty_for(inst);
  const Json& ops = array(field(j, "operations", ""), "operations");
  for (std::size_t k = 0; k < ops.size(); ++k) {
    const std::string p = at("operations", k);
    const auto job = one_based(ops[k], "job", p);
    const auto index = one_based(ops[k], "index", p);
    if (!job || !index) throw InputError(p, "needs job and index");
    if (*job >= inst.job_count() || *index >= static_cast<int>(inst.jobs()[*job].operations.size())) {
      throw InputError(p, "no such operation");
    }
    const auto machine = one_based(ops[k], "machine", p);
    if (!machine) continue;
    const int start = integer(field(ops[k], "start", p), at(p, "start"));
    const fjsp::OpRef ref{*job, *index};
    const int end = ops[k].contains("end") ? integer(ops[k]["end"], at(p, "end"))
                                           : start + inst.operation(ref).time(*machine);
    s.at(ref) = fjsp::ScheduledOp{*machine, start, end};
  }
  return s;
}

Json to_json(const fjsp::Diagnostics& d) {
  Json assign = Json::array(), seq = Json::array(), conf = Json::array();
  for (const auto& r : d.assignment_violations) assign.push_back(fjsp::label(r));
  for (const auto& v : d.sequence_violations) {
    seq.push_back(Json{{"predecessor", fjsp::label(v.predecessor)}, {"successor", fjsp::label(v.successor)}});
  }
  for (const auto& c : d.machine_conflicts) {
    conf.push_back(Json{{"machine", c.machine + 1},
                        {"first", fjsp::label(c.first)},
                        {"second", fjsp::label(c.second)},
                        {"overlap", Json::array({c.overlap_begin, c.overlap_end})}});
  }
  return Json{{"assignment_violations", std::move(assign)},
              {"sequence_violations", std::move(seq)},
              {"machine_conflicts", std::move(conf)},
              {"makespan", d.makespan ? Json(*d.makespan) : Json(nullptr)},
              {"feasible", d.feasible()}};
}

Json to_json(const peptide::Problem& p) {
  return Json{{"target_mass", p.target_mass_raw},
              {"calibrated_mass", p.calibrated_mass},
              {"positions", p.positions},
              {"positions_defaulted", p.positions_defaulted},
              {"mass_table", std::string(peptide::to_string(p.table))},
              {"calibration", std::string(peptide::to_string(p.calibration))},
              {"half_water", p.half_water}};
}

peptide::Problem problem_from_json(const Json& j) {
  peptide::ProblemOptions o;
  o.target_mass = number(field(j, "target_mass", ""), "target_mass");
  if (!(o.target_mass > 0.0)) throw InputError("target_mass", "must be positive");
  if (j.contains("positions") && !j["positions"].is_null()) {
    o.positions = integer(j["positions"], "positions");
    if (*o.positions < 1) throw InputError("positions", "must be >= 1");
  }
  try {
    if (j.contains("mass_table")) o.table = peptide::parse_mass_table(text(j["mass_table"], "mass_table"));
  } catch (const ArgumentError& e) {
    throw InputError("mass_table", e.what());
  }
  try {
    if (j.contains("calibration")) o.calibration = peptide::parse_calibration(text(j["calibration"], "calibration"));
  } catch (const ArgumentError& e) {
    throw InputError("calibration", e.what());
  }
  if (j.contains("half_water")) {
    if (!j["half_water"].is_boolean()) throw InputError("half_water", "expected a boolean");
    o.half_water = j["half_water"].get<bool>();
  }
  try {
    return peptide::make_problem(o);
  } catch (const ArgumentError& e) {
    throw InputError("target_mass", e.what());
  }
}

Json to_json(const peptide::Weights& w) { return Json{{"pos", w.lambda_pos}, {"mass", w.lambda_mass}}; }

Json to_json(const peptide::CompositionSolution& s, const peptide::Problem& p) {
  Json positions = Json::array();
  for (const auto& picks : s.selected) {
    std::string codes;
    for (int a : picks) codes += p.codes[static_cast<std::size_t>(a)];
    positions.push_back(codes);
  }
  auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  return Json{{"positions", std::move(positions)},
              {"composition", peptide::composition_string(p, s)},
              {"onehot_violations", s.onehot_violations},
              {"total_mass", opt(s.total_mass)},
              {"deviation_da", opt(s.deviation_da)},
              {"relative_deviation", opt(s.relative_deviation)}};
}

Json to_json(const peptide::PopulationMetrics& m) {
  auto opt = [](const auto& v) { return v ? Json(*v) : Json(nullptr); };
  return Json{{"size", m.size},
              {"violation_rate", m.violation_rate},
              {"best_deviation_da", opt(m.best_deviation_da)},
              {"best_relative", opt(m.best_relative)},
              {"best_index", opt(m.best_index)}};
}

}  // namespace cimtune::io
