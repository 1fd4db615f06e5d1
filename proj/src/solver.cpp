#include "cimtune/solver.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <queue>
#include <random>
#include <thread>
#include <tuple>

namespace cimtune {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

// Symmetric adjacency of a PositiveSum model.
struct Adjacency {
  std::vector<int> start;
  std::vector<int> neighbor;
  std::vector<double> weight;

  explicit Adjacency(const IsingModel<double>& m) {
    const Index n = m.size();
    std::vector<int> degree(static_cast<std::size_t>(n), 0);
    m.for_each_coupling([&](Index i, Index j, double) {
      ++degree[static_cast<std::size_t>(i)];
      ++degree[static_cast<std::size_t>(j)];
    });
    start.assign(static_cast<std::size_t>(n) + 1, 0);
    for (Index i = 0; i < n; ++i) start[i + 1] = start[i] + degree[i];
    neighbor.resize(static_cast<std::size_t>(start.back()));
    weight.resize(neighbor.size());
    std::vector<int> fill(start.begin(), start.end() - 1);
    m.for_each_coupling([&](Index i, Index j, double v) {
      neighbor[fill[i]] = static_cast<int>(j);
      weight[fill[i]++] = v;
      neighbor[fill[j]] = static_cast<int>(i);
      weight[fill[j]++] = v;
    });
  }
};

double max_abs_coefficient(const IsingModel<double>& m) {
  double mx = m.h().size() ? m.h().cwiseAbs().maxCoeff() : 0.0;
  m.for_each_coupling([&](Index, Index, double v) { mx = std::max(mx, std::abs(v)); });
  return mx;
}

// Keeps the best distinct states seen by one chain.
class ElitePool {
 public:
  explicit ElitePool(int capacity) : capacity_(static_cast<std::size_t>(capacity)) {}

  void offer(double energy, const std::vector<std::int8_t>& state) {
    if (entries_.size() == capacity_ && energy >= entries_.back().first) return;
    for (const auto& e : entries_) {
      if (e.second == state) return;
    }
    auto pos = std::upper_bound(entries_.begin(), entries_.end(), energy,
                                [](double v, const auto& e) { return v < e.first; });
    entries_.insert(pos, {energy, state});
    if (entries_.size() > capacity_) entries_.pop_back();
  }

  const std::vector<std::pair<double, std::vector<std::int8_t>>>& entries() const { return entries_; }

 private:
  std::size_t capacity_;
  std::vector<std::pair<double, std::vector<std::int8_t>>> entries_;
};

void run_chain(const IsingModel<double>& m, const Adjacency& adj, const SolverConfig& cfg, double t0, double t1,
               std::uint64_t seed, ElitePool& pool) {
  const int n = static_cast<int>(m.size());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> site(0, n - 1);

  std::vector<std::int8_t> s(static_cast<std::size_t>(n));
  for (auto& v : s) v = (rng() & 1U) ? 1 : -1;

  std::vector<double> field(static_cast<std::size_t>(n));
  double energy = m.offset();
  for (int i = 0; i < n; ++i) {
    double f = m.h()[i];
    for (int k = adj.start[i]; k < adj.start[i + 1]; ++k) f += adj.weight[k] * s[adj.neighbor[k]];
    field[i] = f;
    energy += s[i] * (m.h()[i] + f) / 2.0;
  }

  auto flip = [&](int i, double delta) {
    s[i] = static_cast<std::int8_t>(-s[i]);
    const double twice = 2.0 * s[i];
    for (int k = adj.start[i]; k < adj.start[i + 1]; ++k) field[adj.neighbor[k]] += twice * adj.weight[k];
    energy += delta;
  };

  const double ratio = cfg.sweeps > 1 ? std::pow(t1 / t0, 1.0 / (cfg.sweeps - 1)) : 1.0;
  double temperature = cfg.sweeps > 1 ? t0 : t1;
  for (int sweep = 0; sweep < cfg.sweeps; ++sweep) {
    const double beta = 1.0 / temperature;
    for (int step = 0; step < n; ++step) {
      const int i = site(rng);
      const double delta = -2.0 * s[i] * field[i];
      if (delta <= 0.0 || unit(rng) < std::exp(-delta * beta)) flip(i, delta);
    }
    pool.offer(energy, s);
    temperature *= ratio;
  }

  // Zero-temperature quench into the nearest local minimum.
  for (bool improved = true; improved;) {
    improved = false;
    for (int i = 0; i < n; ++i) {
      const double delta = -2.0 * s[i] * field[i];
      if (delta < 0.0) {
        flip(i, delta);
        improved = true;
      }
    }
  }
  pool.offer(energy, s);
}

SolveResult finish(const IsingModel<double>& model, std::vector<RankedSolution> solutions, int top_k) {
  for (auto& sol : solutions) sol.energy = ising_energy(model, sol.spins);
  rank_solutions(solutions, top_k);
  SolveResult r;
  r.solutions = std::move(solutions);
  return r;
}

void check_top_k(int top_k) {
  if (top_k < 1 || top_k > kMaxTopK) throw ArgumentError("top_k must be in [1, 10], got " + std::to_string(top_k));
}

}  // namespace

void SolverConfig::validate() const {
  if (sweeps < 1) throw ArgumentError("sweeps must be >= 1");
  if (restarts < 1) throw ArgumentError("restarts must be >= 1");
  check_top_k(top_k);
  if (temp_final && !(*temp_final > 0.0)) throw ArgumentError("temp_final must be > 0");
  if (temp_initial && !(*temp_initial > 0.0)) throw ArgumentError("temp_initial must be > 0");
  if (temp_initial && temp_final && *temp_initial < *temp_final) {
    throw ArgumentError("temp_initial must be >= temp_final");
  }
  if (!(readout_flip_prob >= 0.0 && readout_flip_prob < 1.0)) {
    throw ArgumentError("readout_flip_prob must be in [0, 1)");
  }
  if (emulate_latency_ms < 0) throw ArgumentError("emulate_latency_ms must be >= 0");
}

SolverConfig SolverConfig::cim_realism(SolverConfig base) {
  std::mt19937_64 rng(base.seed);
  base.emulate_latency_ms = std::uniform_int_distribution<int>(61000, 121000)(rng);
  return base;
}

void rank_solutions(std::vector<RankedSolution>& solutions, int top_k) {
  std::sort(solutions.begin(), solutions.end(), [](const RankedSolution& a, const RankedSolution& b) {
    return std::tie(a.energy, a.spins) < std::tie(b.energy, b.spins);
  });
  std::vector<RankedSolution> kept;
  for (auto& sol : solutions) {
    if (static_cast<int>(kept.size()) == top_k) break;
    const bool seen = std::any_of(kept.begin(), kept.end(), [&](const auto& k) { return k.spins == sol.spins; });
    if (!seen) kept.push_back(std::move(sol));
  }
  solutions = std::move(kept);
}

SolveResult solve_exact(const IsingModel<double>& model, int top_k) {
  check_top_k(top_k);
  const Index n = model.size();
  if (n > kMaxExactSpins) {
    throw ResourceError("exact enumeration is limited to " + std::to_string(kMaxExactSpins) + " spins, model has " +
                        std::to_string(n));
  }
  const auto started = Clock::now();
  const IsingModel<double> m = with_convention(model, IsingConvention::PositiveSum);
  const Adjacency adj(m);
  const int nn = static_cast<int>(n);

  // Start from all spins down; Gray code step k flips the lowest set bit of k.
  std::vector<std::int8_t> s(static_cast<std::size_t>(n), -1);
  std::vector<double> field(static_cast<std::size_t>(n));
  double energy = m.offset();
  for (int i = 0; i < nn; ++i) {
    double f = m.h()[i];
    for (int k = adj.start[i]; k < adj.start[i + 1]; ++k) f -= adj.weight[k];
    field[i] = f;
    energy -= (m.h()[i] + f) / 2.0;
  }

  // Spin 0 is the most significant position so that key order is vector order.
  std::uint32_t key = 0;
  const std::uint32_t top = 1U << (nn - 1);
  // Keep a little slack past top_k so floating drift cannot evict a true member.
  const std::size_t cap = static_cast<std::size_t>(top_k) * 2 + 8;
  using Entry = std::pair<double, std::uint32_t>;
  std::priority_queue<Entry> worst_first;
  auto offer = [&] {
    if (worst_first.size() < cap) {
      worst_first.emplace(energy, key);
    } else if (Entry(energy, key) < worst_first.top()) {
      worst_first.pop();
      worst_first.emplace(energy, key);
    }
  };

  offer();
  const std::uint64_t total = std::uint64_t{1} << nn;
  for (std::uint64_t step = 1; step < total; ++step) {
    const int i = std::countr_zero(step);
    const double delta = -2.0 * s[i] * field[i];
    s[i] = static_cast<std::int8_t>(-s[i]);
    const double twice = 2.0 * s[i];
    for (int k = adj.start[i]; k < adj.start[i + 1]; ++k) field[adj.neighbor[k]] += twice * adj.weight[k];
    energy += delta;
    key ^= top >> i;
    offer();
  }

  std::vector<RankedSolution> solutions;
  while (!worst_first.empty()) {
    const std::uint32_t code = worst_first.top().second;
    worst_first.pop();
    std::vector<std::int8_t> spins(static_cast<std::size_t>(n));
    for (int i = 0; i < nn; ++i) spins[i] = (code & (top >> i)) ? 1 : -1;
    solutions.push_back({SpinAssignment(std::move(spins)), 0.0, std::nullopt});
  }
  SolveResult r = finish(model, std::move(solutions), top_k);
  r.meta.method = "exact";
  r.meta.wall_time_ms = elapsed_ms(started);
  return r;
}

SolveResult solve_exact(const QuboMatrix<double>& q, int top_k) { return solve_exact(qubo_to_ising(q), top_k); }

SolveResult solve_annealed(const IsingModel<double>& model, const SolverConfig& config) {
  config.validate();
  const auto started = Clock::now();
  const IsingModel<double> m = with_convention(model, IsingConvention::PositiveSum);
  const Adjacency adj(m);

  double scale = max_abs_coefficient(m);
  if (scale == 0.0) scale = 1.0;
  const double t0 = config.temp_initial.value_or(10.0 * scale);
  const double t1 = config.temp_final.value_or(1e-3 * scale);
  if (t0 < t1) throw ArgumentError("initial temperature is below the final temperature");

  // Chains are independent; running them in order keeps the merge trivial.
  std::vector<RankedSolution> pooled;
  for (int r = 0; r < config.restarts; ++r) {
    ElitePool pool(config.top_k);
    run_chain(m, adj, config, t0, t1, config.seed ^ static_cast<std::uint64_t>(r), pool);
    for (const auto& [e, state] : pool.entries()) pooled.push_back({SpinAssignment(state), e, std::nullopt});
  }

  SolveResult result = finish(model, std::move(pooled), config.top_k);
  if (config.readout_flip_prob > 0.0) {
    result = apply_readout_noise(model, std::move(result), config.readout_flip_prob,
                                 config.seed ^ 0x9e3779b97f4a7c15ULL);
  }
  if (config.emulate_latency_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(config.emulate_latency_ms));

  result.meta.method = "annealed";
  result.meta.seed = config.seed;
  result.meta.sweeps = config.sweeps;
  result.meta.restarts = config.restarts;
  result.meta.readout_flip_prob = config.readout_flip_prob;
  result.meta.emulated_latency_ms = config.emulate_latency_ms;
  result.meta.wall_time_ms = elapsed_ms(started);
  return result;
}

SolveResult solve_annealed(const QuboMatrix<double>& q, const SolverConfig& config) {
  return solve_annealed(qubo_to_ising(q), config);
}

SolveResult apply_readout_noise(const IsingModel<double>& model, SolveResult result, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p < 1.0)) throw ArgumentError("flip probability must be in [0, 1)");
  if (p == 0.0) return result;
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution flip(p);
  const int top_k = std::max<int>(1, static_cast<int>(result.solutions.size()));
  for (auto& sol : result.solutions) {
    std::vector<std::int8_t> spins = sol.spins.values();
    for (auto& v : spins) {
      if (flip(rng)) v = static_cast<std::int8_t>(-v);
    }
    sol.spins = SpinAssignment(std::move(spins));
    sol.energy = ising_energy(model, sol.spins);
  }
  rank_solutions(result.solutions, top_k);
  return result;
}

SolveResult solve_quantized(const QuboMatrix<double>& q, const SolverConfig& config) {
  const QuantizedQubo qq = quantize_int8(q);
  SolveResult result = solve_annealed(qubo_to_ising(qq.integers.cast<double>()), config);
  for (auto& sol : result.solutions) sol.original_energy = qubo_energy(q, to_bits(sol.spins));
  result.meta.quantized = true;
  result.meta.quantization = qq.report;
  result.meta.quantization_scale = qq.scale;
  return result;
}

}  // namespace cimtune
