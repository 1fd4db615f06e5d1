#pragma once

// Ground-state search over Ising models: an exhaustive enumerator and a seeded
// Metropolis annealer standing in for a coherent Ising machine. Both return at
// most ten ranked, distinct spin vectors.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cimtune/quantize.hpp"
#include "cimtune/qubo.hpp"

namespace cimtune {

inline constexpr int kMaxTopK = 10;
inline constexpr Index kMaxExactSpins = 24;

struct SolverConfig {
  int sweeps = 5000;
  int restarts = 8;
  // Unset temperatures scale with the largest |h| or |J|: 10x down to 1e-3x.
  std::optional<double> temp_initial;
  std::optional<double> temp_final;
  std::uint64_t seed = 0;
  int top_k = kMaxTopK;
  double readout_flip_prob = 0.0;
  int emulate_latency_ms = 0;

  void validate() const;
  /// Adds a latency drawn uniformly from [61000, 121000] ms, derived from the seed.
  static SolverConfig cim_realism(SolverConfig base);
};

struct RankedSolution {
  SpinAssignment spins;
  double energy = 0.0;  // under the solved model
  // Set by solve_quantized: the same vector evaluated under the original matrix.
  std::optional<double> original_energy;
};

struct SolveMeta {
  std::string method;  // "exact" | "annealed"
  std::uint64_t seed = 0;
  int sweeps = 0;
  int restarts = 0;
  double wall_time_ms = 0.0;  // the only nondeterministic field
  bool quantized = false;
  std::optional<QuantizationReport> quantization;
  std::optional<double> quantization_scale;
  double readout_flip_prob = 0.0;
  int emulated_latency_ms = 0;
};

struct SolveResult {
  std::vector<RankedSolution> solutions;  // ascending energy, pairwise distinct
  SolveMeta meta;
};

/// Full Gray-code enumeration. Throws ResourceError above kMaxExactSpins.
SolveResult solve_exact(const IsingModel<double>& model, int top_k = kMaxTopK);
SolveResult solve_exact(const QuboMatrix<double>& q, int top_k = kMaxTopK);

/// Independent random-site Metropolis chains under geometric cooling, chain r
/// seeded with seed ^ r. Applies readout noise and latency from the config.
SolveResult solve_annealed(const IsingModel<double>& model, const SolverConfig& config);
SolveResult solve_annealed(const QuboMatrix<double>& q, const SolverConfig& config);

/// Flips each spin with probability p, recomputes energies and re-ranks.
SolveResult apply_readout_noise(const IsingModel<double>& model, SolveResult result, double p, std::uint64_t seed);

/// Quantizes to int8, anneals the integer model and reports both the
/// quantized-unit energy and the energy under q.
SolveResult solve_quantized(const QuboMatrix<double>& q, const SolverConfig& config);

/// Sort by (energy, vector), drop repeated vectors, keep top_k.
void rank_solutions(std::vector<RankedSolution>& solutions, int top_k);

}  // namespace cimtune
