#pragma once

// Peptide composition inference: choose one residue per position so the
// residue masses sum to a calibrated target mass.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cimtune/qubo.hpp"

namespace cimtune::peptide {

enum class MassTable { Average, Monoisotopic };
enum class Calibration { None, SubtractWater };

std::string_view to_string(MassTable t);
std::string_view to_string(Calibration c);
MassTable parse_mass_table(std::string_view s);
Calibration parse_calibration(std::string_view s);

struct AminoAcid {
  char code;
  double average;       // residue mass, Da
  double monoisotopic;  // residue mass, Da

  double mass(MassTable t) const noexcept { return t == MassTable::Average ? average : monoisotopic; }
};

inline constexpr int kAcidCount = 20;

/// The twenty standard residues, ordered by one-letter code.
const std::array<AminoAcid, kAcidCount>& amino_acids();
const AminoAcid& amino_acid(char code);
double water_mass(MassTable t);

/// Sum of residue masses; throws ArgumentError on an unknown code.
double residue_sum(std::string_view sequence, MassTable t);

/// Throws ArgumentError if subtracting water leaves a non-positive mass.
double calibrate_mass(double raw, Calibration mode, MassTable t = MassTable::Average);

/// round(calibrated / 110), at least 1.
int default_positions(double calibrated_mass);

struct Problem {
  double target_mass_raw = 0.0;
  double calibrated_mass = 0.0;
  int positions = 1;
  bool positions_defaulted = false;
  MassTable table = MassTable::Average;
  Calibration calibration = Calibration::None;
  bool half_water = false;  // subtract half a water mass from every residue
  std::string codes;        // one letter per acid column
  Vector<double> masses;    // mass in use per acid column

  int acid_count() const noexcept { return static_cast<int>(codes.size()); }
  Index onehot_size() const noexcept { return static_cast<Index>(positions) * acid_count(); }
  Index variable(int position, int acid) const noexcept {
    return static_cast<Index>(position) * acid_count() + acid;
  }
};

struct ProblemOptions {
  double target_mass = 0.0;
  std::optional<int> positions;
  MassTable table = MassTable::Average;
  Calibration calibration = Calibration::None;
  bool half_water = false;
};

/// Problem over the full twenty-residue table.
Problem make_problem(const ProblemOptions& opts);
/// Problem over an arbitrary residue list with an already calibrated target.
Problem custom_problem(std::string codes, Vector<double> masses, double calibrated_mass, int positions);

struct Weights {
  double lambda_pos = 1.0;
  double lambda_mass = 1.0;
  void validate() const;
};

/// lambda_pos * sum_s (1 - sum_a x_sa)^2 + lambda_mass * (sum m_a x_sa - M)^2,
/// plus an optional per-acid diagonal bias applied at every position.
QuboMatrix<double> build_onehot_qubo(const Problem& p, const Weights& w, std::span<const double> acid_bias = {});

struct CountEncodingConfig {
  int bits_per_acid = 5;
  double A = 1.0;                // mass term weight
  double E = 1.0;                // length term weight
  std::optional<double> l_mid;   // defaults to the problem's position count
  void validate() const;
};

/// A (sum m_a N_a - M)^2 + E (sum N_a - L_mid)^2, N_a = sum_k 2^k x_ak.
QuboMatrix<double> build_count_qubo(const Problem& p, const CountEncodingConfig& cfg);

struct CompositionSolution {
  std::vector<std::vector<int>> selected;  // per position, chosen acid columns
  std::vector<int> onehot_violations;      // positions with 0 or >= 2 picks
  std::optional<double> total_mass;        // absent unless every position has one pick
  std::optional<double> deviation_da;
  std::optional<double> relative_deviation;

  bool violation_free() const noexcept { return onehot_violations.empty(); }
};

CompositionSolution decode_onehot(const Problem& p, const BinaryAssignment& bits);
/// Counts per acid, e.g. "K6 P3 A1 E1 S1 T1"; highest count first.
std::string composition_string(const Problem& p, const CompositionSolution& s);

struct CountSolution {
  std::vector<int> counts;  // per acid column
  int length = 0;
  double total_mass = 0.0;
  double deviation_da = 0.0;
};

CountSolution decode_count(const Problem& p, const CountEncodingConfig& cfg, const BinaryAssignment& bits);

struct PopulationMetrics {
  int size = 0;
  double violation_rate = 0.0;
  std::optional<double> best_deviation_da;  // over violation-free solutions
  std::optional<double> best_relative;
  std::optional<int> best_index;
};

/// Throws ArgumentError on an empty population.
PopulationMetrics evaluate_population(std::span<const CompositionSolution> solutions);

}  // namespace cimtune::peptide
