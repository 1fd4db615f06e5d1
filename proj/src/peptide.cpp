#include "cimtune/peptide.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace cimtune::peptide {
namespace {

constexpr std::array<AminoAcid, kAcidCount> kTable{{
    {'A', 71.0788, 71.03711},   {'C', 103.1388, 103.00919}, {'D', 115.0886, 115.02694},
    {'E', 129.1155, 129.04259}, {'F', 147.1766, 147.06841}, {'G', 57.0519, 57.02146},
    {'H', 137.1411, 137.05891}, {'I', 113.1594, 113.08406}, {'K', 128.1741, 128.09496},
    {'L', 113.1594, 113.08406}, {'M', 131.1926, 131.04049}, {'N', 114.1038, 114.04293},
    {'P', 97.1167, 97.05276},   {'Q', 128.1307, 128.05858}, {'R', 156.1875, 156.10111},
    {'S', 87.0782, 87.03203},   {'T', 101.1051, 101.04768}, {'V', 99.1326, 99.06841},
    {'W', 186.2132, 186.07931}, {'Y', 163.1760, 163.06333},
}};

constexpr double kWaterAverage = 18.0153;
constexpr double kWaterMonoisotopic = 18.0106;

}  // namespace

std::string_view to_string(MassTable t) { return t == MassTable::Average ? "average" : "monoisotopic"; }

std::string_view to_string(Calibration c) { return c == Calibration::None ? "none" : "subtract_water"; }

MassTable parse_mass_table(std::string_view s) {
  if (s == "average") return MassTable::Average;
  if (s == "monoisotopic") return MassTable::Monoisotopic;
  throw ArgumentError("unknown mass table '" + std::string(s) + "'");
}

Calibration parse_calibration(std::string_view s) {
  if (s == "none") return Calibration::None;
  if (s == "subtract_water") return Calibration::SubtractWater;
  throw ArgumentError("unknown calibration '" + std::string(s) + "'");
}

const std::array<AminoAcid, kAcidCount>& amino_acids() { return kTable; }

const AminoAcid& amino_acid(char code) {
  for (const auto& a : kTable) {
    if (a.code == code) return a;
  }
  throw ArgumentError(std::string("unknown amino acid code '") + code + "'");
}

double water_mass(MassTable t) { return t == MassTable::Average ? kWaterAverage : kWaterMonoisotopic; }

double residue_sum(std::string_view sequence, MassTable t) {
  double total = 0.0;
  for (char c : sequence) total += amino_acid(c).mass(t);
  return total;
}

double calibrate_mass(double raw, Calibration mode, MassTable t) {
  if (!std::isfinite(raw) || raw <= 0.0) throw ArgumentError("target mass must be positive");
  if (mode == Calibration::None) return raw;
  const double water = water_mass(t);
  if (raw <= water) throw ArgumentError("target mass does not exceed the water mass " + std::to_string(water));
  return raw - water;
}

int default_positions(double calibrated_mass) {
  return std::max(1, static_cast<int>(std::lround(calibrated_mass / 110.0)));
}

Problem make_problem(const ProblemOptions& opts) {
  Problem p;
  p.target_mass_raw = opts.target_mass;
  p.table = opts.table;
  p.calibration = opts.calibration;
  p.calibrated_mass = calibrate_mass(opts.target_mass, opts.calibration, opts.table);
  p.positions_defaulted = !opts.positions.has_value();
  p.positions = opts.positions.value_or(default_positions(p.calibrated_mass));
  if (p.positions < 1) throw ArgumentError("positions must be >= 1");
  p.half_water = opts.half_water;
  p.masses.resize(kAcidCount);
  for (int a = 0; a < kAcidCount; ++a) {
    p.codes.push_back(kTable[a].code);
    p.masses[a] = kTable[a].mass(opts.table) - (opts.half_water ? water_mass(opts.table) / 2.0 : 0.0);
  }
  return p;
}

Problem custom_problem(std::string codes, Vector<double> masses, double calibrated_mass, int positions) {
  if (codes.empty() || static_cast<Index>(codes.size()) != masses.size()) {
    throw DimensionError("need one mass per acid code");
  }
  if (positions < 1) throw ArgumentError("positions must be >= 1");
  if (!(calibrated_mass > 0.0)) throw ArgumentError("calibrated mass must be positive");
  if (!(masses.array() > 0.0).all()) throw ArgumentError("residue masses must be positive");
  Problem p;
  p.target_mass_raw = calibrated_mass;
  p.calibrated_mass = calibrated_mass;
  p.positions = positions;
  p.codes = std::move(codes);
  p.masses = std::move(masses);
  return p;
}

void Weights::validate() const {
  if (!(std::isfinite(lambda_pos) && lambda_pos >= 0.0) || !(std::isfinite(lambda_mass) && lambda_mass >= 0.0)) {
    throw ArgumentError("peptide weights must be finite and non-negative");
  }
}

QuboMatrix<double> build_onehot_qubo(const Problem& p, const Weights& w, std::span<const double> acid_bias) {
  w.validate();
  const int A = p.acid_count();
  if (!acid_bias.empty() && static_cast<int>(acid_bias.size()) != A) {
    throw DimensionError("acid bias needs one entry per acid");
  }
  const Index n = p.onehot_size();
  const double M = p.calibrated_mass;
  QuboBuilder<double> b(n);

  for (int s = 0; s < p.positions; ++s) {
    for (int a = 0; a < A; ++a) {
      const double m = p.masses[a];
      double d = -w.lambda_pos + w.lambda_mass * (m * m - 2.0 * M * m);
      if (!acid_bias.empty()) d += acid_bias[static_cast<std::size_t>(a)];
      b.add_linear(p.variable(s, a), d);
    }
  }
  for (Index u = 0; u < n; ++u) {
    const int su = static_cast<int>(u / A), au = static_cast<int>(u % A);
    for (Index v = u + 1; v < n; ++v) {
      const int sv = static_cast<int>(v / A), av = static_cast<int>(v % A);
      double c = 2.0 * w.lambda_mass * p.masses[au] * p.masses[av];
      if (su == sv) c += 2.0 * w.lambda_pos;
      b.add_quadratic(u, v, c);
    }
  }
  b.add_offset(w.lambda_pos * p.positions + w.lambda_mass * M * M);
  return b.build();
}

void CountEncodingConfig::validate() const {
  if (bits_per_acid < 1 || bits_per_acid > 8) throw ArgumentError("bits_per_acid must be in [1, 8]");
  if (!(std::isfinite(A) && A >= 0.0) || !(std::isfinite(E) && E >= 0.0)) {
    throw ArgumentError("count-encoding weights must be finite and non-negative");
  }
}

QuboMatrix<double> build_count_qubo(const Problem& p, const CountEncodingConfig& cfg) {
  cfg.validate();
  const int A = p.acid_count();
  const int K = cfg.bits_per_acid;
  const Index n = static_cast<Index>(A) * K;
  Vector<double> mass_row(n), length_row(n);
  for (int a = 0; a < A; ++a) {
    for (int k = 0; k < K; ++k) {
      const double place = std::ldexp(1.0, k);
      mass_row[a * K + k] = p.masses[a] * place;
      length_row[a * K + k] = place;
    }
  }
  QuboMatrix<double> q(n);
  if (cfg.A > 0.0) q = add_squared_penalty(q, mass_row, -p.calibrated_mass, cfg.A);
  if (cfg.E > 0.0) q = add_squared_penalty(q, length_row, -cfg.l_mid.value_or(p.positions), cfg.E);
  return q;
}

CompositionSolution decode_onehot(const Problem& p, const BinaryAssignment& bits) {
  if (bits.size() != p.onehot_size()) {
    throw DimensionError("expected " + std::to_string(p.onehot_size()) + " bits, got " + std::to_string(bits.size()));
  }
  CompositionSolution sol;
  sol.selected.resize(static_cast<std::size_t>(p.positions));
  double total = 0.0;
  for (int s = 0; s < p.positions; ++s) {
    for (int a = 0; a < p.acid_count(); ++a) {
      if (bits[p.variable(s, a)]) sol.selected[s].push_back(a);
    }
    if (sol.selected[s].size() == 1) {
      total += p.masses[sol.selected[s][0]];
    } else {
      sol.onehot_violations.push_back(s);
    }
  }
  if (sol.violation_free()) {
    sol.total_mass = total;
    sol.deviation_da = std::abs(total - p.calibrated_mass);
    sol.relative_deviation = *sol.deviation_da / p.calibrated_mass;
  }
  return sol;
}

std::string composition_string(const Problem& p, const CompositionSolution& s) {
  std::map<int, int> counts;
  for (const auto& picks : s.selected) {
    for (int a : picks) ++counts[a];
  }
  std::vector<std::pair<int, int>> order(counts.begin(), counts.end());
  std::stable_sort(order.begin(), order.end(), [](const auto& x, const auto& y) { return x.second > y.second; });
  std::string out;
  for (const auto& [a, c] : order) {
    if (!out.empty()) out += ' ';
    out += p.codes[static_cast<std::size_t>(a)] + std::to_string(c);
  }
  return out;
}

CountSolution decode_count(const Problem& p, const CountEncodingConfig& cfg, const BinaryAssignment& bits) {
  const int K = cfg.bits_per_acid;
  if (bits.size() != static_cast<Index>(p.acid_count()) * K) throw DimensionError("count encoding size mismatch");
  CountSolution sol;
  sol.counts.assign(static_cast<std::size_t>(p.acid_count()), 0);
  for (int a = 0; a < p.acid_count(); ++a) {
    for (int k = 0; k < K; ++k) sol.counts[a] += bits[a * K + k] << k;
    sol.length += sol.counts[a];
    sol.total_mass += sol.counts[a] * p.masses[a];
  }
  sol.deviation_da = std::abs(sol.total_mass - p.calibrated_mass);
  return sol;
}

PopulationMetrics evaluate_population(std::span<const CompositionSolution> solutions) {
  if (solutions.empty()) throw ArgumentError("cannot evaluate an empty solution set");
  PopulationMetrics m;
  m.size = static_cast<int>(solutions.size());
  int violating = 0;
  for (std::size_t i = 0; i < solutions.size(); ++i) {
    const auto& s = solutions[i];
    if (!s.violation_free()) {
      ++violating;
      continue;
    }
    if (!m.best_deviation_da || *s.deviation_da < *m.best_deviation_da) {
      m.best_deviation_da = s.deviation_da;
      m.best_relative = s.relative_deviation;
      m.best_index = static_cast<int>(i);
    }
  }
  m.violation_rate = static_cast<double>(violating) / m.size;
  return m;
}

}  // namespace cimtune::peptide
