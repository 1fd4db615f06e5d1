#include <random>

#include "cimtune/peptide.hpp"
#include "cimtune/solver.hpp"
#include "doctest.h"

using namespace cimtune;
using namespace cimtune::peptide;

namespace {

Problem lacrp4() { return make_problem({.target_mass = 1448.77, .positions = 13}); }

BinaryAssignment select(const Problem& p, std::initializer_list<std::pair<int, int>> picks) {
  std::vector<std::int8_t> bits(static_cast<std::size_t>(p.onehot_size()), 0);
  for (auto [s, a] : picks) bits[p.variable(s, a)] = 1;
  return BinaryAssignment(std::move(bits));
}

int column(const Problem& p, char code) { return static_cast<int>(p.codes.find(code)); }

// Penalty sum evaluated directly from its definition.
double direct_energy(const Problem& p, const Weights& w, const BinaryAssignment& x) {
  double pos = 0.0, mass = 0.0;
  for (int s = 0; s < p.positions; ++s) {
    double row = 0.0;
    for (int a = 0; a < p.acid_count(); ++a) {
      row += x[p.variable(s, a)];
      mass += p.masses[a] * x[p.variable(s, a)];
    }
    pos += (1.0 - row) * (1.0 - row);
  }
  return w.lambda_pos * pos + w.lambda_mass * (mass - p.calibrated_mass) * (mass - p.calibrated_mass);
}

}  // namespace

TEST_CASE("residue table") {
  const auto& t = amino_acids();
  std::string codes;
  for (const auto& a : t) {
    codes += a.code;
    CHECK(a.average > 50.0);
    CHECK(a.average < 200.0);
    CHECK(a.monoisotopic > 50.0);
    CHECK(a.monoisotopic < 200.0);
  }
  CHECK(codes == "ACDEFGHIKLMNPQRSTVWY");
  CHECK_THROWS_AS(amino_acid('B'), ArgumentError);
}

TEST_CASE("KKSKAKEPPPKKT residue sums") {
  CHECK(std::abs(residue_sum("KKSKAKEPPPKKT", MassTable::Average) - 1448.77) <= 0.01);
  CHECK(std::abs(residue_sum("KKSKAKEPPPKKT", MassTable::Monoisotopic) - 1447.887) <= 0.001);
}

TEST_CASE("calibrate_mass") {
  CHECK(std::abs(calibrate_mass(1466.78, Calibration::SubtractWater) - 1448.77) <= 0.02);
  CHECK(calibrate_mass(100.0, Calibration::None) == 100.0);
  CHECK(calibrate_mass(100.0, Calibration::SubtractWater, MassTable::Monoisotopic) == doctest::Approx(81.9894));
  CHECK_THROWS_AS(calibrate_mass(18.0, Calibration::SubtractWater), ArgumentError);
  CHECK_THROWS_AS(calibrate_mass(-1.0, Calibration::None), ArgumentError);
}

TEST_CASE("make_problem defaults and options") {
  const Problem p = make_problem({.target_mass = 1448.77});
  CHECK(p.positions == 13);
  CHECK(p.positions_defaulted);
  CHECK(p.onehot_size() == 260);
  CHECK(!lacrp4().positions_defaulted);

  const Problem hw = make_problem({.target_mass = 1448.77, .positions = 13, .half_water = true});
  CHECK(hw.masses[0] == doctest::Approx(71.0788 - 18.0153 / 2));
  CHECK_THROWS_AS(make_problem({.target_mass = 500.0, .positions = 0}), ArgumentError);
}

TEST_CASE("one-hot QUBO coefficients") {
  Vector<double> m(1);
  m << 100.0;
  const Problem single = custom_problem("X", m, 200.0, 1);
  const auto q = build_onehot_qubo(single, {1.0, 1.0});
  CHECK(q.diag()[0] == -30001.0);

  Vector<double> m2(2);
  m2 << 100.0, 100.0;
  const auto q2 = build_onehot_qubo(custom_problem("XY", m2, 200.0, 2), {1.0, 1.0});
  CHECK(q2.coefficient(0, 1) == 20002.0);  // same position
  CHECK(q2.coefficient(0, 2) == 20000.0);  // across positions
  CHECK(q2.offset() == 2.0 + 40000.0);
}

TEST_CASE("one-hot QUBO with no mass term is independent one-hot blocks") {
  const Problem p = custom_problem("GA", (Vector<double>(2) << 57.0519, 71.0788).finished(), 128.13, 3);
  const auto q = build_onehot_qubo(p, {2.0, 0.0});
  const SolveResult r = solve_exact(q, 10);
  CHECK(r.solutions[0].energy == doctest::Approx(0.0));
  // 2^3 ways to fill three positions with one of two acids.
  int ground = 0;
  for (const auto& s : r.solutions) ground += std::abs(s.energy) < 1e-9;
  CHECK(ground == 8);
}

TEST_CASE("property: one-hot energy equals the penalty sum") {
  const Problem p = make_problem({.target_mass = 600.0, .positions = 5});
  const Weights w{3e4, 0.7};
  const auto q = build_onehot_qubo(p, w);
  std::mt19937_64 rng(12);
  std::bernoulli_distribution on(0.06);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::int8_t> bits(static_cast<std::size_t>(p.onehot_size()));
    for (auto& b : bits) b = on(rng);
    const BinaryAssignment x(bits);
    const double expected = direct_energy(p, w, x);
    CHECK(qubo_energy(q, x) == doctest::Approx(expected).epsilon(1e-6));
  }
}

TEST_CASE("property: permuting positions keeps the energy") {
  const Problem p = lacrp4();
  const auto q = build_onehot_qubo(p, {1e5, 1.0});
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> acid(0, kAcidCount - 1);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<int> choice(static_cast<std::size_t>(p.positions));
    for (int& c : choice) c = acid(rng);
    auto bits_for = [&](const std::vector<int>& ch) {
      std::vector<std::int8_t> bits(static_cast<std::size_t>(p.onehot_size()), 0);
      for (int s = 0; s < p.positions; ++s) bits[p.variable(s, ch[s])] = 1;
      return BinaryAssignment(std::move(bits));
    };
    const double e = qubo_energy(q, bits_for(choice));
    std::shuffle(choice.begin(), choice.end(), rng);
    // Terms of size M^2 cancel down to e, so compare on that scale.
    CHECK(std::abs(qubo_energy(q, bits_for(choice)) - e) <= 1e-12 * q.offset());
  }
}

TEST_CASE("property: exact minimization recovers a two-residue target") {
  const char* codes = "GASP";
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) {
      Vector<double> m(4);
      for (int k = 0; k < 4; ++k) m[k] = amino_acid(codes[k]).average;
      const double target = m[a] + m[b];
      const Problem p = custom_problem(codes, m, target, 2);
      const double lambda_mass = 1.0;
      const auto q = build_onehot_qubo(p, {10.0 * lambda_mass * m.maxCoeff() * m.maxCoeff(), lambda_mass});
      const SolveResult r = solve_exact(q, 2);
      for (const auto& s : r.solutions) {
        const CompositionSolution sol = decode_onehot(p, to_bits(s.spins));
        CHECK(sol.violation_free());
        CHECK(*sol.deviation_da <= 1e-9);
      }
      CHECK(r.solutions[0].energy == doctest::Approx(r.solutions[1].energy));
    }
  }
}

TEST_CASE("count QUBO") {
  Vector<double> m(1);
  m << 100.0;
  const Problem p = custom_problem("X", m, 100.0, 1);
  const auto q = build_count_qubo(p, {.bits_per_acid = 1, .A = 1.0, .E = 0.0});
  CHECK(qubo_energy(q, parse_bits("0")) == 10000.0);
  CHECK(qubo_energy(q, parse_bits("1")) == 0.0);

  const Problem two = custom_problem("XY", (Vector<double>(2) << 3.0, 5.0).finished(), 7.0, 1);
  const CountEncodingConfig cfg{.bits_per_acid = 2, .A = 2.0, .E = 0.5, .l_mid = 1.5};
  const auto q2 = build_count_qubo(two, cfg);
  // Symbolic expansion: linear A m 2^k (m 2^k - 2M) + E 2^k (2^k - 2L), pair 2A m m' 2^k 2^k' + 2E 2^k 2^k'.
  CHECK(q2.diag()[1] == doctest::Approx(2.0 * 6.0 * (6.0 - 14.0) + 0.5 * 2.0 * (2.0 - 3.0)));
  CHECK(q2.coefficient(0, 3) == doctest::Approx(2.0 * 2.0 * 3.0 * 5.0 * 2.0 + 2.0 * 0.5 * 2.0));
  for (std::uint32_t code = 0; code < 16; ++code) {
    std::vector<std::int8_t> bits(4);
    for (int i = 0; i < 4; ++i) bits[i] = (code >> i) & 1U;
    const BinaryAssignment x(bits);
    const CountSolution c = decode_count(two, cfg, x);
    const double expected = 2.0 * std::pow(c.total_mass - 7.0, 2) + 0.5 * std::pow(c.length - 1.5, 2);
    CHECK(qubo_energy(q2, x) == doctest::Approx(expected));
  }

  const auto zero = build_count_qubo(lacrp4(), {.A = 0.0, .E = 1.0, .l_mid = 0.0});
  const SolveResult r = solve_annealed(zero, SolverConfig{.sweeps = 200});
  CHECK(r.solutions[0].spins == SpinAssignment::filled(100, -1));
  CHECK_THROWS_AS(build_count_qubo(lacrp4(), {.bits_per_acid = 9}), ArgumentError);
}

TEST_CASE("count encoding suppresses more coefficients than one-hot") {
  const Problem p = lacrp4();
  const auto onehot = normalize_max_abs(build_onehot_qubo(p, {1.0, 1.0}));
  const auto count = normalize_max_abs(build_count_qubo(p, {}));
  const double f_onehot = coefficient_stats(onehot, 1e-4).near_zero_fraction;
  const double f_count = coefficient_stats(count, 1e-4).near_zero_fraction;
  CHECK(f_count >= f_onehot);
  CHECK(coefficient_stats(count, 1e-3).near_zero_fraction > coefficient_stats(onehot, 1e-3).near_zero_fraction);
}

TEST_CASE("decode_onehot") {
  const Problem p = make_problem({.target_mass = 128.13, .positions = 2});
  const CompositionSolution ga = decode_onehot(p, select(p, {{0, column(p, 'G')}, {1, column(p, 'A')}}));
  CHECK(ga.violation_free());
  CHECK(*ga.deviation_da <= 0.01);
  CHECK(*ga.total_mass == doctest::Approx(128.1307));
  CHECK(composition_string(p, ga) == "A1 G1");

  const CompositionSolution none = decode_onehot(p, select(p, {}));
  CHECK(none.onehot_violations == std::vector<int>{0, 1});
  CHECK(!none.total_mass);
  CHECK(!none.deviation_da);

  const CompositionSolution twice = decode_onehot(p, select(p, {{0, 0}, {0, 1}, {1, 2}}));
  CHECK(twice.onehot_violations == std::vector<int>{0});
  CHECK_THROWS_AS(decode_onehot(p, parse_bits("0101")), DimensionError);
}

TEST_CASE("evaluate_population") {
  const Problem p = make_problem({.target_mass = 128.13, .positions = 2});
  std::vector<CompositionSolution> population;
  for (int i = 0; i < 9; ++i) population.push_back(decode_onehot(p, select(p, {{0, i}})));
  population.push_back(decode_onehot(p, select(p, {{0, column(p, 'G')}, {1, column(p, 'A')}})));
  const PopulationMetrics m = evaluate_population(population);
  CHECK(m.violation_rate == doctest::Approx(0.9));
  CHECK(m.best_index == 9);

  CompositionSolution a, b;
  a.deviation_da = 5.0;
  a.relative_deviation = 0.05;
  b.deviation_da = 2.0;
  b.relative_deviation = 0.02;
  const std::vector<CompositionSolution> clean{a, b};
  CHECK(*evaluate_population(clean).best_deviation_da == 2.0);
  CHECK(evaluate_population(clean).violation_rate == 0.0);

  const std::vector<CompositionSolution> dirty(population.begin(), population.begin() + 3);
  CHECK(!evaluate_population(dirty).best_deviation_da);
  CHECK_THROWS_AS(evaluate_population(std::span<const CompositionSolution>{}), ArgumentError);
}
