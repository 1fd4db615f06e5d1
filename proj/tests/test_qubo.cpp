#include <random>

#include "cimtune/qubo.hpp"
#include "doctest.h"

using namespace cimtune;

namespace {

// Dense reference representation used as an independent oracle.
struct DenseQubo {
  std::vector<double> diag;
  std::vector<std::vector<double>> upper;  // upper[i][j] for i < j
  double offset = 0.0;

  double energy(const std::vector<int>& x) const {
    double e = offset;
    const std::size_t n = diag.size();
    for (std::size_t i = 0; i < n; ++i) {
      e += diag[i] * x[i];
      for (std::size_t j = i + 1; j < n; ++j) e += upper[i][j] * x[i] * x[j];
    }
    return e;
  }

  QuboMatrix<double> to_matrix() const {
    QuboBuilder<double> b(static_cast<Index>(diag.size()));
    for (std::size_t i = 0; i < diag.size(); ++i) {
      b.add_linear(Index(i), diag[i]);
      for (std::size_t j = i + 1; j < diag.size(); ++j) {
        if (upper[i][j] != 0.0) b.add_quadratic(Index(i), Index(j), upper[i][j]);
      }
    }
    b.add_offset(offset);
    return b.build();
  }
};

DenseQubo random_dense(std::mt19937_64& rng, std::size_t n, double scale) {
  std::uniform_real_distribution<double> coeff(-scale, scale);
  std::bernoulli_distribution present(0.6);
  DenseQubo d;
  d.diag.resize(n);
  d.upper.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    d.diag[i] = coeff(rng);
    for (std::size_t j = i + 1; j < n; ++j) {
      if (present(rng)) d.upper[i][j] = coeff(rng);
    }
  }
  d.offset = coeff(rng);
  return d;
}

std::vector<int> bits_of(unsigned mask, std::size_t n) {
  std::vector<int> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = (mask >> i) & 1U;
  return x;
}

BinaryAssignment to_assignment(const std::vector<int>& x) {
  std::vector<std::int8_t> v(x.begin(), x.end());
  return BinaryAssignment(std::move(v));
}

QuboMatrix<double> two_var() {
  QuboBuilder<double> b(2);
  b.add_linear(0, 1.0).add_linear(1, 3.0).add_quadratic(0, 1, 2.0);
  return b.build();
}

}  // namespace

TEST_CASE("qubo_energy on the two-variable example") {
  const auto q = two_var();
  CHECK(qubo_energy(q, parse_bits("11")) == 6.0);
  CHECK(qubo_energy(q, parse_bits("01")) == 3.0);
  CHECK(qubo_energy(q, parse_bits("10")) == 1.0);
  CHECK(qubo_energy(q, parse_bits("00")) == 0.0);
}

TEST_CASE("qubo_energy of the zero assignment is the offset") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const auto q = random_dense(rng, 6, 50.0).to_matrix();
    CHECK(qubo_energy(q, BinaryAssignment::filled(6, 0)) == doctest::Approx(q.offset()).epsilon(1e-15));
  }
}

TEST_CASE("qubo_energy rejects a length mismatch") {
  CHECK_THROWS_AS(qubo_energy(two_var(), parse_bits("1")), DimensionError);
}

TEST_CASE("assignments validate their alphabet") {
  CHECK_THROWS_AS(BinaryAssignment(std::vector<std::int8_t>{0, 2}), ArgumentError);
  CHECK_THROWS_AS(SpinAssignment(std::vector<std::int8_t>{1, 0}), ArgumentError);
  CHECK_THROWS_AS(parse_bits("01x"), ArgumentError);
  const auto x = parse_bits("0110");
  CHECK(to_bits(to_spins(x)) == x);
  CHECK(to_spins(x).values() == std::vector<std::int8_t>{-1, 1, 1, -1});
}

TEST_CASE("QuboMatrix rejects malformed storage") {
  UpperCouplings<double> lower(2, 2);
  lower.insert(1, 0) = 1.0;
  CHECK_THROWS_AS(QuboMatrix<double>(Vector<double>::Zero(2), lower, 0.0), ArgumentError);
  CHECK_THROWS_AS(QuboMatrix<double>(Vector<double>::Zero(3), UpperCouplings<double>(2, 2), 0.0), DimensionError);
  CHECK_THROWS_AS(QuboMatrix<double>(Index(0)), ArgumentError);
  Vector<double> d(1);
  d << std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(QuboMatrix<double>(d, UpperCouplings<double>(1, 1), 0.0), ArgumentError);
}

TEST_CASE("builder folds i == j and swaps i > j") {
  QuboBuilder<double> b(3);
  b.add_quadratic(2, 0, 1.5).add_quadratic(1, 1, 4.0).add_quadratic(0, 2, 0.5);
  const auto q = b.build();
  CHECK(q.coefficient(0, 2) == 2.0);
  CHECK(q.coefficient(2, 0) == 2.0);
  CHECK(q.diag()[1] == 4.0);
  CHECK(q.coupling_count() == 1);
}

TEST_CASE("add_squared_penalty expands 2(x1 + x2 - 1)^2") {
  Vector<double> c(2);
  c << 1.0, 1.0;
  const auto q = add_squared_penalty(QuboMatrix<double>(2), c, -1.0, 2.0);
  CHECK(q.diag()[0] == -2.0);
  CHECK(q.diag()[1] == -2.0);
  CHECK(q.coefficient(0, 1) == 4.0);
  CHECK(q.offset() == 2.0);
  for (unsigned m = 0; m < 4; ++m) {
    const auto x = bits_of(m, 2);
    const double lin = x[0] + x[1] - 1.0;
    CHECK(qubo_energy(q, to_assignment(x)) == doctest::Approx(2.0 * lin * lin));
  }
}

TEST_CASE("add_squared_penalty with zero coefficients only shifts the offset") {
  const auto base = two_var();
  const auto q = add_squared_penalty(base, Vector<double>::Zero(2), 3.0, 5.0);
  CHECK(q.offset() == base.offset() + 45.0);
  CHECK(q.diag() == base.diag());
  CHECK(q.coupling_count() == base.coupling_count());
}

TEST_CASE("one-hot row penalty: -lambda on the diagonal, +2 lambda on pairs") {
  const double lambda = 7.5;
  const auto q = add_squared_penalty(QuboMatrix<double>(20), Vector<double>::Ones(20), -1.0, lambda);
  for (Index i = 0; i < 20; ++i) {
    CHECK(q.diag()[i] == -lambda);
    for (Index j = i + 1; j < 20; ++j) CHECK(q.coefficient(i, j) == 2.0 * lambda);
  }
  CHECK(q.offset() == lambda);
}

TEST_CASE("add_squared_penalty preconditions") {
  CHECK_THROWS_AS(add_squared_penalty(two_var(), Vector<double>::Ones(2), 0.0, 0.0), ArgumentError);
  CHECK_THROWS_AS(add_squared_penalty(two_var(), Vector<double>::Ones(2), 0.0, -1.0), ArgumentError);
  CHECK_THROWS_AS(add_squared_penalty(two_var(), Vector<double>::Ones(3), 0.0, 1.0), DimensionError);
}

TEST_CASE("property: a penalty raises every energy by exactly weight * expr^2") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + trial % 7;
    const DenseQubo d = random_dense(rng, n, 10.0);
    const auto base = d.to_matrix();
    Vector<double> c(static_cast<Index>(n));
    for (auto& v : c) v = u(rng);
    const double k = u(rng);
    const double w = 0.1 + std::abs(u(rng));
    const auto q = add_squared_penalty(base, c, k, w);
    for (unsigned m = 0; m < (1U << n); ++m) {
      const auto x = bits_of(m, n);
      double expr = k;
      for (std::size_t i = 0; i < n; ++i) expr += c[Index(i)] * x[i];
      const double added = qubo_energy(q, to_assignment(x)) - d.energy(x);
      CHECK(added >= -1e-9);
      CHECK(added == doctest::Approx(w * expr * expr).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("qubo_to_ising on the two-variable example") {
  const auto m = qubo_to_ising(two_var());
  CHECK(m.convention() == IsingConvention::PositiveSum);
  CHECK(m.h()[0] == 1.0);
  CHECK(m.h()[1] == 2.0);
  CHECK(m.J().coeff(0, 1) == 0.5);
  CHECK(m.offset() == 2.5);
  CHECK(ising_energy(m, SpinAssignment(std::vector<std::int8_t>{-1, -1})) == 0.0);

  const auto neg = qubo_to_ising(two_var(), IsingConvention::NegatedSum);
  CHECK(neg.h()[0] == -1.0);
  CHECK(neg.J().coeff(0, 1) == -0.5);
  CHECK(ising_energy(neg, SpinAssignment(std::vector<std::int8_t>{-1, -1})) == 0.0);
}

TEST_CASE("qubo_to_ising edge cases") {
  const auto zero = qubo_to_ising(QuboMatrix<double>(Vector<double>::Zero(3), UpperCouplings<double>(3, 3), 4.0));
  CHECK(zero.h().isZero());
  CHECK(zero.J().nonZeros() == 0);
  CHECK(zero.offset() == 4.0);
  for (const auto& s : {std::vector<std::int8_t>{1, -1, 1}, std::vector<std::int8_t>{-1, -1, -1}}) {
    CHECK(ising_energy(zero, SpinAssignment(s)) == 4.0);
  }

  Vector<double> d(1);
  d << 6.0;
  const auto single = qubo_to_ising(QuboMatrix<double>(d, UpperCouplings<double>(1, 1), 0.0));
  CHECK(single.h()[0] == 3.0);
  CHECK(single.offset() == 3.0);
}

TEST_CASE("ising_energy rejects invalid spins and sizes") {
  const auto m = qubo_to_ising(two_var());
  CHECK_THROWS_AS(ising_energy(m, SpinAssignment(std::vector<std::int8_t>{1})), DimensionError);
  CHECK_THROWS_AS(SpinAssignment(std::vector<std::int8_t>{1, 3}), ArgumentError);
}

TEST_CASE("property: QUBO and Ising energies agree on every assignment") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + trial % 10;
    const DenseQubo d = random_dense(rng, n, 1000.0);
    const auto q = d.to_matrix();
    const auto pos = qubo_to_ising(q);
    const auto neg = with_convention(pos, IsingConvention::NegatedSum);
    const double tol = 1e-9 * std::max(1.0, coefficient_stats(q).max_abs);
    for (unsigned mask = 0; mask < (1U << n); ++mask) {
      const auto x = to_assignment(bits_of(mask, n));
      const double reference = d.energy(bits_of(mask, n));
      CHECK(std::abs(qubo_energy(q, x) - reference) <= tol);
      CHECK(std::abs(ising_energy(pos, to_spins(x)) - reference) <= tol);
      CHECK(std::abs(ising_energy(neg, to_spins(x)) - reference) <= tol);
    }
    const auto back = ising_to_qubo(neg);
    for (unsigned mask = 0; mask < (1U << n); ++mask) {
      const auto x = to_assignment(bits_of(mask, n));
      CHECK(std::abs(qubo_energy(back, x) - qubo_energy(q, x)) <= tol);
    }
  }
}

TEST_CASE("matrices compose with + and scalar *") {
  const auto q = two_var();
  const auto sum = q + 2.0 * q;
  for (unsigned m = 0; m < 4; ++m) {
    const auto x = to_assignment(bits_of(m, 2));
    CHECK(qubo_energy(sum, x) == doctest::Approx(3.0 * qubo_energy(q, x)));
  }
  CHECK_THROWS_AS(q + QuboMatrix<double>(3), DimensionError);
}

TEST_CASE("coefficient_stats") {
  SUBCASE("dynamic range of {1, 10, 1000}") {
    QuboBuilder<double> b(3);
    b.add_linear(0, 1.0).add_linear(1, 10.0).add_linear(2, 1000.0);
    const auto st = coefficient_stats(b.build(), 5.0);
    CHECK(st.count == 3);
    CHECK(st.max_abs == 1000.0);
    CHECK(st.min_nonzero_abs == 1.0);
    CHECK(st.dynamic_range_orders == doctest::Approx(3.0));
    CHECK(st.near_zero_fraction == doctest::Approx(1.0 / 3.0));
  }
  SUBCASE("all-equal coefficients") {
    QuboBuilder<double> b(3);
    b.add_linear(0, -4.0).add_linear(1, 4.0).add_quadratic(0, 2, 4.0);
    CHECK(coefficient_stats(b.build()).dynamic_range_orders == 0.0);
  }
  SUBCASE("empty matrix") {
    const auto st = coefficient_stats(QuboMatrix<double>(2));
    CHECK(st.count == 0);
    CHECK(st.dynamic_range_orders == 0.0);
    CHECK_THROWS_AS(normalize_max_abs(QuboMatrix<double>(2)), DegenerateInputError);
  }
  SUBCASE("normalization") {
    const auto n = normalize_max_abs(two_var());
    CHECK(coefficient_stats(n).max_abs == 1.0);
    CHECK(n.coefficient(0, 1) == doctest::Approx(2.0 / 3.0));
  }
}
