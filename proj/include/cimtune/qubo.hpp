#pragma once

// QUBO and Ising value types, penalty assembly, energies and conversion.
//
// Matrices are templated on the coefficient scalar. Quadratic coefficients are
// kept in a strictly upper-triangular sparse matrix; the diagonal (linear
// coefficients) is dense. Every type here is an immutable value: builders
// produce new matrices, nothing mutates an existing one.

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "cimtune/errors.hpp"

namespace cimtune {

using Index = Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Strictly upper-triangular coupling storage (row < col). Absent entries are 0.
template <typename Scalar>
using UpperCouplings = Eigen::SparseMatrix<Scalar, Eigen::RowMajor, int>;

namespace detail {

template <typename Scalar>
bool is_finite(Scalar v) {
  if constexpr (std::is_floating_point_v<Scalar>) {
    return std::isfinite(v);
  } else {
    return true;
  }
}

/// Vector of values drawn from the two-element alphabet {Lo, Hi}.
template <int Lo, int Hi>
class TwoLevelAssignment {
 public:
  TwoLevelAssignment() = default;

  explicit TwoLevelAssignment(std::vector<std::int8_t> values) : values_(std::move(values)) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (values_[i] != Lo && values_[i] != Hi) {
        throw ArgumentError("assignment entry " + std::to_string(i) + " = " +
                            std::to_string(values_[i]) + " is outside {" + std::to_string(Lo) +
                            "," + std::to_string(Hi) + "}");
      }
    }
  }

  static TwoLevelAssignment filled(Index n, std::int8_t value) {
    return TwoLevelAssignment(std::vector<std::int8_t>(static_cast<std::size_t>(n), value));
  }

  Index size() const noexcept { return static_cast<Index>(values_.size()); }
  std::int8_t operator[](Index i) const { return values_[static_cast<std::size_t>(i)]; }
  const std::vector<std::int8_t>& values() const noexcept { return values_; }

  template <typename Scalar>
  Vector<Scalar> as_vector() const {
    Vector<Scalar> v(size());
    for (Index i = 0; i < size(); ++i) v[i] = static_cast<Scalar>(values_[static_cast<std::size_t>(i)]);
    return v;
  }

  friend bool operator==(const TwoLevelAssignment&, const TwoLevelAssignment&) = default;
  friend auto operator<=>(const TwoLevelAssignment&, const TwoLevelAssignment&) = default;

 private:
  std::vector<std::int8_t> values_;
};

}  // namespace detail

/// x_i in {0,1}.
using BinaryAssignment = detail::TwoLevelAssignment<0, 1>;
/// s_i in {-1,+1}.
using SpinAssignment = detail::TwoLevelAssignment<-1, 1>;

/// Parses a string of '0'/'1' characters, e.g. "0110".
inline BinaryAssignment parse_bits(std::string_view text) {
  std::vector<std::int8_t> v;
  v.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') throw ArgumentError("bit string may only contain '0' and '1'");
    v.push_back(static_cast<std::int8_t>(c - '0'));
  }
  return BinaryAssignment(std::move(v));
}

inline SpinAssignment to_spins(const BinaryAssignment& x) {
  std::vector<std::int8_t> s(x.values().size());
  std::transform(x.values().begin(), x.values().end(), s.begin(),
                 [](std::int8_t b) { return static_cast<std::int8_t>(2 * b - 1); });
  return SpinAssignment(std::move(s));
}

inline BinaryAssignment to_bits(const SpinAssignment& s) {
  std::vector<std::int8_t> x(s.values().size());
  std::transform(s.values().begin(), s.values().end(), x.begin(),
                 [](std::int8_t v) { return static_cast<std::int8_t>((v + 1) / 2); });
  return BinaryAssignment(std::move(x));
}

/// Minimization form  sum_i Q_ii x_i + sum_{i<j} Q_ij x_i x_j + offset.
template <typename Scalar>
class QuboMatrix {
 public:
  using scalar_type = Scalar;

  /// All-zero matrix over n variables.
  explicit QuboMatrix(Index n) : QuboMatrix(Vector<Scalar>::Zero(n), UpperCouplings<Scalar>(n, n), Scalar(0)) {}

  QuboMatrix(Vector<Scalar> diag, UpperCouplings<Scalar> upper, Scalar offset)
      : diag_(std::move(diag)), upper_(std::move(upper)), offset_(offset) {
    const Index n = diag_.size();
    if (n < 1) throw ArgumentError("QUBO needs at least one variable");
    if (upper_.rows() != n || upper_.cols() != n) {
      throw DimensionError("coupling matrix is " + std::to_string(upper_.rows()) + "x" +
                           std::to_string(upper_.cols()) + ", expected " + std::to_string(n) + "x" +
                           std::to_string(n));
    }
    upper_.prune(Scalar(0));
    upper_.makeCompressed();
    if (!detail::is_finite(offset_)) throw ArgumentError("offset is not finite");
    for (Index i = 0; i < n; ++i) {
      if (!detail::is_finite(diag_[i])) throw ArgumentError("diagonal entry " + std::to_string(i) + " is not finite");
    }
    for (Index r = 0; r < upper_.outerSize(); ++r) {
      for (typename UpperCouplings<Scalar>::InnerIterator it(upper_, r); it; ++it) {
        if (it.col() <= it.row()) throw ArgumentError("coupling stored below the diagonal");
        if (!detail::is_finite(it.value())) throw ArgumentError("coupling is not finite");
      }
    }
  }

  Index size() const noexcept { return diag_.size(); }
  const Vector<Scalar>& diag() const noexcept { return diag_; }
  const UpperCouplings<Scalar>& upper() const noexcept { return upper_; }
  Scalar offset() const noexcept { return offset_; }
  Index coupling_count() const noexcept { return upper_.nonZeros(); }

  /// Q_ij for any i, j (order-insensitive); Q_ii for i == j.
  Scalar coefficient(Index i, Index j) const {
    if (i == j) return diag_[i];
    if (i > j) std::swap(i, j);
    return upper_.coeff(i, j);
  }

  /// Calls f(i, j, value) for every stored coupling, rows ascending.
  template <typename F>
  void for_each_coupling(F&& f) const {
    for (Index r = 0; r < upper_.outerSize(); ++r) {
      for (typename UpperCouplings<Scalar>::InnerIterator it(upper_, r); it; ++it) {
        f(static_cast<Index>(it.row()), static_cast<Index>(it.col()), it.value());
      }
    }
  }

  template <typename To>
  QuboMatrix<To> cast() const {
    return QuboMatrix<To>(diag_.template cast<To>(), upper_.template cast<To>(), static_cast<To>(offset_));
  }

 private:
  Vector<Scalar> diag_;
  UpperCouplings<Scalar> upper_;
  Scalar offset_;
};

/// Accumulates linear, quadratic and constant contributions; duplicates sum.
template <typename Scalar>
class QuboBuilder {
 public:
  explicit QuboBuilder(Index n) : diag_(Vector<Scalar>::Zero(n)) {
    if (n < 1) throw ArgumentError("QUBO needs at least one variable");
  }

  explicit QuboBuilder(const QuboMatrix<Scalar>& q) : diag_(q.diag()), offset_(q.offset()) {
    triplets_.reserve(static_cast<std::size_t>(q.coupling_count()));
    q.for_each_coupling([&](Index i, Index j, Scalar v) { triplets_.emplace_back(int(i), int(j), v); });
  }

  Index size() const noexcept { return diag_.size(); }

  QuboBuilder& add_linear(Index i, Scalar v) {
    check_index(i);
    diag_[i] += v;
    return *this;
  }

  /// x_i x_j; i == j folds to the diagonal since x^2 = x for binaries.
  QuboBuilder& add_quadratic(Index i, Index j, Scalar v) {
    check_index(i);
    check_index(j);
    if (i == j) {
      diag_[i] += v;
    } else {
      if (i > j) std::swap(i, j);
      triplets_.emplace_back(static_cast<int>(i), static_cast<int>(j), v);
    }
    return *this;
  }

  QuboBuilder& add_offset(Scalar v) {
    offset_ += v;
    return *this;
  }

  /// Adds weight * (sum_k c_k x_{i_k} + constant)^2.
  QuboBuilder& add_squared_penalty(std::span<const std::pair<Index, Scalar>> terms, Scalar constant, Scalar weight) {
    if (!(weight > Scalar(0))) throw ArgumentError("penalty weight must be positive");
    for (std::size_t a = 0; a < terms.size(); ++a) {
      const auto [ia, ca] = terms[a];
      add_linear(ia, weight * (ca * ca + Scalar(2) * constant * ca));
      for (std::size_t b = a + 1; b < terms.size(); ++b) {
        const auto [ib, cb] = terms[b];
        add_quadratic(ia, ib, Scalar(2) * weight * ca * cb);
      }
    }
    offset_ += weight * constant * constant;
    return *this;
  }

  QuboMatrix<Scalar> build() const {
    const Index n = diag_.size();
    UpperCouplings<Scalar> upper(n, n);
    upper.setFromTriplets(triplets_.begin(), triplets_.end());
    return QuboMatrix<Scalar>(diag_, std::move(upper), offset_);
  }

 private:
  void check_index(Index i) const {
    if (i < 0 || i >= diag_.size()) {
      throw DimensionError("variable index " + std::to_string(i) + " outside [0," + std::to_string(diag_.size()) + ")");
    }
  }

  Vector<Scalar> diag_;
  std::vector<Eigen::Triplet<Scalar, int>> triplets_;
  Scalar offset_{0};
};

template <typename Scalar>
Scalar qubo_energy(const QuboMatrix<Scalar>& q, const BinaryAssignment& x) {
  if (x.size() != q.size()) {
    throw DimensionError("assignment has " + std::to_string(x.size()) + " entries, QUBO has " +
                         std::to_string(q.size()) + " variables");
  }
  const Vector<Scalar> xv = x.template as_vector<Scalar>();
  return q.diag().dot(xv) + xv.dot(q.upper() * xv) + q.offset();
}

/// Returns q + weight * (coeffs . x + constant)^2 with squares folded to the diagonal.
template <typename Scalar, typename Derived>
QuboMatrix<Scalar> add_squared_penalty(const QuboMatrix<Scalar>& q, const Eigen::MatrixBase<Derived>& coeffs,
                                       std::type_identity_t<Scalar> constant, std::type_identity_t<Scalar> weight) {
  if (coeffs.size() != q.size()) {
    throw DimensionError("penalty has " + std::to_string(coeffs.size()) + " coefficients, QUBO has " +
                         std::to_string(q.size()) + " variables");
  }
  std::vector<std::pair<Index, Scalar>> terms;
  for (Index i = 0; i < coeffs.size(); ++i) {
    const Scalar c = static_cast<Scalar>(coeffs(i));
    if (c != Scalar(0)) terms.emplace_back(i, c);
  }
  QuboBuilder<Scalar> b(q);
  b.add_squared_penalty(terms, constant, weight);
  return b.build();
}

template <typename Scalar>
QuboMatrix<Scalar> operator+(const QuboMatrix<Scalar>& a, const QuboMatrix<Scalar>& b) {
  if (a.size() != b.size()) throw DimensionError("cannot add QUBOs of different sizes");
  return QuboMatrix<Scalar>(a.diag() + b.diag(), UpperCouplings<Scalar>(a.upper() + b.upper()), a.offset() + b.offset());
}

template <typename Scalar>
QuboMatrix<Scalar> operator*(Scalar s, const QuboMatrix<Scalar>& q) {
  return QuboMatrix<Scalar>(s * q.diag(), UpperCouplings<Scalar>(s * q.upper()), s * q.offset());
}

// ---------------------------------------------------------------------------
// Ising
// ---------------------------------------------------------------------------

/// PositiveSum:  E(s) =  sum h_i s_i + sum_{i<j} J_ij s_i s_j + offset
/// NegatedSum:   E(s) = -sum_{i<j} J_ij s_i s_j - sum h_i s_i + offset
enum class IsingConvention { PositiveSum, NegatedSum };

inline std::string_view to_string(IsingConvention c) {
  return c == IsingConvention::PositiveSum ? "positive_sum" : "negated_sum";
}

template <typename Scalar>
class IsingModel {
 public:
  IsingModel(Vector<Scalar> h, UpperCouplings<Scalar> j, Scalar offset, IsingConvention convention)
      : h_(std::move(h)), j_(std::move(j)), offset_(offset), convention_(convention) {
    const Index n = h_.size();
    if (n < 1) throw ArgumentError("Ising model needs at least one spin");
    if (j_.rows() != n || j_.cols() != n) throw DimensionError("coupling matrix does not match field vector");
    j_.prune(Scalar(0));
    j_.makeCompressed();
    for (Index r = 0; r < j_.outerSize(); ++r) {
      for (typename UpperCouplings<Scalar>::InnerIterator it(j_, r); it; ++it) {
        if (it.col() <= it.row()) throw ArgumentError("coupling stored below the diagonal");
      }
    }
  }

  Index size() const noexcept { return h_.size(); }
  const Vector<Scalar>& h() const noexcept { return h_; }
  const UpperCouplings<Scalar>& J() const noexcept { return j_; }
  Scalar offset() const noexcept { return offset_; }
  IsingConvention convention() const noexcept { return convention_; }

  template <typename F>
  void for_each_coupling(F&& f) const {
    for (Index r = 0; r < j_.outerSize(); ++r) {
      for (typename UpperCouplings<Scalar>::InnerIterator it(j_, r); it; ++it) {
        f(static_cast<Index>(it.row()), static_cast<Index>(it.col()), it.value());
      }
    }
  }

 private:
  Vector<Scalar> h_;
  UpperCouplings<Scalar> j_;
  Scalar offset_;
  IsingConvention convention_;
};

template <typename Scalar>
Scalar ising_energy(const IsingModel<Scalar>& m, const SpinAssignment& s) {
  if (s.size() != m.size()) {
    throw DimensionError("spin vector has " + std::to_string(s.size()) + " entries, model has " +
                         std::to_string(m.size()) + " spins");
  }
  const Vector<Scalar> sv = s.template as_vector<Scalar>();
  const Scalar body = m.h().dot(sv) + sv.dot(m.J() * sv);
  return (m.convention() == IsingConvention::PositiveSum ? body : -body) + m.offset();
}

/// Re-expresses the model in another convention; every energy is unchanged.
template <typename Scalar>
IsingModel<Scalar> with_convention(const IsingModel<Scalar>& m, IsingConvention target) {
  if (m.convention() == target) return m;
  return IsingModel<Scalar>(-m.h(), UpperCouplings<Scalar>(-m.J()), m.offset(), target);
}

/// Substitutes x = (s + 1) / 2.
template <typename Scalar>
IsingModel<Scalar> qubo_to_ising(const QuboMatrix<Scalar>& q, IsingConvention convention = IsingConvention::PositiveSum) {
  const Index n = q.size();
  Vector<Scalar> h = q.diag() / Scalar(2);
  Scalar offset = q.offset() + q.diag().sum() / Scalar(2);
  std::vector<Eigen::Triplet<Scalar, int>> couplings;
  couplings.reserve(static_cast<std::size_t>(q.coupling_count()));
  q.for_each_coupling([&](Index i, Index j, Scalar v) {
    const Scalar quarter = v / Scalar(4);
    h[i] += quarter;
    h[j] += quarter;
    offset += quarter;
    couplings.emplace_back(static_cast<int>(i), static_cast<int>(j), quarter);
  });
  UpperCouplings<Scalar> J(n, n);
  J.setFromTriplets(couplings.begin(), couplings.end());
  IsingModel<Scalar> positive(std::move(h), std::move(J), offset, IsingConvention::PositiveSum);
  return with_convention(positive, convention);
}

/// Inverse substitution s = 2x - 1.
template <typename Scalar>
QuboMatrix<Scalar> ising_to_qubo(const IsingModel<Scalar>& model) {
  const IsingModel<Scalar> m = with_convention(model, IsingConvention::PositiveSum);
  QuboBuilder<Scalar> b(m.size());
  Scalar offset = m.offset();
  for (Index i = 0; i < m.size(); ++i) {
    b.add_linear(i, Scalar(2) * m.h()[i]);
    offset -= m.h()[i];
  }
  m.for_each_coupling([&](Index i, Index j, Scalar v) {
    b.add_quadratic(i, j, Scalar(4) * v);
    b.add_linear(i, Scalar(-2) * v);
    b.add_linear(j, Scalar(-2) * v);
    offset += v;
  });
  b.add_offset(offset);
  return b.build();
}

// ---------------------------------------------------------------------------
// Coefficient diagnostics
// ---------------------------------------------------------------------------

struct CoefficientStats {
  Index count = 0;  // nonzero coefficients (diagonal and couplings; offset excluded)
  double max_abs = 0.0;
  double min_nonzero_abs = 0.0;
  double dynamic_range_orders = 0.0;  // log10(max_abs / min_nonzero_abs)
  double near_zero_threshold = 0.0;
  double near_zero_fraction = 0.0;  // share of nonzero coefficients with |c| < threshold
};

/// Calls f(value) for every nonzero diagonal entry and every stored coupling.
template <typename Scalar, typename F>
void for_each_nonzero_coefficient(const QuboMatrix<Scalar>& q, F&& f) {
  for (Index i = 0; i < q.size(); ++i) {
    if (q.diag()[i] != Scalar(0)) f(q.diag()[i]);
  }
  q.for_each_coupling([&](Index, Index, Scalar v) { f(v); });
}

template <typename Scalar>
CoefficientStats coefficient_stats(const QuboMatrix<Scalar>& q, double near_zero_threshold = 1e-4) {
  CoefficientStats st;
  st.near_zero_threshold = near_zero_threshold;
  double min_abs = std::numeric_limits<double>::infinity();
  Index near_zero = 0;
  for_each_nonzero_coefficient(q, [&](Scalar v) {
    const double a = std::abs(static_cast<double>(v));
    ++st.count;
    st.max_abs = std::max(st.max_abs, a);
    min_abs = std::min(min_abs, a);
    if (a < near_zero_threshold) ++near_zero;
  });
  if (st.count > 0) {
    st.min_nonzero_abs = min_abs;
    st.dynamic_range_orders = std::log10(st.max_abs / min_abs);
    st.near_zero_fraction = static_cast<double>(near_zero) / static_cast<double>(st.count);
  }
  return st;
}

/// Scales every coefficient (offset included) so the largest |coefficient| is 1.
template <typename Scalar>
QuboMatrix<Scalar> normalize_max_abs(const QuboMatrix<Scalar>& q) {
  const CoefficientStats st = coefficient_stats(q);
  if (st.count == 0) throw DegenerateInputError("cannot normalize an all-zero QUBO");
  return Scalar(1.0 / st.max_abs) * q;
}

}  // namespace cimtune
