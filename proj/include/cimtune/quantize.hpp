#pragma once

// 8-bit signed quantization of QUBO coefficients, as required by annealing
// hardware that only accepts int8 couplings.

#include <cmath>
#include <cstdint>

#include "cimtune/qubo.hpp"

namespace cimtune {

inline constexpr int kInt8Min = -128;
inline constexpr int kInt8Max = 127;

struct QuantizationReport {
  Index nonzero_count = 0;
  Index zeroed_count = 0;         // nonzero originals that rounded to 0
  double zeroed_fraction = 0.0;   // zeroed_count / nonzero_count
  double dynamic_range_orders = 0.0;
  double max_abs_original = 0.0;
};

struct QuantizedQubo {
  QuboMatrix<int> integers;  // every entry in [-128, 127]; offset is always 0
  double scale = 1.0;        // original ~= integer / scale
  double offset = 0.0;       // original offset, carried unquantized
  QuantizationReport report;

  /// integer / scale, with the original offset restored.
  QuboMatrix<double> dequantized() const {
    QuboMatrix<double> d = (1.0 / scale) * integers.cast<double>();
    return QuboMatrix<double>(d.diag(), d.upper(), offset);
  }
};

/// Round half away from zero, then clamp into the int8 range.
inline int quantize_coefficient(double value, double max_abs) {
  // value * 127 / max_abs keeps exact halves exact (e.g. -100 -> -63.5).
  const double scaled = value * static_cast<double>(kInt8Max) / max_abs;
  const double rounded = std::round(scaled);
  return static_cast<int>(std::clamp(rounded, double(kInt8Min), double(kInt8Max)));
}

template <typename Scalar>
QuantizedQubo quantize_int8(const QuboMatrix<Scalar>& q) {
  const CoefficientStats st = coefficient_stats(q);
  if (st.count == 0) throw DegenerateInputError("cannot quantize an all-zero QUBO: scale is undefined");

  const Index n = q.size();
  QuantizationReport report;
  report.max_abs_original = st.max_abs;
  report.dynamic_range_orders = st.dynamic_range_orders;
  report.nonzero_count = st.count;

  auto convert = [&](Scalar v) {
    const int iv = quantize_coefficient(static_cast<double>(v), st.max_abs);
    if (v != Scalar(0) && iv == 0) ++report.zeroed_count;
    return iv;
  };

  Vector<int> diag(n);
  for (Index i = 0; i < n; ++i) diag[i] = convert(q.diag()[i]);
  std::vector<Eigen::Triplet<int, int>> triplets;
  q.for_each_coupling([&](Index i, Index j, Scalar v) {
    triplets.emplace_back(static_cast<int>(i), static_cast<int>(j), convert(v));
  });
  UpperCouplings<int> upper(n, n);
  upper.setFromTriplets(triplets.begin(), triplets.end());
  report.zeroed_fraction = static_cast<double>(report.zeroed_count) / static_cast<double>(report.nonzero_count);

  return QuantizedQubo{QuboMatrix<int>(std::move(diag), std::move(upper), 0),
                       static_cast<double>(kInt8Max) / st.max_abs, static_cast<double>(q.offset()), report};
}

}  // namespace cimtune
