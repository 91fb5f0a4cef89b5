#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uvesc/linalg.hpp"
#include "uvesc/types.hpp"

namespace uvesc {

/// Perturbation S(t), demodulation M(t) and Hessian demodulation N(t) for one dither spec.
/// Precomputes frequencies and the common period; phases are reduced modulo the period so
/// samples at t and t + k T agree to rounding.
class DitherGenerator {
 public:
  explicit DitherGenerator(const DitherSpec& spec);

  std::size_t dimension() const noexcept { return amplitudes_.size(); }
  double period() const noexcept { return period_; }
  const Vector& frequencies() const noexcept { return omegas_; }
  const Vector& amplitudes() const noexcept { return amplitudes_; }

  Vector perturbation(double t) const;  // S(t)
  Vector demodulation(double t) const;  // M(t)
  Matrix hessian_demodulation(double t) const;  // N(t)

  /// Writes S(t) and M(t) into caller storage; no allocation.
  void perturbation_and_demodulation(double t, std::span<double> s, std::span<double> m) const;
  void hessian_demodulation(double t, Matrix& out) const;

 private:
  double reduce(double t) const;

  Vector amplitudes_;
  Vector omegas_;
  double period_;
};

Vector dither_S(double t, const DitherSpec& spec);
Vector demod_M(double t, const DitherSpec& spec);
Matrix hessian_N(double t, const DitherSpec& spec);

/// Least common period of every sin(w_i t) and cos((w_i +- w_j) t), computed in exact rationals:
/// T = (2 pi / w) * D / gcd_i(p_i D / q_i) with D = lcm_i(q_i), ratio_i = p_i / q_i.
double common_period(const DitherSpec& spec);

/// Time-scaling frequency 2 pi / T.
double averaging_frequency(const DitherSpec& spec);

enum class FrequencyCondition { Equal, HalfSum, PlusTwice, SumDiff };
std::string_view to_string(FrequencyCondition c);

struct FrequencyViolation {
  std::size_t index;  // 0-based i
  FrequencyCondition condition;
  std::vector<std::size_t> witnesses;  // (j), (j,k) or (k,l), 0-based
  int sign = 0;  // +1 / -1 for SumDiff, 0 otherwise
};

struct FrequencyReport {
  bool valid = true;
  std::vector<FrequencyViolation> violations;
};

/// Exhaustive exact-rational check that no ratio coincides with w'_j, (w'_j + w'_k)/2,
/// w'_j + 2 w'_k or w'_k +- w'_l. Index tuples that make a condition an identity
/// (j = k = i in the half-sum) are skipped.
FrequencyReport validate_frequencies(const DitherSpec& spec);

/// One-line description with 1-based indices, e.g. "plus_twice: w'_3 = w'_1 + 2 w'_1 (3 = 1 + 2*1)".
std::string describe(const FrequencyViolation& v, const DitherSpec& spec);

}  // namespace uvesc
