#include "uvesc/signals.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "uvesc/errors.hpp"

namespace uvesc {

namespace {

void require_positive_ratios(const DitherSpec& spec) {
  if (spec.ratios.empty()) throw ValidationError("dither spec has no channels");
  if (!(spec.base_omega > 0.0)) throw ValidationError("base_omega must be positive");
  for (std::size_t i = 0; i < spec.ratios.size(); ++i)
    if (spec.ratios[i] <= 0)
      throw ValidationError("ratio " + std::to_string(i + 1) + " must be positive, got " + to_string(spec.ratios[i]));
}

// Common fundamental as a rational multiple of base_omega: gcd(P_i) / D.
Rational fundamental_ratio(const DitherSpec& spec) {
  require_positive_ratios(spec);
  std::int64_t common_den = 1;
  for (const Rational& r : spec.ratios) common_den = std::lcm(common_den, r.denominator());
  std::int64_t g = 0;
  for (const Rational& r : spec.ratios) g = std::gcd(g, r.numerator() * (common_den / r.denominator()));
  return Rational(g, common_den);
}

}  // namespace

DitherGenerator::DitherGenerator(const DitherSpec& spec)
    : amplitudes_(spec.amplitudes), omegas_(spec.frequencies()), period_(common_period(spec)) {
  if (spec.amplitudes.size() != spec.ratios.size())
    throw DimensionError("DitherGenerator: amplitudes and ratios differ in length");
  for (double a : amplitudes_)
    if (!(a > 0.0)) throw ValidationError("DitherGenerator: amplitudes must be positive");
}

double DitherGenerator::reduce(double t) const { return std::fmod(t, period_); }

void DitherGenerator::perturbation_and_demodulation(double t, std::span<double> s, std::span<double> m) const {
  const double tr = reduce(t);
  for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
    const double sn = std::sin(omegas_[i] * tr);
    s[i] = amplitudes_[i] * sn;
    m[i] = 2.0 / amplitudes_[i] * sn;
  }
}

Vector DitherGenerator::perturbation(double t) const {
  const double tr = reduce(t);
  Vector s(amplitudes_.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = amplitudes_[i] * std::sin(omegas_[i] * tr);
  return s;
}

Vector DitherGenerator::demodulation(double t) const {
  const double tr = reduce(t);
  Vector m(amplitudes_.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = 2.0 / amplitudes_[i] * std::sin(omegas_[i] * tr);
  return m;
}

void DitherGenerator::hessian_demodulation(double t, Matrix& out) const {
  const std::size_t n = amplitudes_.size();
  if (out.rows() != n || out.cols() != n) out = Matrix(n, n);
  const double tr = reduce(t);
  for (std::size_t i = 0; i < n; ++i) {
    const double ai = amplitudes_[i];
    out(i, i) = -8.0 / (ai * ai) * std::cos(2.0 * omegas_[i] * tr);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double c = 2.0 / (ai * amplitudes_[j]);
      const double v = c * std::cos((omegas_[i] - omegas_[j]) * tr) - c * std::cos((omegas_[i] + omegas_[j]) * tr);
      out(i, j) = v;
      out(j, i) = v;
    }
  }
}

Matrix DitherGenerator::hessian_demodulation(double t) const {
  Matrix n;
  hessian_demodulation(t, n);
  return n;
}

Vector dither_S(double t, const DitherSpec& spec) { return DitherGenerator(spec).perturbation(t); }
Vector demod_M(double t, const DitherSpec& spec) { return DitherGenerator(spec).demodulation(t); }
Matrix hessian_N(double t, const DitherSpec& spec) { return DitherGenerator(spec).hessian_demodulation(t); }

double common_period(const DitherSpec& spec) {
  const Rational f = fundamental_ratio(spec);
  return 2.0 * std::numbers::pi / (spec.base_omega * boost::rational_cast<double>(f));
}

double averaging_frequency(const DitherSpec& spec) {
  return spec.base_omega * boost::rational_cast<double>(fundamental_ratio(spec));
}

std::string_view to_string(FrequencyCondition c) {
  switch (c) {
    case FrequencyCondition::Equal: return "equal";
    case FrequencyCondition::HalfSum: return "half_sum";
    case FrequencyCondition::PlusTwice: return "plus_twice";
    case FrequencyCondition::SumDiff: return "sum_diff";
  }
  return "unknown";
}

FrequencyReport validate_frequencies(const DitherSpec& spec) {
  require_positive_ratios(spec);
  const auto& r = spec.ratios;
  const std::size_t n = r.size();
  FrequencyReport report;
  auto fire = [&](std::size_t i, FrequencyCondition c, std::vector<std::size_t> w, int sign = 0) {
    report.violations.push_back({i, c, std::move(w), sign});
  };

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      if (j != i && r[i] == r[j]) fire(i, FrequencyCondition::Equal, {j});

    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = j; k < n; ++k) {
        if (j == i && k == i) continue;
        if (2 * r[i] == r[j] + r[k]) fire(i, FrequencyCondition::HalfSum, {j, k});
      }

    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        if (r[i] == r[j] + 2 * r[k]) fire(i, FrequencyCondition::PlusTwice, {j, k});

    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t l = 0; l < n; ++l) {
        if (l >= k && r[i] == r[k] + r[l]) fire(i, FrequencyCondition::SumDiff, {k, l}, +1);
        if (r[i] == r[k] - r[l]) fire(i, FrequencyCondition::SumDiff, {k, l}, -1);
      }
  }
  report.valid = report.violations.empty();
  return report;
}

std::string describe(const FrequencyViolation& v, const DitherSpec& spec) {
  auto w = [](std::size_t i) { return "w'_" + std::to_string(i + 1); };
  auto r = [&](std::size_t i) { return to_string(spec.ratios.at(i)); };
  const auto& x = v.witnesses;
  std::string lhs = w(v.index), rhs, values;
  switch (v.condition) {
    case FrequencyCondition::Equal:
      rhs = w(x[0]);
      values = r(v.index) + " = " + r(x[0]);
      break;
    case FrequencyCondition::HalfSum:
      rhs = "(" + w(x[0]) + " + " + w(x[1]) + ")/2";
      values = r(v.index) + " = (" + r(x[0]) + " + " + r(x[1]) + ")/2";
      break;
    case FrequencyCondition::PlusTwice:
      rhs = w(x[0]) + " + 2 " + w(x[1]);
      values = r(v.index) + " = " + r(x[0]) + " + 2*" + r(x[1]);
      break;
    case FrequencyCondition::SumDiff: {
      const char* op = v.sign < 0 ? " - " : " + ";
      rhs = w(x[0]) + op + w(x[1]);
      values = r(v.index) + " = " + r(x[0]) + op + r(x[1]);
      break;
    }
  }
  return std::string(to_string(v.condition)) + ": " + lhs + " = " + rhs + " (" + values + ")";
}

}  // namespace uvesc
