#include "uvesc/types.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "uvesc/errors.hpp"

namespace uvesc {

namespace {

std::int64_t parse_integer(std::string_view digits, std::string_view whole) {
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
    throw ValidationError("parse_rational: not a rational number: '" + std::string(whole) + "'");
  }
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string_view s = trim(text);
  if (s.empty()) throw ValidationError("parse_rational: empty input");
  if (const auto slash = s.find('/'); slash != std::string_view::npos) {
    const std::int64_t num = parse_integer(trim(s.substr(0, slash)), s);
    const std::int64_t den = parse_integer(trim(s.substr(slash + 1)), s);
    if (den == 0) throw ValidationError("parse_rational: zero denominator in '" + std::string(s) + "'");
    return Rational(num, den);
  }
  if (const auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = s.substr(0, dot);
    const std::string_view frac_part = s.substr(dot + 1);
    bool negative = false;
    if (!int_part.empty() && (int_part.front() == '-' || int_part.front() == '+')) {
      negative = int_part.front() == '-';
      int_part.remove_prefix(1);
    }
    if (frac_part.size() > 15) throw ValidationError("parse_rational: too many decimals in '" + std::string(s) + "'");
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac_part.size(); ++i) den *= 10;
    const std::int64_t ip = int_part.empty() ? 0 : parse_integer(int_part, s);
    const std::int64_t fp = frac_part.empty() ? 0 : parse_integer(frac_part, s);
    const Rational r(ip * den + fp, den);
    return negative ? -r : r;
  }
  return Rational(parse_integer(s, s));
}

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

void QuadraticMap::validate(double det_floor) const {
  const std::size_t n = theta_star.size();
  if (n == 0) throw ValidationError("QuadraticMap: empty theta_star");
  if (hessian.rows() != n || hessian.cols() != n) throw DimensionError("QuadraticMap: hessian must be n x n");
  if (!is_symmetric(hessian, 1e-12)) throw ValidationError("QuadraticMap: hessian is not symmetric");
  if (!(std::abs(determinant(hessian)) > det_floor)) throw SingularMatrixError("QuadraticMap: hessian is singular");
}

Vector DitherSpec::frequencies() const {
  Vector w(ratios.size());
  for (std::size_t i = 0; i < ratios.size(); ++i) w[i] = boost::rational_cast<double>(ratios[i]) * base_omega;
  return w;
}

void DitherSpec::validate() const {
  if (amplitudes.empty()) throw ValidationError("DitherSpec: no channels");
  if (amplitudes.size() != ratios.size()) throw DimensionError("DitherSpec: amplitudes and ratios differ in length");
  if (!(base_omega > 0.0) || !std::isfinite(base_omega)) throw ValidationError("DitherSpec: base_omega must be positive");
  for (std::size_t i = 0; i < amplitudes.size(); ++i) {
    if (!(amplitudes[i] > 0.0) || !std::isfinite(amplitudes[i]))
      throw ValidationError("DitherSpec: amplitude " + std::to_string(i + 1) + " must be positive");
    if (ratios[i] <= 0) throw ValidationError("DitherSpec: ratio " + std::to_string(i + 1) + " must be positive");
    for (std::size_t j = 0; j < i; ++j)
      if (ratios[i] == ratios[j])
        throw ValidationError("DitherSpec: ratios " + std::to_string(j + 1) + " and " + std::to_string(i + 1) +
                              " coincide");
  }
}

std::string_view to_string(LawKind kind) {
  switch (kind) {
    case LawKind::GradientUVC: return "gradient-uvc";
    case LawKind::NewtonUVC: return "newton-uvc";
    case LawKind::GradientProportional: return "gradient-prop";
    case LawKind::NewtonProportional: return "newton-prop";
  }
  return "unknown";
}

LawKind parse_law_kind(std::string_view text) {
  for (LawKind k : {LawKind::GradientUVC, LawKind::NewtonUVC, LawKind::GradientProportional,
                    LawKind::NewtonProportional}) {
    if (to_string(k) == text) return k;
  }
  throw ValidationError("unknown scheme '" + std::string(text) +
                        "' (expected gradient-uvc, newton-uvc, gradient-prop or newton-prop)");
}

void ControllerLaw::validate(std::size_t n, double det_floor) const {
  if (gain.rows() != n || gain.cols() != n) throw DimensionError("ControllerLaw: gain must be n x n");
  if (!(relay_guard > 0.0)) throw ValidationError("ControllerLaw: relay_guard must be positive");
  if (is_newton(kind)) {
    if (!(riccati_rate > 0.0)) throw ValidationError("ControllerLaw: Newton kinds need riccati_rate > 0");
    if (gamma0.rows() != n || gamma0.cols() != n) throw DimensionError("ControllerLaw: gamma0 must be n x n");
    if (!(std::abs(determinant(gamma0)) > det_floor))
      throw SingularMatrixError("ControllerLaw: gamma0 is singular (Gamma = 0 is invariant under the Riccati flow)");
  }
}

void Trajectory::reserve(std::size_t n, bool with_gamma) {
  times.reserve(n);
  theta_hat.reserve(n);
  theta.reserve(n);
  y.reserve(n);
  g_hat.reserve(n);
  u.reserve(n);
  if (with_gamma) gamma.reserve(n);
}

void Trajectory::validate(double spacing_rel_tol) const {
  const std::size_t n = times.size();
  if (theta_hat.size() != n || theta.size() != n || y.size() != n || g_hat.size() != n || u.size() != n)
    throw ValidationError("Trajectory: series lengths differ");
  if (!gamma.empty() && gamma.size() != n) throw ValidationError("Trajectory: gamma length differs");
  if (n < 2) return;
  const double h = times[1] - times[0];
  if (!(h > 0.0)) throw ValidationError("Trajectory: times not increasing");
  for (std::size_t k = 1; k < n; ++k) {
    const double step = times[k] - times[k - 1];
    if (!(step > 0.0)) throw ValidationError("Trajectory: times not strictly increasing");
    if (std::abs(step - h) > spacing_rel_tol * std::max(1.0, std::abs(times[k])))
      throw ValidationError("Trajectory: non-uniform sample spacing");
  }
}

double LyapunovCertificate::residual() const {
  return frobenius_norm(a_matrix.transposed() * p_matrix + p_matrix * a_matrix + q_matrix);
}

}  // namespace uvesc
