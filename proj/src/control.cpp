#include "uvesc/control.hpp"

namespace uvesc {

namespace {

Vector relay(std::span<const double> v, const Matrix& gain, double guard, double sign) {
  const double nv = norm(v);
  if (!(nv > guard)) return Vector(gain.rows(), 0.0);
  return gain * scaled(v, sign / nv);
}

}  // namespace

Vector uvc_gradient(std::span<const double> g_hat, const Matrix& gain, double guard) {
  return relay(g_hat, gain, guard, 1.0);
}

Vector uvc_newton(std::span<const double> g_hat, const Matrix& gamma, const Matrix& gain, double guard) {
  return relay(gamma * g_hat, gain, guard, -1.0);
}

Vector proportional_gradient(std::span<const double> g_hat, const Matrix& gain) { return gain * g_hat; }

Vector proportional_newton(std::span<const double> g_hat, const Matrix& gamma, const Matrix& gain) {
  return scaled(gain * (gamma * g_hat), -1.0);
}

Vector control_input(const ControllerLaw& law, std::span<const double> g_hat, const Matrix& gamma) {
  switch (law.kind) {
    case LawKind::GradientUVC: return uvc_gradient(g_hat, law.gain, law.relay_guard);
    case LawKind::NewtonUVC: return uvc_newton(g_hat, gamma, law.gain, law.relay_guard);
    case LawKind::GradientProportional: return proportional_gradient(g_hat, law.gain);
    case LawKind::NewtonProportional: return proportional_newton(g_hat, gamma, law.gain);
  }
  return Vector(g_hat.size(), 0.0);
}

}  // namespace uvesc
