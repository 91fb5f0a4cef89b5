#pragma once

#include <span>

#include "uvesc/linalg.hpp"
#include "uvesc/types.hpp"

namespace uvesc {

/// u = K Ghat / ||Ghat||; zero when ||Ghat|| <= guard.
Vector uvc_gradient(std::span<const double> g_hat, const Matrix& gain, double guard);

/// u = -K Gamma Ghat / ||Gamma Ghat||; zero when ||Gamma Ghat|| <= guard.
Vector uvc_newton(std::span<const double> g_hat, const Matrix& gamma, const Matrix& gain, double guard);

/// Classical baselines: u = K Ghat and u = -K Gamma Ghat.
Vector proportional_gradient(std::span<const double> g_hat, const Matrix& gain);
Vector proportional_newton(std::span<const double> g_hat, const Matrix& gamma, const Matrix& gain);

/// Dispatches on law.kind. gamma is ignored for gradient kinds.
Vector control_input(const ControllerLaw& law, std::span<const double> g_hat, const Matrix& gamma);

}  // namespace uvesc
