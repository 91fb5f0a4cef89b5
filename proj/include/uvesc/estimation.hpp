#pragma once

#include <span>

#include "uvesc/linalg.hpp"
#include "uvesc/types.hpp"

namespace uvesc {

/// Ghat(t) = M(t) y(t).
Vector estimate_gradient(const DitherSpec& spec, double t, double y);

/// Hhat(t) = N(t) y(t).
Matrix estimate_hessian(const DitherSpec& spec, double t, double y);

/// w_r (Gamma - Gamma Hhat Gamma); equilibrium at Gamma = Hhat^-1.
Matrix riccati_rhs(const Matrix& gamma, const Matrix& h_est, double omega_r);

/// Exact split of the demodulated gradient for theta = theta* + theta_tilde + S(t):
///   M y = quadratic_term + (H* + delta_h) theta_tilde + delta
/// delta_h and delta are zero-mean over one common period.
struct GradientDecomposition {
  Matrix delta_h;
  Vector delta;
  Vector quadratic_term;  // M(t) * 1/2 theta_tilde^T H* theta_tilde

  Vector reconstruct(const Matrix& hessian, std::span<const double> theta_tilde) const;
};

/// Exact split of the demodulated Hessian:
///   N y = H* + delta_h_hat + residual_term,  residual_term = N [1/2 tt^T H* tt + S^T H* tt]
struct HessianDecomposition {
  Matrix delta_h_hat;
  Matrix residual_term;

  Matrix reconstruct(const Matrix& hessian) const;
};

/// Evaluates every cosine/sine family of the expansion term by term. Never calls the direct
/// estimators, so it can serve as an independent check on them.
GradientDecomposition gradient_decomposition(const QuadraticMap& map, const DitherSpec& spec,
                                             std::span<const double> theta_tilde, double t);

HessianDecomposition hessian_decomposition(const QuadraticMap& map, const DitherSpec& spec,
                                           std::span<const double> theta_tilde, double t);

}  // namespace uvesc
