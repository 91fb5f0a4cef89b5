#pragma once

#include <span>

#include "uvesc/linalg.hpp"
#include "uvesc/types.hpp"

namespace uvesc {

/// y = Q* + 1/2 (theta - theta*)^T H* (theta - theta*).
double evaluate_map(const QuadraticMap& map, std::span<const double> theta);

/// Analytic gradient H* (theta - theta*). Test oracle only.
Vector true_gradient(const QuadraticMap& map, std::span<const double> theta);

}  // namespace uvesc
