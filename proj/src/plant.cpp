#include "uvesc/plant.hpp"

#include <string>

#include "uvesc/errors.hpp"

namespace uvesc {

namespace {

void require_dimension(const QuadraticMap& map, std::span<const double> theta) {
  if (theta.size() != map.dimension())
    throw DimensionError("quadratic map of dimension " + std::to_string(map.dimension()) +
                         " evaluated at a vector of length " + std::to_string(theta.size()));
}

}  // namespace

double evaluate_map(const QuadraticMap& map, std::span<const double> theta) {
  require_dimension(map, theta);
  const std::size_t n = theta.size();
  double quad = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double ej = theta[j] - map.theta_star[j];
    double row = 0.0;
    for (std::size_t k = 0; k < n; ++k) row += map.hessian(j, k) * (theta[k] - map.theta_star[k]);
    quad += ej * row;
  }
  return map.q_star + 0.5 * quad;
}

Vector true_gradient(const QuadraticMap& map, std::span<const double> theta) {
  require_dimension(map, theta);
  return map.hessian * subtract(theta, map.theta_star);
}

}  // namespace uvesc
