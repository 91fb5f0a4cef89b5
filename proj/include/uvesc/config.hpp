#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "uvesc/types.hpp"

namespace uvesc {

/// A scenario file: one SimConfig plus the averaged-system options and any parse warnings.
struct Scenario {
  SimConfig sim;
  double boundary_layer = 1e-6;
  bool default_dt = false;  // dt was not given and was derived from the dither period
  std::vector<std::string> warnings;
};

/// Parses the TOML subset used by scenario files: [map], [dither], [law], [sim] sections holding
/// `key = value` lines, where values are numbers, quoted strings or (nested, possibly multi-line)
/// arrays. `#` starts a comment. Unknown sections or keys are errors.
///
/// [map]    q_star, theta_star, hessian
/// [dither] amplitudes, ratios (numbers or "p/q" strings), base_omega; delta, omega_l, omega_h are
///          accepted but unused and produce a warning
/// [law]    kind, gain (matrix or scalar times I), riccati_ratio (times base_omega) or riccati_rate,
///          gamma0 (matrix or scalar times I), relay_guard
/// [sim]    theta_tilde0 or theta_hat0, t_end, dt (default T/2000), sample_every, boundary_layer
Scenario parse_scenario(std::string_view text, const std::string& source = "<string>");
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace uvesc
