#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "uvesc/types.hpp"

namespace uvesc {

/// t,theta_1..n,theta_hat_1..n,y,ghat_1..n,u_1..n[,gamma_11..gamma_nn]
std::vector<std::string> trajectory_csv_header(std::size_t n, bool with_gamma);

/// Writes the header and one row per sample, 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);

/// Inverse of write_trajectory_csv. Throws ValidationError on schema mismatch.
Trajectory read_trajectory_csv(std::istream& is);
Trajectory read_trajectory_csv(const std::filesystem::path& path);

}  // namespace uvesc
