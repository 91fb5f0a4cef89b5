#include "uvesc/trajectory_csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "uvesc/errors.hpp"

namespace uvesc {

namespace {

void put(std::string& line, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  if (!line.empty()) line += ',';
  line += buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    out.push_back(cell);
  }
  return out;
}

double to_double(const std::string& s, std::size_t row) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    // from_chars rejects "inf"/"nan" spellings from printf on some libraries
    if (s == "nan" || s == "-nan") return std::nan("");
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    throw ValidationError("trajectory csv row " + std::to_string(row) + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

std::vector<std::string> trajectory_csv_header(std::size_t n, bool with_gamma) {
  std::vector<std::string> h{"t"};
  for (const char* name : {"theta", "theta_hat"})
    for (std::size_t i = 1; i <= n; ++i) h.push_back(std::string(name) + "_" + std::to_string(i));
  h.push_back("y");
  for (const char* name : {"ghat", "u"})
    for (std::size_t i = 1; i <= n; ++i) h.push_back(std::string(name) + "_" + std::to_string(i));
  if (with_gamma)
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t j = 1; j <= n; ++j) h.push_back("gamma_" + std::to_string(i) + std::to_string(j));
  return h;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const std::size_t n = traj.dimension();
  const auto header = trajectory_csv_header(n, traj.has_gamma());
  for (std::size_t c = 0; c < header.size(); ++c) os << (c ? "," : "") << header[c];
  os << '\n';
  std::string line;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    line.clear();
    put(line, traj.times[k]);
    for (double v : traj.theta[k]) put(line, v);
    for (double v : traj.theta_hat[k]) put(line, v);
    put(line, traj.y[k]);
    for (double v : traj.g_hat[k]) put(line, v);
    for (double v : traj.u[k]) put(line, v);
    if (traj.has_gamma())
      for (double v : traj.gamma[k].data()) put(line, v);
    os << line << '\n';
  }
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open " + path.string() + " for writing");
  write_trajectory_csv(out, traj);
  if (!out) throw Error("write to " + path.string() + " failed");
}

Trajectory read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ValidationError("trajectory csv: missing header");
  const auto header = split(line);
  // header size is 2 + 4n or 2 + 4n + n^2
  std::size_t n = 0;
  bool with_gamma = false;
  for (std::size_t cand = 1; cand <= 64; ++cand) {
    if (header == trajectory_csv_header(cand, false)) {
      n = cand;
      break;
    }
    if (header == trajectory_csv_header(cand, true)) {
      n = cand;
      with_gamma = true;
      break;
    }
  }
  if (n == 0) throw ValidationError("trajectory csv: header does not match the trajectory schema");

  Trajectory traj;
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line);
    if (cells.size() != header.size())
      throw ValidationError("trajectory csv row " + std::to_string(row) + ": expected " +
                            std::to_string(header.size()) + " fields, got " + std::to_string(cells.size()));
    std::size_t c = 0;
    auto take = [&](std::size_t count) {
      Vector v(count);
      for (auto& x : v) x = to_double(cells[c++], row);
      return v;
    };
    traj.times.push_back(take(1)[0]);
    traj.theta.push_back(take(n));
    traj.theta_hat.push_back(take(n));
    traj.y.push_back(take(1)[0]);
    traj.g_hat.push_back(take(n));
    traj.u.push_back(take(n));
    if (with_gamma) {
      const Vector g = take(n * n);
      Matrix m(n, n);
      std::copy(g.begin(), g.end(), m.data().begin());
      traj.gamma.push_back(m);
    }
  }
  return traj;
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return read_trajectory_csv(in);
}

}  // namespace uvesc
