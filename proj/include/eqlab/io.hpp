#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <system_error>
#include <vector>

#include "eqlab/core.hpp"
#include "eqlab/dynamics.hpp"
#include "eqlab/eth.hpp"
#include "eqlab/scaling.hpp"

namespace eqlab {

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double value) {
  char buffer[32];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc())
    throw IoError("format_double: conversion failed");
  return std::string(buffer, ptr);
}

/// Writes via a sibling temp file and renames into place, so readers never
/// observe a partially written file.
inline void atomic_write_text(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path dir = path.has_parent_path()
                                        ? path.parent_path()
                                        : std::filesystem::current_path();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);

  std::random_device rd;
  const std::filesystem::path tmp =
      dir / (path.filename().string() + ".tmp." + std::to_string(rd()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("atomic_write_text: cannot open " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp, ec);
      throw IoError("atomic_write_text: write failed for " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("atomic_write_text: rename to " + path.string() + " failed: " + ec.message());
  }
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_text: cannot open " + path.string());
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return content;
}

// ---------------------------------------------------------------------------
// CSV serializations
// ---------------------------------------------------------------------------

inline std::string to_csv(const TimeTrace& trace) {
  std::string out = "t,value\n";
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    out += format_double(trace.times[i]);
    out += ',';
    out += format_double(trace.values[i]);
    out += '\n';
  }
  return out;
}

inline std::string to_csv(const EigenExpectations& expect) {
  std::string out = "E,NE,A_nn\n";
  for (Index n = 0; n < expect.energies.size(); ++n) {
    out += format_double(expect.energies(n));
    out += ',';
    out += format_double(expect.normalized_energies(n));
    out += ',';
    out += format_double(expect.diag_values(n));
    out += '\n';
  }
  return out;
}

inline std::string to_csv(const OffDiagProfile& profile) {
  std::string out = "omega,mean_sq,count\n";
  for (std::size_t b = 0; b < profile.omega_bins.size(); ++b) {
    out += format_double(profile.omega_bins[b]);
    out += ',';
    out += format_double(profile.mean_sq_magnitude[b]);
    out += ',';
    out += std::to_string(profile.counts[b]);
    out += '\n';
  }
  return out;
}

inline std::string to_csv(const SweepResult& sweep) {
  std::string out = "theta,phi,NE,log10_deff\n";
  for (std::size_t it = 0; it < sweep.theta_grid.size(); ++it) {
    for (std::size_t ip = 0; ip < sweep.phi_grid.size(); ++ip) {
      out += format_double(sweep.theta_grid[it]);
      out += ',';
      out += format_double(sweep.phi_grid[ip]);
      out += ',';
      out += format_double(sweep.ne_map(static_cast<Index>(it), static_cast<Index>(ip)));
      out += ',';
      out += format_double(sweep.log_deff_map(static_cast<Index>(it), static_cast<Index>(ip)));
      out += '\n';
    }
  }
  return out;
}

/// One row per (N, phi) pair with the measured effective dimension.
inline std::string deff_table_csv(const BetaCurve& curve) {
  std::string out = "n_sites,phi,deff\n";
  for (Index i = 0; i < curve.deff_table.rows(); ++i) {
    for (Index ip = 0; ip < curve.deff_table.cols(); ++ip) {
      out += std::to_string(curve.n_values[static_cast<std::size_t>(i)]);
      out += ',';
      out += format_double(curve.phi_values[static_cast<std::size_t>(ip)]);
      out += ',';
      out += format_double(curve.deff_table(i, ip));
      out += '\n';
    }
  }
  return out;
}

inline std::string beta_csv(const BetaCurve& curve) {
  std::string out = "phi,beta,beta_stderr,r_squared\n";
  for (std::size_t ip = 0; ip < curve.phi_values.size(); ++ip) {
    const ScalingFit& fit = curve.fits[ip];
    out += format_double(curve.phi_values[ip]);
    out += ',';
    out += format_double(fit.beta);
    out += ',';
    out += format_double(fit.beta_stderr);
    out += ',';
    out += format_double(fit.r_squared);
    out += '\n';
  }
  return out;
}

inline std::string eigenvalues_csv(const Eigen::VectorXd& eigenvalues) {
  std::string out = "index,E\n";
  for (Index n = 0; n < eigenvalues.size(); ++n) {
    out += std::to_string(n);
    out += ',';
    out += format_double(eigenvalues(n));
    out += '\n';
  }
  return out;
}

} // namespace eqlab
