#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "eqlab/core.hpp"
#include "eqlab/eigensolve.hpp"
#include "eqlab/hilbert.hpp"
#include "eqlab/parallel.hpp"
#include "eqlab/states.hpp"

namespace eqlab {

// ---------------------------------------------------------------------------
// Initial-state sweeps over the Bloch angles
// ---------------------------------------------------------------------------

/// Maps over a (theta, phi) grid at fixed size: rows index theta, columns
/// index phi. log_deff_map stores log10 of the effective dimension.
struct SweepResult {
  int n_sites = 0;
  std::vector<double> theta_grid;
  std::vector<double> phi_grid;
  Eigen::MatrixXd ne_map;
  Eigen::MatrixXd log_deff_map;
};

inline constexpr int default_sweep_theta_points = 64;
inline constexpr int default_sweep_phi_points = 64;

/// Uniform grid of `count` points from lo to hi inclusive.
inline std::vector<double> closed_grid(double lo, double hi, int count) {
  if (count < 1) throw InvalidInputError("closed_grid: count must be >= 1");
  std::vector<double> grid(count);
  if (count == 1) {
    grid[0] = lo;
    return grid;
  }
  for (int i = 0; i < count; ++i)
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  return grid;
}

/// Uniform grid of `count` points from lo up to but excluding hi.
inline std::vector<double> half_open_grid(double lo, double hi, int count) {
  if (count < 1) throw InvalidInputError("half_open_grid: count must be >= 1");
  std::vector<double> grid(count);
  for (int i = 0; i < count; ++i)
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count);
  return grid;
}

inline SweepResult sweep_grid(const Spectrum& spectrum, int n_sites,
                              const std::vector<double>& theta_grid,
                              const std::vector<double>& phi_grid, int workers = 1) {
  if (theta_grid.empty() || phi_grid.empty())
    throw InvalidInputError("sweep_grid: grids must be non-empty");
  if (spectrum.dim() != hilbert_dimension(n_sites))
    throw InvalidInputError("sweep_grid: spectrum dimension does not match n_sites");

  SweepResult result;
  result.n_sites = n_sites;
  result.theta_grid = theta_grid;
  result.phi_grid = phi_grid;
  const Index n_theta = static_cast<Index>(theta_grid.size());
  const Index n_phi = static_cast<Index>(phi_grid.size());
  result.ne_map.resize(n_theta, n_phi);
  result.log_deff_map.resize(n_theta, n_phi);

  const ProductOverlapTable table = ProductOverlapTable::build(spectrum, n_sites);
  const Eigen::VectorXd& energies = spectrum.eigenvalues;
  const double width = spectrum.width();
  if (!(width > 0.0)) throw InvalidInputError("sweep_grid: spectrum has zero width");

  parallel_for(n_theta * n_phi, workers, [&](Index flat) {
    const Index it = flat / n_phi;
    const Index ip = flat % n_phi;
    const ProductStateParams params{theta_grid[it], phi_grid[ip], n_sites};
    const Eigen::VectorXcd c = table.overlaps(params);
    const Eigen::VectorXd w = c.cwiseAbs2();
    const double mean_energy = w.dot(energies);
    result.ne_map(it, ip) = (mean_energy - spectrum.e_min()) / width;
    result.log_deff_map(it, ip) = std::log10(effective_dimension(w));
  });
  return result;
}

// ---------------------------------------------------------------------------
// Exponential scaling fit
// ---------------------------------------------------------------------------

/// Least-squares fit of ln d_eff = intercept + beta * N. covariance holds
/// the parameter covariance in (beta, intercept) order; beta_stderr is the
/// square root of its (0, 0) entry.
struct ScalingFit {
  double beta = 0.0;
  double intercept = 0.0;
  double beta_stderr = 0.0;
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();
  double r_squared = 0.0;
  std::vector<int> n_values;
  bool response_degenerate = false;
};

inline ScalingFit fit_exponent(const std::vector<int>& n_values,
                               const std::vector<double>& deff_values) {
  const std::size_t points = n_values.size();
  if (deff_values.size() != points)
    throw InvalidInputError("fit_exponent: size mismatch between n_values and deff_values");
  if (points < 3)
    throw InvalidInputError("fit_exponent: need at least 3 sizes for a slope with stderr");
  for (double d : deff_values)
    if (!(d > 0.0) || !std::isfinite(d))
      throw InvalidInputError("fit_exponent: effective dimensions must be positive");

  const auto n = static_cast<double>(points);
  Eigen::VectorXd x(points), y(points);
  for (std::size_t i = 0; i < points; ++i) {
    x(static_cast<Index>(i)) = static_cast<double>(n_values[i]);
    y(static_cast<Index>(i)) = std::log(deff_values[i]);
  }
  const double x_mean = x.mean();
  const double y_mean = y.mean();
  const Eigen::VectorXd xc = x.array() - x_mean;
  const Eigen::VectorXd yc = y.array() - y_mean;
  const double sxx = xc.squaredNorm();
  if (!(sxx > 0.0))
    throw InvalidInputError("fit_exponent: sizes must not all coincide");

  ScalingFit fit;
  fit.n_values = n_values;
  fit.beta = xc.dot(yc) / sxx;
  fit.intercept = y_mean - fit.beta * x_mean;

  const Eigen::VectorXd residuals = yc - fit.beta * xc;
  const double rss = residuals.squaredNorm();
  const double tss = yc.squaredNorm();
  const double sigma_sq = rss / (n - 2.0);
  fit.covariance(0, 0) = sigma_sq / sxx;
  fit.covariance(0, 1) = fit.covariance(1, 0) = -sigma_sq * x_mean / sxx;
  fit.covariance(1, 1) = sigma_sq * (1.0 / n + x_mean * x_mean / sxx);
  fit.beta_stderr = std::sqrt(fit.covariance(0, 0));
  if (tss > 0.0) {
    fit.r_squared = 1.0 - rss / tss;
  } else {
    fit.response_degenerate = true;
    fit.r_squared = std::numeric_limits<double>::quiet_NaN();
  }
  return fit;
}

// ---------------------------------------------------------------------------
// beta as a function of the initial-state phase
// ---------------------------------------------------------------------------

/// Supplies the spectrum for a chain, letting callers reuse cached
/// diagonalizations across sweeps.
using SpectrumProvider = std::function<std::shared_ptr<const Spectrum>(const ChainSpec&)>;

inline SpectrumProvider direct_provider() {
  return [](const ChainSpec& spec) {
    return std::make_shared<const Spectrum>(diagonalize(build_hamiltonian(spec)));
  };
}

/// d_eff(N, phi) table plus per-phi exponential fits, at fixed theta.
struct BetaCurve {
  double theta = 0.0;
  std::vector<double> phi_values;
  std::vector<int> n_values;
  Eigen::MatrixXd deff_table;
  std::vector<ScalingFit> fits;
};

inline constexpr int default_beta_n_min = 6;
inline constexpr int default_beta_n_max = 13;

inline BetaCurve beta_curve(const ChainSpec& spec_template, double theta,
                            const std::vector<double>& phi_values,
                            const std::vector<int>& n_values,
                            const SpectrumProvider& provider, int workers = 1) {
  if (phi_values.empty()) throw InvalidInputError("beta_curve: phi grid must be non-empty");
  for (std::size_t i = 1; i < phi_values.size(); ++i)
    if (!(phi_values[i] > phi_values[i - 1]))
      throw InvalidInputError("beta_curve: phi grid must be strictly increasing");
  if (n_values.size() < 3)
    throw InvalidInputError("beta_curve: need at least 3 sizes");

  BetaCurve curve;
  curve.theta = theta;
  curve.phi_values = phi_values;
  curve.n_values = n_values;
  const Index n_sizes = static_cast<Index>(n_values.size());
  const Index n_phi = static_cast<Index>(phi_values.size());
  curve.deff_table.resize(n_sizes, n_phi);

  for (Index i = 0; i < n_sizes; ++i) {
    ChainSpec spec = spec_template;
    spec.n_sites = n_values[static_cast<std::size_t>(i)];
    spec.validate();
    const std::shared_ptr<const Spectrum> spectrum = provider(spec);
    if (spectrum->dim() != hilbert_dimension(spec.n_sites))
      throw InvalidInputError("beta_curve: provider returned a mismatched spectrum");
    const ProductOverlapTable table = ProductOverlapTable::build(*spectrum, spec.n_sites);
    parallel_for(n_phi, workers, [&](Index ip) {
      const ProductStateParams params{theta, phi_values[static_cast<std::size_t>(ip)],
                                      spec.n_sites};
      const Eigen::VectorXcd c = table.overlaps(params);
      curve.deff_table(i, ip) = effective_dimension(c.cwiseAbs2());
    });
  }

  curve.fits.reserve(static_cast<std::size_t>(n_phi));
  for (Index ip = 0; ip < n_phi; ++ip) {
    std::vector<double> deff(static_cast<std::size_t>(n_sizes));
    for (Index i = 0; i < n_sizes; ++i) deff[static_cast<std::size_t>(i)] = curve.deff_table(i, ip);
    curve.fits.push_back(fit_exponent(n_values, deff));
  }
  return curve;
}

} // namespace eqlab
