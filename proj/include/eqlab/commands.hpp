#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "eqlab/cache.hpp"
#include "eqlab/core.hpp"
#include "eqlab/dynamics.hpp"
#include "eqlab/eigensolve.hpp"
#include "eqlab/eth.hpp"
#include "eqlab/hilbert.hpp"
#include "eqlab/io.hpp"
#include "eqlab/parallel.hpp"
#include "eqlab/runconfig.hpp"
#include "eqlab/scaling.hpp"
#include "eqlab/states.hpp"

namespace eqlab {

inline int resolved_workers(const RunConfig& config) {
  return config.workers > 0 ? config.workers : default_workers();
}

namespace detail {

class WallClock {
 public:
  WallClock() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  atomic_write_text(path, j.dump(2) + "\n");
}

inline void warn_degeneracies(const ChainSpec& spec, const Spectrum& spectrum) {
  const Index count = spectrum.count_degeneracies(default_degeneracy_tolerance);
  if (count > 0)
    std::fprintf(stderr,
                 "warning: N=%d spectrum has %lld degenerate levels (tol %.0e); "
                 "overlap-derived quantities depend on the eigenbasis convention there\n",
                 spec.n_sites, static_cast<long long>(count), default_degeneracy_tolerance);
}

inline std::vector<double> uniform_times(double t_max, double dt) {
  const auto count = static_cast<Index>(std::floor(t_max / dt + 1e-9)) + 1;
  std::vector<double> times(static_cast<std::size_t>(count));
  for (Index i = 0; i < count; ++i) times[static_cast<std::size_t>(i)] = static_cast<double>(i) * dt;
  return times;
}

} // namespace detail

// ---------------------------------------------------------------------------
// spectrum: eigenvalues plus gap-degeneracy diagnostics
// ---------------------------------------------------------------------------

inline void cmd_spectrum(const RunConfig& config) {
  const detail::WallClock clock;
  const int workers = resolved_workers(config);
  const std::filesystem::path out = config.output_dir;

  const std::shared_ptr<const Spectrum> spectrum =
      caching_provider(config.cache_dir)(config.model);
  detail::warn_degeneracies(config.model, *spectrum);

  const GapReport gaps =
      gap_diagnostics(*spectrum, config.spectrum.gap_tolerance,
                      config.spectrum.gap_max_dimension, config.spectrum.gap_samples,
                      config.seed);

  atomic_write_text(out / "eigenvalues.csv", eigenvalues_csv(spectrum->eigenvalues));
  nlohmann::json report;
  report["dim"] = spectrum->dim();
  report["e_min"] = spectrum->e_min();
  report["e_max"] = spectrum->e_max();
  report["width"] = spectrum->width();
  report["residual"] = spectrum->residual;
  report["degeneracy_count"] = spectrum->count_degeneracies(config.spectrum.gap_tolerance);
  report["degenerate_gap_count"] = gaps.degenerate_gap_count;
  report["gap_tolerance"] = gaps.tolerance;
  report["pairs_examined"] = gaps.pairs_examined;
  report["sampled"] = gaps.sampled;
  detail::write_json(out / "gap_report.json", report);
  detail::write_json(out / "manifest.json",
                     make_manifest("spectrum", config, workers, clock.seconds()));
}

// ---------------------------------------------------------------------------
// evolve: magnetization time trace plus equilibration summary
// ---------------------------------------------------------------------------

inline void cmd_evolve(const RunConfig& config) {
  const detail::WallClock clock;
  const int workers = resolved_workers(config);
  const std::filesystem::path out = config.output_dir;

  const std::shared_ptr<const Spectrum> spectrum =
      caching_provider(config.cache_dir)(config.model);
  detail::warn_degeneracies(config.model, *spectrum);
  const HermitianOperator mz = build_magnetization(config.model.n_sites);

  Eigen::VectorXcd coefficients;
  if (config.evolve.eigenstate_index) {
    const Index k = *config.evolve.eigenstate_index;
    if (k < 0 || k >= spectrum->dim())
      throw InvalidInputError("cmd_evolve: eigenstate_index out of range");
    coefficients = Eigen::VectorXcd::Zero(spectrum->dim());
    coefficients(k) = 1.0;
  } else {
    const ProductStateParams params{config.evolve.theta, config.evolve.phi,
                                    config.model.n_sites};
    coefficients = overlap_coefficients(product_state(params), *spectrum);
  }

  const std::vector<double> times =
      detail::uniform_times(config.evolve.t_max, config.evolve.dt);
  const TimeTrace trace = evolve_expectation(coefficients, *spectrum, mz, times, workers);
  atomic_write_text(out / "trace.csv", to_csv(trace));

  const Eigen::VectorXd weights = coefficients.cwiseAbs2();
  const double d_eff = effective_dimension(weights);
  const double mean_energy = weights.dot(spectrum->eigenvalues);

  nlohmann::json summary;
  summary["d_eff"] = d_eff;
  summary["normalized_energy"] = (mean_energy - spectrum->e_min()) / spectrum->width();
  summary["time_average"] = time_average(trace);
  summary["operator_norm"] = mz.spectral_norm();
  summary["fluctuation_bound"] = fluctuation_bound(mz, d_eff).bound;
  summary["degeneracy_count"] = spectrum->count_degeneracies(default_degeneracy_tolerance);
  if (spectrum->dim() <= max_energy_basis_dimension) {
    const Eigen::MatrixXcd mz_energy = energy_basis_matrix(*spectrum, mz);
    summary["diagonal_average"] =
        diagonal_average(weights, mz_energy.diagonal().real());
    summary["exact_fluctuation"] = exact_fluctuation(weights, mz_energy);
  }
  detail::write_json(out / "summary.json", summary);
  detail::write_json(out / "manifest.json",
                     make_manifest("evolve", config, workers, clock.seconds()));
}

// ---------------------------------------------------------------------------
// sweep: NE and log10 d_eff over the (theta, phi) grid
// ---------------------------------------------------------------------------

inline void cmd_sweep(const RunConfig& config) {
  const detail::WallClock clock;
  const int workers = resolved_workers(config);
  const std::filesystem::path out = config.output_dir;

  const std::shared_ptr<const Spectrum> spectrum =
      caching_provider(config.cache_dir)(config.model);
  detail::warn_degeneracies(config.model, *spectrum);

  const std::vector<double> theta_grid =
      closed_grid(0.0, 3.141592653589793, config.sweep.n_theta);
  const std::vector<double> phi_grid =
      half_open_grid(0.0, 2.0 * 3.141592653589793, config.sweep.n_phi);
  const SweepResult result =
      sweep_grid(*spectrum, config.model.n_sites, theta_grid, phi_grid, workers);
  atomic_write_text(out / "sweep.csv", to_csv(result));

  nlohmann::json manifest = make_manifest("sweep", config, workers, clock.seconds());
  manifest["grid"] = {{"theta", theta_grid}, {"phi", phi_grid}};
  detail::write_json(out / "manifest.json", manifest);
}

// ---------------------------------------------------------------------------
// scaling: d_eff versus N per phi, with exponential fits
// ---------------------------------------------------------------------------

inline void cmd_scaling(const RunConfig& config) {
  const detail::WallClock clock;
  const int workers = resolved_workers(config);
  const std::filesystem::path out = config.output_dir;

  const std::vector<double> phi_grid = config.scaling.effective_phi_grid();
  const std::vector<int> n_values = config.scaling.n_range();

  BetaCurve curve;
  if (config.scaling.synthetic_beta) {
    curve.theta = config.scaling.theta;
    curve.phi_values = phi_grid;
    curve.n_values = n_values;
    curve.deff_table.resize(static_cast<Index>(n_values.size()),
                            static_cast<Index>(phi_grid.size()));
    for (Index i = 0; i < curve.deff_table.rows(); ++i)
      for (Index ip = 0; ip < curve.deff_table.cols(); ++ip)
        curve.deff_table(i, ip) =
            std::exp(*config.scaling.synthetic_beta * n_values[static_cast<std::size_t>(i)]);
    for (Index ip = 0; ip < curve.deff_table.cols(); ++ip) {
      std::vector<double> deff(n_values.size());
      for (Index i = 0; i < curve.deff_table.rows(); ++i)
        deff[static_cast<std::size_t>(i)] = curve.deff_table(i, ip);
      curve.fits.push_back(fit_exponent(n_values, deff));
    }
  } else {
    const SpectrumProvider provider = caching_provider(config.cache_dir);
    const SpectrumProvider warning_provider = [&](const ChainSpec& spec) {
      std::shared_ptr<const Spectrum> spectrum = provider(spec);
      detail::warn_degeneracies(spec, *spectrum);
      return spectrum;
    };
    curve = beta_curve(config.model, config.scaling.theta, phi_grid, n_values,
                       warning_provider, workers);
  }

  atomic_write_text(out / "deff_table.csv", deff_table_csv(curve));
  atomic_write_text(out / "beta.csv", beta_csv(curve));
  detail::write_json(out / "manifest.json",
                     make_manifest("scaling", config, workers, clock.seconds()));
}

// ---------------------------------------------------------------------------
// eth: eigenstate expectations, shell average, nullity certificate
// ---------------------------------------------------------------------------

inline void cmd_eth(const RunConfig& config) {
  const detail::WallClock clock;
  const int workers = resolved_workers(config);
  const std::filesystem::path out = config.output_dir;

  const std::shared_ptr<const Spectrum> spectrum =
      caching_provider(config.cache_dir)(config.model);
  detail::warn_degeneracies(config.model, *spectrum);

  const bool identity = config.eth.observable == "identity";
  const HermitianOperator observable =
      identity ? HermitianOperator::diagonal(
                     Eigen::VectorXd::Ones(hilbert_dimension(config.model.n_sites)))
               : build_magnetization(config.model.n_sites);

  const EigenExpectations expect = eigenstate_expectations(*spectrum, observable);
  atomic_write_text(out / "eigen_expectations.csv", to_csv(expect));

  const double half_width = config.eth.shell_half_width_fraction * spectrum->width();
  const MicrocanonicalShell shell =
      microcanonical_shell(expect, config.eth.shell_center, half_width);

  nlohmann::json summary;
  summary["observable"] = config.eth.observable;
  summary["shell_center"] = shell.center_energy;
  summary["shell_half_width"] = shell.half_width;
  summary["shell_member_count"] = shell.member_count;
  summary["shell_average"] = microcanonical_average(expect, shell);
  summary["degeneracy_count"] = spectrum->count_degeneracies(default_degeneracy_tolerance);

  if (!identity) {
    const ParityY parity = build_parity_y(config.model.n_sites);
    const NullityReport report =
        certify_nullity(*spectrum, parity, observable, config.eth.nullity_tolerance);
    summary["nullity"] = {{"h_symmetry_defect", report.h_symmetry_defect},
                          {"a_antisymmetry_defect", report.a_antisymmetry_defect},
                          {"degenerate_level_count", report.degenerate_levels.size()},
                          {"certified_count", report.certified_count},
                          {"max_abs_diag_nondegenerate", report.max_abs_diag_nondegenerate},
                          {"worst_level", report.worst_level},
                          {"tolerance", report.tolerance},
                          {"all_null", report.all_null}};
  }
  detail::write_json(out / "microcanonical.json", summary);

  if (config.eth.offdiag) {
    const OffDiagConfig& od = *config.eth.offdiag;
    const double lo = spectrum->e_min() + od.window_lo_ne * spectrum->width();
    const double hi = spectrum->e_min() + od.window_hi_ne * spectrum->width();
    const OffDiagProfile profile =
        offdiagonal_stats(*spectrum, observable, {lo, hi}, od.bin_width);
    atomic_write_text(out / "offdiag.csv", to_csv(profile));
  }

  detail::write_json(out / "manifest.json",
                     make_manifest("eth", config, workers, clock.seconds()));
}

} // namespace eqlab
