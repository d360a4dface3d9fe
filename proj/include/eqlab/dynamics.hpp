#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "eqlab/core.hpp"
#include "eqlab/eigensolve.hpp"
#include "eqlab/hilbert.hpp"
#include "eqlab/parallel.hpp"

namespace eqlab {

/// Sampled expectation values <A(t)>. Times are strictly increasing, in
/// units of 1/J.
struct TimeTrace {
  std::vector<double> times;
  std::vector<double> values;
};

/// Largest dimension for which the dense energy-basis observable matrix is
/// built (memory for V^dag A V plus workspace stays below ~0.5 GiB).
inline constexpr Index max_energy_basis_dimension = 4096;

/// A_energy = V^dag A V. Computed once per (spectrum, A) pair and reused by
/// whoever needs all matrix elements; O(D^3) once beats re-evaluating the
/// dephasing double sum per time point.
inline Eigen::MatrixXcd energy_basis_matrix(const Spectrum& spectrum,
                                            const HermitianOperator& a) {
  if (a.dim() != spectrum.dim())
    throw InvalidInputError("energy_basis_matrix: dimension mismatch");
  const Index dim = spectrum.dim();
  if (dim > max_energy_basis_dimension)
    throw CapabilityError("energy_basis_matrix: dimension " + std::to_string(dim) +
                          " exceeds the dense limit " +
                          std::to_string(max_energy_basis_dimension));
  Eigen::MatrixXcd av(dim, dim);
  switch (a.storage()) {
    case HermitianOperator::Storage::diagonal:
      av = a.diagonal_values().cast<Complex>().asDiagonal() * spectrum.eigenvectors;
      break;
    case HermitianOperator::Storage::sparse: {
      const auto& entries = a.entries();
      av.setZero();
      for (Index n = 0; n < dim; ++n) {
        auto column = av.col(n);
        for (const auto& e : entries)
          column(static_cast<Index>(e.row)) +=
              e.value * spectrum.eigenvectors(static_cast<Index>(e.col), n);
      }
      break;
    }
    case HermitianOperator::Storage::dense:
      av = a.to_dense() * spectrum.eigenvectors;
      break;
  }
  return spectrum.eigenvectors.adjoint() * av;
}

/// <A(t)> on a time grid, by dephasing in the energy basis: the energy-basis
/// amplitudes c_n e^{-i E_n t} are rotated back to the computational basis
/// and the expectation evaluated there (O(D) for diagonal A, O(nnz) sparse).
inline TimeTrace evolve_expectation(const Eigen::VectorXcd& coefficients,
                                    const Spectrum& spectrum, const HermitianOperator& a,
                                    const std::vector<double>& times, int workers = 1) {
  const Index dim = spectrum.dim();
  if (coefficients.size() != dim || a.dim() != dim)
    throw InvalidInputError("evolve_expectation: dimension mismatch");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]))
      throw InvalidInputError("evolve_expectation: non-finite time");
    if (i > 0 && !(times[i] > times[i - 1]))
      throw InvalidInputError("evolve_expectation: times must be strictly increasing");
  }

  const double norm_a = a.spectral_norm();
  TimeTrace trace;
  trace.times = times;
  trace.values.assign(times.size(), 0.0);

  parallel_for(static_cast<Index>(times.size()), workers, [&](Index i) {
    const double t = times[static_cast<std::size_t>(i)];
    Eigen::VectorXcd phased(dim);
    for (Index n = 0; n < dim; ++n)
      phased(n) = coefficients(n) * std::polar(1.0, -spectrum.eigenvalues(n) * t);
    const Eigen::VectorXcd psi_t = spectrum.eigenvectors * phased;
    const double norm_drift = std::abs(psi_t.norm() - 1.0);
    if (norm_drift > 1e-10)
      throw NumericalError("evolve_expectation: state norm drifted by " +
                               std::to_string(norm_drift),
                           norm_drift);
    const Complex value = a.expectation(psi_t);
    if (std::abs(value.imag()) > 1e-10 * std::max(norm_a, 1e-300))
      throw NumericalError("evolve_expectation: non-real expectation, imaginary part " +
                               std::to_string(value.imag()),
                           std::abs(value.imag()));
    trace.values[static_cast<std::size_t>(i)] = value.real();
  });
  return trace;
}

/// Trapezoidal average over the sampled window; a finite-T estimator of the
/// infinite-time average.
inline double time_average(const TimeTrace& trace) {
  const std::size_t n = trace.times.size();
  if (n != trace.values.size())
    throw InvalidInputError("time_average: times and values differ in length");
  if (n < 2) throw InvalidInputError("time_average: need at least 2 samples");
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double dt = trace.times[i + 1] - trace.times[i];
    if (!(dt > 0.0)) throw InvalidInputError("time_average: times must be strictly increasing");
    integral += 0.5 * (trace.values[i] + trace.values[i + 1]) * dt;
  }
  return integral / (trace.times.back() - trace.times.front());
}

/// Infinite-time average of the squared fluctuation under non-degenerate
/// gaps: sum_{n != m} w_n w_m |A_nm|^2. Equals Tr(rho_bar A rho_bar A) minus
/// the diagonal contribution.
inline double exact_fluctuation(const Eigen::VectorXd& weights,
                                const Eigen::MatrixXcd& a_energy) {
  const Index dim = weights.size();
  if (a_energy.rows() != dim || a_energy.cols() != dim)
    throw InvalidInputError("exact_fluctuation: dimension mismatch");
  if (dim > max_energy_basis_dimension)
    throw CapabilityError("exact_fluctuation: dimension " + std::to_string(dim) +
                          " exceeds the supported limit " +
                          std::to_string(max_energy_basis_dimension));
  const double total = weights.sum();
  if (std::abs(total - 1.0) > 1e-10)
    throw InvalidInputError("exact_fluctuation: weights must sum to 1, got " +
                            std::to_string(total));
  double full = 0.0;
  for (Index m = 0; m < dim; ++m)
    full += weights(m) * a_energy.col(m).cwiseAbs2().dot(weights);
  double diagonal_part = 0.0;
  for (Index n = 0; n < dim; ++n)
    diagonal_part += weights(n) * weights(n) * std::norm(a_energy(n, n));
  return std::max(0.0, full - diagonal_part);
}

/// The rigorous bound on the time-averaged squared fluctuation together with
/// the quantities entering it. The dimensionally consistent form uses the
/// squared operator norm; the norm is recorded so the unsquared variant can
/// be derived by a consumer.
struct FluctuationReport {
  double exact_variance = std::numeric_limits<double>::quiet_NaN();
  double bound = 0.0;
  double d_eff = 1.0;
  double operator_norm = 0.0;
};

inline FluctuationReport fluctuation_bound(
    const HermitianOperator& a, double d_eff,
    double exact_variance = std::numeric_limits<double>::quiet_NaN()) {
  if (!(d_eff >= 1.0))
    throw InvalidInputError("fluctuation_bound: d_eff must be >= 1, got " +
                            std::to_string(d_eff));
  FluctuationReport report;
  report.operator_norm = a.spectral_norm();
  report.d_eff = d_eff;
  report.bound = report.operator_norm * report.operator_norm / d_eff;
  report.exact_variance = exact_variance;
  return report;
}

} // namespace eqlab
