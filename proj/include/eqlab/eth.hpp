#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "eqlab/core.hpp"
#include "eqlab/dynamics.hpp"
#include "eqlab/eigensolve.hpp"
#include "eqlab/hilbert.hpp"

namespace eqlab {

// ---------------------------------------------------------------------------
// Eigenstate expectation values
// ---------------------------------------------------------------------------

/// Per-eigenstate diagonal matrix elements A_nn = <E_n|A|E_n>, with each
/// level's normalized energy (E_n - E_min) / (E_max - E_min) for plotting
/// against the spectrum position.
struct EigenExpectations {
  Eigen::VectorXd energies;
  Eigen::VectorXd diag_values;
  Eigen::VectorXd normalized_energies;
};

inline EigenExpectations eigenstate_expectations(const Spectrum& spectrum,
                                                 const HermitianOperator& a) {
  const Index dim = spectrum.dim();
  if (a.dim() != dim)
    throw InvalidInputError("eigenstate_expectations: dimension mismatch");
  EigenExpectations result;
  result.energies = spectrum.eigenvalues;
  result.diag_values.resize(dim);
  if (a.storage() == HermitianOperator::Storage::diagonal) {
    const Eigen::VectorXd& d = a.diagonal_values();
    for (Index n = 0; n < dim; ++n)
      result.diag_values(n) = d.dot(spectrum.eigenvectors.col(n).cwiseAbs2());
  } else {
    for (Index n = 0; n < dim; ++n)
      result.diag_values(n) = a.expectation(spectrum.eigenvectors.col(n)).real();
  }
  const double width = spectrum.width();
  if (width > 0.0) {
    result.normalized_energies = (result.energies.array() - spectrum.e_min()) / width;
  } else {
    result.normalized_energies = Eigen::VectorXd::Zero(dim);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Microcanonical shell
// ---------------------------------------------------------------------------

/// Energy shell [center - half_width, center + half_width]; member_count is
/// the number of levels inside (d_{E_0}).
struct MicrocanonicalShell {
  double center_energy = 0.0;
  double half_width = 0.0;
  Index member_count = 0;
};

/// Shell half-width that is small against the spectral width yet holds many
/// levels at accessible sizes.
inline constexpr double default_shell_width_fraction = 0.05;

inline MicrocanonicalShell microcanonical_shell(const EigenExpectations& expect,
                                                double center_energy, double half_width) {
  if (!(half_width > 0.0))
    throw InvalidInputError("microcanonical_shell: half_width must be > 0");
  MicrocanonicalShell shell{center_energy, half_width, 0};
  for (Index n = 0; n < expect.energies.size(); ++n)
    if (std::abs(expect.energies(n) - center_energy) <= half_width) ++shell.member_count;
  return shell;
}

/// Unweighted mean of A_nn over shell members, i.e. Tr(rho_micro A).
inline double microcanonical_average(const EigenExpectations& expect,
                                     const MicrocanonicalShell& shell) {
  double sum = 0.0;
  Index members = 0;
  for (Index n = 0; n < expect.energies.size(); ++n) {
    if (std::abs(expect.energies(n) - shell.center_energy) <= shell.half_width) {
      sum += expect.diag_values(n);
      ++members;
    }
  }
  if (members == 0)
    throw InvalidInputError("microcanonical_average: no levels inside the shell");
  return sum / static_cast<double>(members);
}

// ---------------------------------------------------------------------------
// Off-diagonal matrix-element statistics
// ---------------------------------------------------------------------------

/// |A_nm|^2 binned by gap magnitude omega = |E_n - E_m| for eigenpairs whose
/// mean energy lies in a window. Bin i covers [i w, (i+1) w); omega_bins
/// holds the centers.
struct OffDiagProfile {
  std::vector<double> omega_bins;
  std::vector<double> mean_sq_magnitude;
  std::vector<std::int64_t> counts;
};

inline constexpr double default_offdiag_bin_width = 0.1;

inline OffDiagProfile offdiagonal_stats(const Spectrum& spectrum,
                                        const Eigen::MatrixXcd& a_energy,
                                        std::pair<double, double> energy_window,
                                        double bin_width) {
  const Index dim = spectrum.dim();
  if (a_energy.rows() != dim || a_energy.cols() != dim)
    throw InvalidInputError("offdiagonal_stats: dimension mismatch");
  if (!(bin_width > 0.0))
    throw InvalidInputError("offdiagonal_stats: bin_width must be > 0");
  const auto [lo, hi] = energy_window;
  if (!(lo <= hi))
    throw InvalidInputError("offdiagonal_stats: window must satisfy lo <= hi");
  if (lo < spectrum.e_min() - 1e-12 || hi > spectrum.e_max() + 1e-12)
    throw InvalidInputError("offdiagonal_stats: window outside the spectrum range");

  const int n_bins = static_cast<int>(std::floor(spectrum.width() / bin_width)) + 1;
  OffDiagProfile profile;
  profile.omega_bins.resize(n_bins);
  for (int b = 0; b < n_bins; ++b) profile.omega_bins[b] = (b + 0.5) * bin_width;
  profile.mean_sq_magnitude.assign(n_bins, 0.0);
  profile.counts.assign(n_bins, 0);

  for (Index m = 1; m < dim; ++m) {
    for (Index n = 0; n < m; ++n) {
      const double mean_energy = 0.5 * (spectrum.eigenvalues(n) + spectrum.eigenvalues(m));
      if (mean_energy < lo || mean_energy > hi) continue;
      const double omega = spectrum.eigenvalues(m) - spectrum.eigenvalues(n);
      const int b = std::min(n_bins - 1, static_cast<int>(omega / bin_width));
      profile.mean_sq_magnitude[b] += std::norm(a_energy(n, m));
      ++profile.counts[b];
    }
  }
  for (int b = 0; b < n_bins; ++b)
    if (profile.counts[b] > 0)
      profile.mean_sq_magnitude[b] /= static_cast<double>(profile.counts[b]);
  return profile;
}

inline OffDiagProfile offdiagonal_stats(const Spectrum& spectrum, const HermitianOperator& a,
                                        std::pair<double, double> energy_window,
                                        double bin_width) {
  return offdiagonal_stats(spectrum, energy_basis_matrix(spectrum, a), energy_window,
                           bin_width);
}

// ---------------------------------------------------------------------------
// Symmetry certification of null eigenstate expectations
// ---------------------------------------------------------------------------

/// Outcome of checking that a symmetry R with R H R^dag = H and
/// R A R^dag = -A forces A_nn = 0 on every non-degenerate level.
struct NullityReport {
  double h_symmetry_defect = 0.0;
  double a_antisymmetry_defect = 0.0;
  std::vector<Index> degenerate_levels;
  Index certified_count = 0;
  double max_abs_diag_nondegenerate = 0.0;
  Index worst_level = -1;
  double tolerance = 0.0;
  double degeneracy_tolerance = 0.0;
  bool all_null = false;
};

/// Verifies the symmetry preconditions first (throwing a diagnostic error
/// carrying both defect norms if they fail), then certifies |A_nn| <= tol
/// for every level without a coinciding neighbor. Degenerate levels are
/// listed instead of certified: within a degenerate eigenspace the diagonal
/// values are basis-dependent and need not vanish.
inline NullityReport certify_nullity(const Spectrum& spectrum, const ParityY& parity,
                                     const HermitianOperator& a, double tol,
                                     double degeneracy_tol = default_degeneracy_tolerance) {
  const Index dim = spectrum.dim();
  if (parity.dim() != dim || a.dim() != dim)
    throw InvalidInputError("certify_nullity: dimension mismatch");
  if (!(tol > 0.0)) throw InvalidInputError("certify_nullity: tol must be > 0");

  NullityReport report;
  report.tolerance = tol;
  report.degeneracy_tolerance = degeneracy_tol;

  // R H R^dag = H  <=>  every rotated eigenvector stays inside its own
  // eigenspace: the overlap matrix U = V^dag (R V) may only connect levels
  // with coinciding energies. Defect: max_{i,n} |(E_i - E_n) U_in|.
  Eigen::MatrixXcd rotated(dim, dim);
  for (Index n = 0; n < dim; ++n) rotated.col(n) = parity.apply(spectrum.eigenvectors.col(n));
  const Eigen::MatrixXcd overlap = spectrum.eigenvectors.adjoint() * rotated;
  double h_defect = 0.0;
  for (Index n = 0; n < dim; ++n)
    for (Index i = 0; i < dim; ++i)
      h_defect = std::max(h_defect, std::abs((spectrum.eigenvalues(i) - spectrum.eigenvalues(n)) *
                                             overlap(i, n)));
  report.h_symmetry_defect = h_defect;

  // R A R^dag = -A  <=>  sign(~a) sign(~b) A_{~a,~b} = -A_{ab} entrywise.
  const int n_sites = parity.n_sites();
  double a_defect = 0.0;
  if (a.storage() == HermitianOperator::Storage::diagonal) {
    const Eigen::VectorXd& d = a.diagonal_values();
    for (BasisCode code = 0; code < static_cast<BasisCode>(dim); ++code)
      a_defect = std::max(a_defect, std::abs(d(static_cast<Index>(flip_all(code, n_sites))) +
                                             d(static_cast<Index>(code))));
  } else {
    const Eigen::MatrixXcd dense = a.to_dense();
    for (BasisCode col = 0; col < static_cast<BasisCode>(dim); ++col) {
      for (BasisCode row = 0; row < static_cast<BasisCode>(dim); ++row) {
        const BasisCode mrow = flip_all(row, n_sites);
        const BasisCode mcol = flip_all(col, n_sites);
        const double ss = parity.sign(mrow) * parity.sign(mcol);
        a_defect = std::max(a_defect,
                            std::abs(ss * dense(static_cast<Index>(mrow), static_cast<Index>(mcol)) +
                                     dense(static_cast<Index>(row), static_cast<Index>(col))));
      }
    }
  }
  report.a_antisymmetry_defect = a_defect;

  const double energy_scale = std::max(1.0, spectrum.eigenvalues.cwiseAbs().maxCoeff());
  const double a_scale = std::max(1.0, a.max_abs());
  if (h_defect > tol * energy_scale || a_defect > tol * a_scale)
    throw InvalidInputError(
        "certify_nullity: symmetry preconditions violated (H-symmetry defect " +
        std::to_string(h_defect) + ", A-antisymmetry defect " + std::to_string(a_defect) +
        ")");

  const EigenExpectations expect = eigenstate_expectations(spectrum, a);
  for (Index n = 0; n < dim; ++n) {
    if (spectrum.is_degenerate(n, degeneracy_tol)) {
      report.degenerate_levels.push_back(n);
      continue;
    }
    ++report.certified_count;
    const double value = std::abs(expect.diag_values(n));
    if (value > report.max_abs_diag_nondegenerate) {
      report.max_abs_diag_nondegenerate = value;
      report.worst_level = n;
    }
  }
  report.all_null = report.max_abs_diag_nondegenerate <= tol;
  return report;
}

} // namespace eqlab
