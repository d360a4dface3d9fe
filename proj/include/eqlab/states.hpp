#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "eqlab/core.hpp"
#include "eqlab/eigensolve.hpp"
#include "eqlab/hilbert.hpp"

namespace eqlab {

// ---------------------------------------------------------------------------
// Product initial states
// ---------------------------------------------------------------------------

/// Bloch angles of the uniform product state
/// prod_j [cos(theta/2) |Z+>_j + e^{-i phi} sin(theta/2) |Z->_j].
/// theta outside [0, pi] is rejected (wrapping would hide caller bugs);
/// phi is reduced into [0, 2 pi).
struct ProductStateParams {
  double theta = 0.0;
  double phi = 0.0;
  int n_sites = 0;

  void validate() const {
    if (!(theta >= 0.0 && theta <= std::numbers::pi))
      throw InvalidInputError("ProductStateParams: theta must lie in [0, pi], got " +
                              std::to_string(theta));
    if (!std::isfinite(phi)) throw InvalidInputError("ProductStateParams: phi must be finite");
    hilbert_dimension(n_sites);
  }

  double reduced_phi() const {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double p = std::fmod(phi, two_pi);
    if (p < 0.0) p += two_pi;
    return p;
  }
};

/// Per-popcount amplitude table: every site carries the same single-spin
/// state, so the amplitude of |code> depends on code only through its
/// popcount p: cos(theta/2)^(N-p) * (e^{-i phi} sin(theta/2))^p.
inline Eigen::VectorXcd product_amplitude_table(const ProductStateParams& params) {
  params.validate();
  const int n = params.n_sites;
  const double up = std::cos(params.theta / 2.0);
  const Complex down = std::polar(std::sin(params.theta / 2.0), -params.reduced_phi());
  Eigen::VectorXd up_powers(n + 1);
  up_powers(0) = 1.0;
  for (int k = 1; k <= n; ++k) up_powers(k) = up_powers(k - 1) * up;
  Eigen::VectorXcd table(n + 1);
  Complex down_power = 1.0;
  for (int p = 0; p <= n; ++p) {
    table(p) = up_powers(n - p) * down_power;
    down_power *= down;
  }
  return table;
}

inline Eigen::VectorXcd product_state(const ProductStateParams& params) {
  const Eigen::VectorXcd table = product_amplitude_table(params);
  const Index dim = hilbert_dimension(params.n_sites);
  Eigen::VectorXcd psi(dim);
  for (BasisCode code = 0; code < static_cast<BasisCode>(dim); ++code)
    psi(static_cast<Index>(code)) = table(popcount(code));
  return psi;
}

// ---------------------------------------------------------------------------
// Energy-basis expansion and diagonal-ensemble quantities
// ---------------------------------------------------------------------------

/// c_n = <E_n|psi> for every eigenvector column.
inline Eigen::VectorXcd overlap_coefficients(const Eigen::VectorXcd& psi,
                                             const Spectrum& spectrum) {
  if (psi.size() != spectrum.dim())
    throw InvalidInputError("overlap_coefficients: dimension mismatch");
  return spectrum.eigenvectors.adjoint() * psi;
}

/// d_eff = 1 / sum_n w_n^2 for normalized weights w_n = |c_n|^2. Weights are
/// kept at full length; truncating small ones would bias the sum downward.
inline double effective_dimension(const Eigen::VectorXd& weights) {
  if (weights.size() == 0) throw InvalidInputError("effective_dimension: empty weights");
  if ((weights.array() < 0.0).any())
    throw InvalidInputError("effective_dimension: weights must be non-negative");
  const double total = weights.sum();
  if (std::abs(total - 1.0) > 1e-10)
    throw InvalidInputError("effective_dimension: weights must sum to 1, got " +
                            std::to_string(total));
  return 1.0 / weights.squaredNorm();
}

/// <A>_bar = sum_n w_n A_nn, the diagonal-ensemble (infinite-time) average.
inline double diagonal_average(const Eigen::VectorXd& weights,
                               const Eigen::VectorXd& a_diag_energy) {
  if (weights.size() != a_diag_energy.size())
    throw InvalidInputError("diagonal_average: length mismatch");
  return weights.dot(a_diag_energy);
}

/// Mean energy rescaled by the spectral extremes into [0, 1]:
/// (<psi|H|psi> - E_min) / (E_max - E_min). The denominator is the full
/// spectral width, the only reading that lands the value in [0, 1].
inline double normalized_energy(const Eigen::VectorXcd& psi, const HermitianOperator& h,
                                const Spectrum& spectrum) {
  if (psi.size() != h.dim() || h.dim() != spectrum.dim())
    throw InvalidInputError("normalized_energy: dimension mismatch");
  const double width = spectrum.width();
  if (!(width > 0.0))
    throw InvalidInputError("normalized_energy: spectrum has zero width");
  const double mean = h.expectation(psi).real();
  return (mean - spectrum.e_min()) / width;
}

/// Expansion of an initial state over the energy eigenbasis together with
/// every diagonal-ensemble scalar derived from it.
struct OverlapProfile {
  Eigen::VectorXcd coefficients;
  Eigen::VectorXd weights;
  double d_eff = 1.0;
  double mean_energy = 0.0;
  double energy_variance = 0.0;
  double normalized_energy = 0.0;
};

inline OverlapProfile overlap_profile(const Eigen::VectorXcd& psi, const Spectrum& spectrum) {
  OverlapProfile profile;
  profile.coefficients = overlap_coefficients(psi, spectrum);
  profile.weights = profile.coefficients.cwiseAbs2();
  const double total = profile.weights.sum();
  if (std::abs(total - 1.0) > 1e-10)
    throw InvalidInputError("overlap_profile: state is not normalized, sum of weights " +
                            std::to_string(total));
  profile.d_eff = 1.0 / profile.weights.squaredNorm();
  profile.mean_energy = profile.weights.dot(spectrum.eigenvalues);
  profile.energy_variance =
      profile.weights.dot(spectrum.eigenvalues.cwiseAbs2()) -
      profile.mean_energy * profile.mean_energy;
  const double width = spectrum.width();
  if (!(width > 0.0))
    throw InvalidInputError("overlap_profile: spectrum has zero width");
  profile.normalized_energy = (profile.mean_energy - spectrum.e_min()) / width;
  return profile;
}

// ---------------------------------------------------------------------------
// Collapsed overlap table for product-state sweeps
// ---------------------------------------------------------------------------

/// For uniform product states the overlap sum collapses over popcount
/// classes: c_n = sum_p amp_p P(p, n) with
/// P(p, n) = sum_{code: popcount=p} conj(V(code, n)). Building P costs one
/// pass over the eigenvector matrix; afterwards every (theta, phi) point
/// costs O(D N) instead of O(D^2).
class ProductOverlapTable {
public:
  static ProductOverlapTable build(const Spectrum& spectrum, int n_sites) {
    if (spectrum.dim() != hilbert_dimension(n_sites))
      throw InvalidInputError("ProductOverlapTable: spectrum dimension does not match n_sites");
    ProductOverlapTable t;
    t.n_sites_ = n_sites;
    const Index dim = spectrum.dim();
    t.table_ = Eigen::MatrixXcd::Zero(dim, n_sites + 1);
    for (Index n = 0; n < dim; ++n)
      for (BasisCode code = 0; code < static_cast<BasisCode>(dim); ++code)
        t.table_(n, popcount(code)) += std::conj(spectrum.eigenvectors(static_cast<Index>(code), n));
    return t;
  }

  int n_sites() const { return n_sites_; }

  Eigen::VectorXcd overlaps(const ProductStateParams& params) const {
    if (params.n_sites != n_sites_)
      throw InvalidInputError("ProductOverlapTable: n_sites mismatch");
    return table_ * product_amplitude_table(params);
  }

private:
  ProductOverlapTable() = default;
  int n_sites_ = 0;
  Eigen::MatrixXcd table_;  // dim x (N+1)
};

} // namespace eqlab
