#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#if defined(EQLAB_HAVE_LAPACKE)
#include <lapacke.h>
#else
#include <Eigen/Eigenvalues>
#endif

#include "eqlab/core.hpp"
#include "eqlab/hilbert.hpp"

namespace eqlab {

/// Full eigendecomposition H = V diag(E) V^dag with E ascending and V unitary.
/// residual is max_n |H v_n - E_n v_n|_inf / max|H_ab|.
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXcd eigenvectors;
  double residual = 0.0;

  Index dim() const { return eigenvalues.size(); }
  double e_min() const { return eigenvalues(0); }
  double e_max() const { return eigenvalues(eigenvalues.size() - 1); }
  double width() const { return e_max() - e_min(); }

  /// Index pairs of adjacent coinciding levels at the given tolerance.
  Index count_degeneracies(double tol) const {
    Index count = 0;
    for (Index n = 1; n < dim(); ++n)
      if (eigenvalues(n) - eigenvalues(n - 1) <= tol) ++count;
    return count;
  }

  /// True if level n coincides with a neighbor at the given tolerance.
  bool is_degenerate(Index n, double tol) const {
    if (n > 0 && eigenvalues(n) - eigenvalues(n - 1) <= tol) return true;
    if (n + 1 < dim() && eigenvalues(n + 1) - eigenvalues(n) <= tol) return true;
    return false;
  }
};

/// Spectrum spans O(N) in units of J; 1e-10 sits far below physical gaps at
/// accessible sizes and far above double-precision solver error.
inline constexpr double default_degeneracy_tolerance = 1e-10;

namespace detail {

inline void solve_hermitian(Eigen::MatrixXcd& matrix, Eigen::VectorXd& eigenvalues) {
  const Index dim = matrix.rows();
  eigenvalues.resize(dim);
#if defined(EQLAB_HAVE_LAPACKE)
  const lapack_int info = LAPACKE_zheevd(
      LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(dim),
      reinterpret_cast<lapack_complex_double*>(matrix.data()),
      static_cast<lapack_int>(dim), eigenvalues.data());
  if (info != 0)
    throw NumericalError("diagonalize: zheevd failed with info=" + std::to_string(info),
                         static_cast<double>(info));
#else
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(matrix);
  if (solver.info() != Eigen::Success)
    throw NumericalError("diagonalize: eigensolver did not converge", -1.0);
  eigenvalues = solver.eigenvalues();
  matrix = solver.eigenvectors();
#endif
}

} // namespace detail

/// Dense Hermitian eigendecomposition. Ascending eigenvalues; within
/// numerical degeneracies the eigenvector choice is whatever the backend
/// returns. Throws NumericalError carrying the residual if the result fails
/// the accuracy contract.
inline Spectrum diagonalize(const HermitianOperator& op) {
  const double scale = op.max_abs();
  if (op.hermiticity_defect() > HermitianOperator::hermiticity_tolerance * std::max(scale, 1e-300))
    throw InvalidInputError("diagonalize: input violates the Hermiticity invariant");

  Spectrum spectrum;
  spectrum.eigenvectors = op.to_dense();
  detail::solve_hermitian(spectrum.eigenvectors, spectrum.eigenvalues);

  // residual via one pass of the original (usually sparse) operator
  const Index dim = op.dim();
  double residual = 0.0;
  if (op.storage() == HermitianOperator::Storage::sparse) {
    const auto& entries = op.entries();
    Eigen::VectorXcd column(dim);
    for (Index n = 0; n < dim; ++n) {
      column.setZero();
      for (const auto& e : entries)
        column(static_cast<Index>(e.row)) +=
            e.value * spectrum.eigenvectors(static_cast<Index>(e.col), n);
      column -= spectrum.eigenvalues(n) * spectrum.eigenvectors.col(n);
      residual = std::max(residual, column.cwiseAbs().maxCoeff());
    }
  } else if (op.storage() == HermitianOperator::Storage::diagonal) {
    for (Index n = 0; n < dim; ++n) {
      const Eigen::VectorXcd column =
          op.diagonal_values().array() * spectrum.eigenvectors.col(n).array() -
          spectrum.eigenvalues(n) * spectrum.eigenvectors.col(n).array();
      residual = std::max(residual, column.cwiseAbs().maxCoeff());
    }
  } else {
    const Eigen::MatrixXcd defect =
        op.to_dense() * spectrum.eigenvectors -
        spectrum.eigenvectors * spectrum.eigenvalues.asDiagonal();
    residual = defect.size() == 0 ? 0.0 : defect.cwiseAbs().maxCoeff();
  }
  spectrum.residual = scale > 0.0 ? residual / scale : residual;
  if (spectrum.residual > 1e-10)
    throw NumericalError("diagonalize: residual " + std::to_string(spectrum.residual) +
                             " exceeds the 1e-10 accuracy contract",
                         spectrum.residual);
  return spectrum;
}

// ---------------------------------------------------------------------------
// Gap diagnostics
// ---------------------------------------------------------------------------

/// Counts of spectral coincidences at a tolerance. degeneracy_count is the
/// number of adjacent coinciding levels (D minus the number of distinct
/// levels). degenerate_gap_count counts unordered pairs of distinct gaps
/// (k>l) != (m>n) with |(E_k-E_l) - (E_m-E_n)| <= tolerance, excluding the
/// trivial identifications (matching endpoints, or both gaps zero at the
/// tolerance). pairs_examined is the number of gap pairs covered: all of
/// them in exhaustive mode, the sample count in sampled mode.
struct GapReport {
  Index degeneracy_count = 0;
  std::int64_t degenerate_gap_count = 0;
  double tolerance = 0.0;
  std::int64_t pairs_examined = 0;
  bool sampled = false;
};

inline constexpr Index default_gap_max_dimension = 256;
inline constexpr std::int64_t default_gap_samples = 2'000'000;

namespace detail {

struct IndexedGap {
  double value;
  std::uint32_t upper;
  std::uint32_t lower;
};

inline bool gap_pair_is_trivial(const Eigen::VectorXd& e, const IndexedGap& a,
                                const IndexedGap& b, double tol) {
  if (a.value <= tol && b.value <= tol) return true;  // both gaps are degeneracies
  return std::abs(e(a.upper) - e(b.upper)) <= tol &&
         std::abs(e(a.lower) - e(b.lower)) <= tol;
}

} // namespace detail

inline GapReport gap_diagnostics(const Spectrum& spectrum, double tol = default_degeneracy_tolerance,
                                 Index max_dimension = default_gap_max_dimension,
                                 std::int64_t samples = default_gap_samples,
                                 std::uint64_t seed = 0) {
  if (!(tol >= 0.0)) throw InvalidInputError("gap_diagnostics: tolerance must be >= 0");
  const Index dim = spectrum.dim();
  const Eigen::VectorXd& e = spectrum.eigenvalues;

  GapReport report;
  report.tolerance = tol;
  report.degeneracy_count = spectrum.count_degeneracies(tol);

  if (dim < 2) return report;

  if (dim <= max_dimension) {
    // exhaustive: sort the D(D-1)/2 gaps, scan coincidence windows
    std::vector<detail::IndexedGap> gaps;
    gaps.reserve(static_cast<std::size_t>(dim) * (dim - 1) / 2);
    for (Index k = 1; k < dim; ++k)
      for (Index l = 0; l < k; ++l)
        gaps.push_back({e(k) - e(l), static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(l)});
    std::sort(gaps.begin(), gaps.end(),
              [](const detail::IndexedGap& a, const detail::IndexedGap& b) { return a.value < b.value; });

    std::int64_t count = 0;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
      for (std::size_t j = i + 1; j < gaps.size(); ++j) {
        if (gaps[j].value - gaps[i].value > tol) break;
        if (!detail::gap_pair_is_trivial(e, gaps[i], gaps[j], tol)) ++count;
      }
    }
    report.degenerate_gap_count = count;
    const std::int64_t total = static_cast<std::int64_t>(gaps.size());
    report.pairs_examined = total * (total - 1) / 2;
    return report;
  }

  // sampled: uniform random unordered pairs of distinct (k>l) gaps
  if (samples < 1) throw InvalidInputError("gap_diagnostics: samples must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> pick(0, dim - 1);
  auto draw_gap = [&] {
    Index k = 0, l = 0;
    do {
      k = pick(rng);
      l = pick(rng);
    } while (k == l);
    if (k < l) std::swap(k, l);
    return detail::IndexedGap{e(k) - e(l), static_cast<std::uint32_t>(k),
                              static_cast<std::uint32_t>(l)};
  };
  std::int64_t count = 0;
  for (std::int64_t s = 0; s < samples; ++s) {
    const auto a = draw_gap();
    auto b = draw_gap();
    while (a.upper == b.upper && a.lower == b.lower) b = draw_gap();
    if (std::abs(a.value - b.value) <= tol && !detail::gap_pair_is_trivial(e, a, b, tol)) ++count;
  }
  report.degenerate_gap_count = count;
  report.pairs_examined = samples;
  report.sampled = true;
  return report;
}

} // namespace eqlab
