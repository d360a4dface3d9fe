#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "eqlab/core.hpp"

namespace eqlab {

// ---------------------------------------------------------------------------
// Basis encoding
//
// A product basis state of N spins is a bitstring `code` in [0, 2^N): bit j
// (counting from 0) is 0 for spin up |Z+> at site j and 1 for spin down |Z->.
// ---------------------------------------------------------------------------

using BasisCode = std::uint64_t;

inline bool bit_at(BasisCode code, int site) { return (code >> site) & 1u; }

inline BasisCode flip_bit(BasisCode code, int site) { return code ^ (BasisCode{1} << site); }

inline int popcount(BasisCode code) { return std::popcount(code); }

/// Bitwise complement restricted to the lowest n_sites bits.
inline BasisCode flip_all(BasisCode code, int n_sites) {
  return ~code & ((BasisCode{1} << n_sites) - 1);
}

inline Index hilbert_dimension(int n_sites) {
  if (n_sites < 1 || n_sites > 30)
    throw CapabilityError("hilbert_dimension: n_sites must be in [1, 30], got " +
                          std::to_string(n_sites));
  return Index{1} << n_sites;
}

// ---------------------------------------------------------------------------
// Chain specification
// ---------------------------------------------------------------------------

enum class Boundary { periodic, open };

inline const char* to_string(Boundary b) {
  return b == Boundary::periodic ? "periodic" : "open";
}

/// Parameters of the spin chain: N sites, bond coupling J, transverse field g
/// along y. Energies in units where hbar = 1; time in units of 1/J.
struct ChainSpec {
  int n_sites = 0;
  double coupling = 1.0;       // J
  double field = 0.51;         // g
  Boundary boundary = Boundary::periodic;

  void validate() const {
    if (boundary == Boundary::open && n_sites < 2)
      throw InvalidInputError("ChainSpec: open chain needs n_sites >= 2, got " +
                              std::to_string(n_sites));
    if (boundary == Boundary::periodic && n_sites < 3)
      throw InvalidInputError(
          "ChainSpec: periodic chain needs n_sites >= 3 (N=2 would double-count "
          "the single bond), got " +
          std::to_string(n_sites));
    if (!std::isfinite(coupling) || !std::isfinite(field))
      throw InvalidInputError("ChainSpec: coupling and field must be finite");
    hilbert_dimension(n_sites);
  }

  int bond_count() const {
    return boundary == Boundary::periodic ? n_sites : n_sites - 1;
  }

  friend bool operator==(const ChainSpec&, const ChainSpec&) = default;
};

// ---------------------------------------------------------------------------
// Hermitian operators on the 2^N space
// ---------------------------------------------------------------------------

struct SparseEntry {
  BasisCode row = 0;
  BasisCode col = 0;
  Complex value{};
};

/// A Hermitian matrix stored dense, as a real diagonal, or as a sparse entry
/// list (all nonzeros listed, both triangles). Construction validates the
/// Hermiticity defect max|M_ab - conj(M_ba)| <= 1e-12 * max|M_ab|.
class HermitianOperator {
public:
  enum class Storage { dense, diagonal, sparse };

  static constexpr double hermiticity_tolerance = 1e-12;

  static HermitianOperator dense(Eigen::MatrixXcd matrix) {
    if (matrix.rows() != matrix.cols())
      throw InvalidInputError("HermitianOperator: dense matrix must be square");
    HermitianOperator op;
    op.storage_ = Storage::dense;
    op.dim_ = matrix.rows();
    op.dense_ = std::move(matrix);
    op.check_hermiticity();
    return op;
  }

  static HermitianOperator diagonal(Eigen::VectorXd values) {
    HermitianOperator op;
    op.storage_ = Storage::diagonal;
    op.dim_ = values.size();
    op.diag_ = std::move(values);
    return op;
  }

  /// Entries are merged by (row, col); the merged list must be Hermitian.
  static HermitianOperator sparse(Index dim, std::vector<SparseEntry> entries) {
    if (dim < 1) throw InvalidInputError("HermitianOperator: dimension must be >= 1");
    HermitianOperator op;
    op.storage_ = Storage::sparse;
    op.dim_ = dim;
    op.entries_ = std::move(entries);
    op.merge_entries();
    op.check_hermiticity();
    return op;
  }

  Storage storage() const { return storage_; }
  Index dim() const { return dim_; }

  const Eigen::VectorXd& diagonal_values() const {
    if (storage_ != Storage::diagonal)
      throw InvalidInputError("HermitianOperator: not diagonal storage");
    return diag_;
  }

  const std::vector<SparseEntry>& entries() const {
    if (storage_ != Storage::sparse)
      throw InvalidInputError("HermitianOperator: not sparse storage");
    return entries_;
  }

  Index nonzero_count() const {
    switch (storage_) {
      case Storage::dense: return dim_ * dim_;
      case Storage::diagonal: return dim_;
      case Storage::sparse: return static_cast<Index>(entries_.size());
    }
    return 0;
  }

  Eigen::MatrixXcd to_dense() const {
    switch (storage_) {
      case Storage::dense: return dense_;
      case Storage::diagonal: return diag_.cast<Complex>().asDiagonal();
      case Storage::sparse: {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim_, dim_);
        for (const auto& e : entries_)
          m(static_cast<Index>(e.row), static_cast<Index>(e.col)) += e.value;
        return m;
      }
    }
    return {};
  }

  /// y = M x, costing O(nnz).
  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const {
    if (x.size() != dim_)
      throw InvalidInputError("HermitianOperator::apply: dimension mismatch");
    switch (storage_) {
      case Storage::dense: return dense_ * x;
      case Storage::diagonal: return diag_.array() * x.array();
      case Storage::sparse: {
        Eigen::VectorXcd y = Eigen::VectorXcd::Zero(dim_);
        for (const auto& e : entries_)
          y(static_cast<Index>(e.row)) += e.value * x(static_cast<Index>(e.col));
        return y;
      }
    }
    return {};
  }

  /// <x|M|x>. Guaranteed real for Hermitian M up to rounding; the real part
  /// is returned and the imaginary residue is the caller's concern.
  Complex expectation(const Eigen::VectorXcd& x) const {
    if (storage_ == Storage::diagonal) {
      // sum_i d_i |x_i|^2, exactly real
      return Complex((diag_.array() * x.cwiseAbs2().array()).sum(), 0.0);
    }
    return x.dot(apply(x));
  }

  double max_abs() const {
    switch (storage_) {
      case Storage::dense: return dense_.size() == 0 ? 0.0 : dense_.cwiseAbs().maxCoeff();
      case Storage::diagonal: return diag_.size() == 0 ? 0.0 : diag_.cwiseAbs().maxCoeff();
      case Storage::sparse: {
        double m = 0.0;
        for (const auto& e : entries_) m = std::max(m, std::abs(e.value));
        return m;
      }
    }
    return 0.0;
  }

  /// Largest |eigenvalue|. Exact for diagonal storage; otherwise estimated by
  /// power iteration with a deterministic start vector (relative accuracy far
  /// below the tolerances this library works at).
  double spectral_norm() const {
    if (storage_ == Storage::diagonal)
      return diag_.size() == 0 ? 0.0 : diag_.cwiseAbs().maxCoeff();
    Eigen::VectorXcd v(dim_);
    for (Index i = 0; i < dim_; ++i) v(i) = Complex(1.0 + 1e-3 * static_cast<double>(i % 97), 1e-4 * static_cast<double>(i % 13));
    v.normalize();
    double norm = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
      Eigen::VectorXcd w = apply(v);
      const double next = w.norm();
      if (next == 0.0) return 0.0;
      w /= next;
      // power iteration on M^2 via |M v|; stop once stable
      if (iter > 4 && std::abs(next - norm) <= 1e-13 * std::max(1.0, norm)) {
        norm = next;
        break;
      }
      norm = next;
      v.swap(w);
    }
    return norm;
  }

  double trace() const {
    switch (storage_) {
      case Storage::dense: return dense_.trace().real();
      case Storage::diagonal: return diag_.sum();
      case Storage::sparse: {
        double t = 0.0;
        for (const auto& e : entries_)
          if (e.row == e.col) t += e.value.real();
        return t;
      }
    }
    return 0.0;
  }

  /// max |M_ab - conj(M_ba)| over all stored entries.
  double hermiticity_defect() const {
    switch (storage_) {
      case Storage::dense:
        return dense_.size() == 0 ? 0.0
                                  : (dense_ - dense_.adjoint()).cwiseAbs().maxCoeff();
      case Storage::diagonal: return 0.0;
      case Storage::sparse: {
        // entries are sorted and merged; mirror lookup by binary search
        double defect = 0.0;
        for (const auto& e : entries_) {
          const Complex mirror = sparse_entry(e.col, e.row);
          defect = std::max(defect, std::abs(e.value - std::conj(mirror)));
        }
        return defect;
      }
    }
    return 0.0;
  }

private:
  HermitianOperator() = default;

  Complex sparse_entry(BasisCode row, BasisCode col) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), std::pair{row, col},
                               [](const SparseEntry& e, const std::pair<BasisCode, BasisCode>& key) {
                                 return std::pair{e.row, e.col} < key;
                               });
    if (it != entries_.end() && it->row == row && it->col == col) return it->value;
    return Complex{};
  }

  void merge_entries() {
    for (const auto& e : entries_)
      if (e.row >= static_cast<BasisCode>(dim_) || e.col >= static_cast<BasisCode>(dim_))
        throw InvalidInputError("HermitianOperator: sparse entry out of range");
    std::sort(entries_.begin(), entries_.end(), [](const SparseEntry& a, const SparseEntry& b) {
      return std::pair{a.row, a.col} < std::pair{b.row, b.col};
    });
    std::vector<SparseEntry> merged;
    merged.reserve(entries_.size());
    for (const auto& e : entries_) {
      if (!merged.empty() && merged.back().row == e.row && merged.back().col == e.col)
        merged.back().value += e.value;
      else
        merged.push_back(e);
    }
    std::erase_if(merged, [](const SparseEntry& e) { return e.value == Complex{}; });
    entries_ = std::move(merged);
  }

  void check_hermiticity() const {
    const double scale = max_abs();
    const double defect = hermiticity_defect();
    if (defect > hermiticity_tolerance * std::max(scale, 1e-300))
      throw InvalidInputError("HermitianOperator: Hermiticity defect " +
                              std::to_string(defect) + " exceeds tolerance at scale " +
                              std::to_string(scale));
  }

  Storage storage_ = Storage::dense;
  Index dim_ = 0;
  Eigen::MatrixXcd dense_;
  Eigen::VectorXd diag_;
  std::vector<SparseEntry> entries_;
};

// ---------------------------------------------------------------------------
// Model operators
// ---------------------------------------------------------------------------

/// H = (J/2) sum_j (sx_j sx_{j+1} + sy_j sy_{j+1}) + g sum_j sy_j with j+1
/// taken mod N on the periodic chain. The bond term is the flip-flop
/// J (|01><10| + |10><01|); the field term connects codes differing in one
/// bit with amplitude +-ig. Assembled as a sparse entry list; H has an empty
/// diagonal, so its trace vanishes identically.
inline HermitianOperator build_hamiltonian(const ChainSpec& spec) {
  spec.validate();
  const int n = spec.n_sites;
  const Index dim = hilbert_dimension(n);
  const double j_coupling = spec.coupling;
  const double g_field = spec.field;

  std::vector<SparseEntry> entries;
  entries.reserve(static_cast<std::size_t>(dim) * (spec.bond_count() + n));

  for (BasisCode code = 0; code < static_cast<BasisCode>(dim); ++code) {
    // flip-flop bonds: connect 01 <-> 10 on adjacent sites
    if (j_coupling != 0.0) {
      for (int b = 0; b < spec.bond_count(); ++b) {
        const int site = b;
        const int next = (b + 1) % n;
        if (bit_at(code, site) != bit_at(code, next)) {
          const BasisCode partner = flip_bit(flip_bit(code, site), next);
          entries.push_back({partner, code, Complex(j_coupling, 0.0)});
        }
      }
    }
    // transverse field along y: sy |0> = i|1>, sy |1> = -i|0>
    if (g_field != 0.0) {
      for (int site = 0; site < n; ++site) {
        const BasisCode partner = flip_bit(code, site);
        const double sign = bit_at(code, site) ? -1.0 : 1.0;
        entries.push_back({partner, code, Complex(0.0, sign * g_field)});
      }
    }
  }
  return HermitianOperator::sparse(dim, std::move(entries));
}

/// M_z = sum_j sz_j, diagonal with entry N - 2 popcount(code).
inline HermitianOperator build_magnetization(int n_sites) {
  const Index dim = hilbert_dimension(n_sites);
  Eigen::VectorXd diag(dim);
  for (BasisCode code = 0; code < static_cast<BasisCode>(dim); ++code)
    diag(static_cast<Index>(code)) = static_cast<double>(n_sites - 2 * popcount(code));
  return HermitianOperator::diagonal(std::move(diag));
}

/// R = prod_j (i sy_j), the global pi rotation about y. Acting on a basis
/// state it flips every bit and multiplies by (-1)^(#zero bits):
/// R |code> = sign(code) |~code>. R H R^dag = H for every ChainSpec
/// Hamiltonian and R M_z R^dag = -M_z.
class ParityY {
public:
  explicit ParityY(int n_sites) : n_sites_(n_sites), dim_(hilbert_dimension(n_sites)) {}

  int n_sites() const { return n_sites_; }
  Index dim() const { return dim_; }

  double sign(BasisCode code) const {
    return ((n_sites_ - popcount(code)) % 2) ? -1.0 : 1.0;
  }

  BasisCode image(BasisCode code) const { return flip_all(code, n_sites_); }

  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const {
    if (x.size() != dim_) throw InvalidInputError("ParityY::apply: dimension mismatch");
    Eigen::VectorXcd y(dim_);
    for (BasisCode code = 0; code < static_cast<BasisCode>(dim_); ++code)
      y(static_cast<Index>(image(code))) = sign(code) * x(static_cast<Index>(code));
    return y;
  }

  Eigen::MatrixXcd to_dense() const {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim_, dim_);
    for (BasisCode code = 0; code < static_cast<BasisCode>(dim_); ++code)
      m(static_cast<Index>(image(code)), static_cast<Index>(code)) = sign(code);
    return m;
  }

private:
  int n_sites_;
  Index dim_;
};

inline ParityY build_parity_y(int n_sites) { return ParityY(n_sites); }

} // namespace eqlab
