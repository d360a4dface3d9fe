#pragma once

// Reference implementations used only by the tests: generic tensor-product
// operator embedding, cyclic Jacobi diagonalization, a Pade matrix
// exponential, and rank correlation. Each takes the textbook route rather
// than the library's, so agreement cross-checks both sides.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include <eqlab/core.hpp>
#include <eqlab/hilbert.hpp>

namespace oracle {

using eqlab::Complex;
using eqlab::Index;

inline Eigen::Matrix2cd pauli_x() {
  Eigen::Matrix2cd m;
  m << 0, 1, 1, 0;
  return m;
}

inline Eigen::Matrix2cd pauli_y() {
  Eigen::Matrix2cd m;
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

inline Eigen::Matrix2cd pauli_z() {
  Eigen::Matrix2cd m;
  m << 1, 0, 0, -1;
  return m;
}

/// <row|O_s|col> with identity on every other site; site s reads bit s.
inline Eigen::MatrixXcd embed_one(int n_sites, int s, const Eigen::Matrix2cd& op) {
  const Index dim = Index{1} << n_sites;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (Index col = 0; col < dim; ++col) {
    for (int target = 0; target < 2; ++target) {
      const int source = (col >> s) & 1;
      const Index row = (col & ~(Index{1} << s)) | (Index{target} << s);
      m(row, col) += op(target, source);
    }
  }
  return m;
}

inline Eigen::MatrixXcd embed_two(int n_sites, int si, int sj, const Eigen::Matrix2cd& a,
                                  const Eigen::Matrix2cd& b) {
  return embed_one(n_sites, si, a) * embed_one(n_sites, sj, b);
}

/// Dense H from explicit Pauli embeddings, term by term.
inline Eigen::MatrixXcd dense_hamiltonian(const eqlab::ChainSpec& spec) {
  const int n = spec.n_sites;
  const Index dim = Index{1} << n;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (int b = 0; b < spec.bond_count(); ++b) {
    const int i = b;
    const int j = (b + 1) % n;
    h += (spec.coupling / 2.0) *
         (embed_two(n, i, j, pauli_x(), pauli_x()) + embed_two(n, i, j, pauli_y(), pauli_y()));
  }
  for (int s = 0; s < n; ++s) h += spec.field * embed_one(n, s, pauli_y());
  return h;
}

/// Ascending eigenvalues of a Hermitian matrix by cyclic complex Jacobi
/// rotations.
inline Eigen::VectorXd jacobi_eigenvalues(Eigen::MatrixXcd a) {
  const Index dim = a.rows();
  const double scale = std::max(1e-300, a.cwiseAbs().maxCoeff());
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Index p = 0; p < dim; ++p)
      for (Index q = p + 1; q < dim; ++q) off = std::max(off, std::abs(a(p, q)));
    if (off <= 1e-15 * scale) break;

    for (Index p = 0; p < dim; ++p) {
      for (Index q = p + 1; q < dim; ++q) {
        const Complex apq = a(p, q);
        const double r = std::abs(apq);
        if (r <= 1e-18 * scale) continue;
        const Complex phase = apq / r;
        const double tau = (a(q, q).real() - a(p, p).real()) / (2.0 * r);
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // Givens unitary G: G(p,p)=c, G(p,q)=s, G(q,p)=-s*conj(phase),
        // G(q,q)=c*conj(phase); the update A <- G' A G zeroes a_pq
        const Eigen::VectorXcd col_p = a.col(p);
        const Eigen::VectorXcd col_q = a.col(q);
        a.col(p) = c * col_p - s * std::conj(phase) * col_q;
        a.col(q) = s * col_p + c * std::conj(phase) * col_q;
        const Eigen::RowVectorXcd row_p = a.row(p);
        const Eigen::RowVectorXcd row_q = a.row(q);
        a.row(p) = c * row_p - s * phase * row_q;
        a.row(q) = s * row_p + c * phase * row_q;
      }
    }
  }
  Eigen::VectorXd values = a.diagonal().real();
  std::sort(values.data(), values.data() + values.size());
  return values;
}

/// Matrix exponential by Pade order 13 with scaling and squaring.
inline Eigen::MatrixXcd expm(const Eigen::MatrixXcd& m) {
  static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                             1187353796428800.0,  129060195264000.0,   10559470521600.0,
                             670442572800.0,      33522128640.0,       1323241920.0,
                             40840800.0,          960960.0,            16380.0,
                             182.0,               1.0};
  const Index dim = m.rows();
  const double norm1 = m.cwiseAbs().colwise().sum().maxCoeff();
  const double theta13 = 5.371920351148152;
  int squarings = 0;
  if (norm1 > theta13)
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
  const Eigen::MatrixXcd a = m / std::pow(2.0, squarings);

  const Eigen::MatrixXcd a2 = a * a;
  const Eigen::MatrixXcd a4 = a2 * a2;
  const Eigen::MatrixXcd a6 = a4 * a2;
  const Eigen::MatrixXcd identity = Eigen::MatrixXcd::Identity(dim, dim);
  const Eigen::MatrixXcd u =
      a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 +
           b[1] * identity);
  const Eigen::MatrixXcd v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 +
                             b[4] * a4 + b[2] * a2 + b[0] * identity;
  Eigen::MatrixXcd result = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

inline std::vector<double> ranks_with_ties(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> rank(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
    const double mean_rank = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mean_rank;
    i = j + 1;
  }
  return rank;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(ranks_with_ties(x), ranks_with_ties(y));
}

/// Expectation of H in the uniform product state |theta, phi>^N:
/// (J/2) * bonds * sin^2(theta) - g * N * sin(theta) * sin(phi).
inline double product_energy(const eqlab::ChainSpec& spec, double theta, double phi) {
  return 0.5 * spec.coupling * spec.bond_count() * std::sin(theta) * std::sin(theta) -
         spec.field * spec.n_sites * std::sin(theta) * std::sin(phi);
}

} // namespace oracle
