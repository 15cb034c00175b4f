#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "ggeft/matrix.hpp"

namespace ggeft {

// Eigenstructure of a Hermitian operator. Eigenvalues ascend; vectors are the
// matching orthonormal columns. The basis is deterministic, including inside
// degenerate subspaces (see spectral_decompose).
struct SpectralDecomposition {
  std::vector<double> eigenvalues;
  ComplexMatrix vectors;  // column k <-> eigenvalues[k]

  int dim() const { return vectors.dim(); }

  std::vector<cplx> vector(int k) const {
    std::vector<cplx> v(dim());
    for (int i = 0; i < dim(); ++i) v[i] = vectors(i, k);
    return v;
  }

  // rank-1 projector |k><k|
  ComplexMatrix projector(int k) const {
    const int n = dim();
    ComplexMatrix p(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) p(i, j) = vectors(i, k) * std::conj(vectors(j, k));
    return p;
  }

  std::vector<ComplexMatrix> projectors() const {
    std::vector<ComplexMatrix> ps;
    ps.reserve(eigenvalues.size());
    for (int k = 0; k < dim(); ++k) ps.push_back(projector(k));
    return ps;
  }

  ComplexMatrix reconstruct() const {
    const int n = dim();
    ComplexMatrix r(n);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          r(i, j) += eigenvalues[k] * vectors(i, k) * std::conj(vectors(j, k));
    return r;
  }

  // sum_k f(e_k) |k><k|
  template <typename F>
  ComplexMatrix map_eigenvalues(F &&f) const {
    const int n = dim();
    ComplexMatrix r(n);
    for (int k = 0; k < n; ++k) {
      const cplx fk = f(eigenvalues[k]);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r(i, j) += fk * vectors(i, k) * std::conj(vectors(j, k));
    }
    return r;
  }
};

struct EigenOptions {
  int max_sweeps = defaults::jacobi_max_sweeps;
  double degeneracy_tol = defaults::degeneracy_tol;
};

namespace detail {

// Deterministic phase: largest-magnitude component made real positive.
inline void canonical_phase(ComplexMatrix &v, int col) {
  const int n = v.dim();
  int imax = 0;
  double amax = -1.0;
  for (int i = 0; i < n; ++i) {
    const double a = std::abs(v(i, col));
    if (a > amax + 1e-300 && a > amax * (1.0 + 1e-12)) {
      amax = a;
      imax = i;
    }
  }
  const cplx z = v(imax, col);
  if (std::abs(z) == 0.0) return;
  const cplx phase = std::conj(z) / std::abs(z);
  for (int i = 0; i < n; ++i) v(i, col) *= phase;
}

}  // namespace detail

// Cyclic two-sided Jacobi rotations for complex Hermitian matrices. Fixed
// (p,q) sweep order and a fixed degenerate-subspace policy make repeated calls
// on identical input bit-reproducible. Degenerate groups (eigenvalues within
// degeneracy_tol) get their basis rebuilt by column-pivoted orthogonalization
// of the group projector applied to the canonical basis, which is independent
// of the rotation history.
inline SpectralDecomposition spectral_decompose(const HermitianOperator &op,
                                                const EigenOptions &opts = {}) {
  const int n = op.dim();
  ComplexMatrix a = op.matrix();
  ComplexMatrix v = ComplexMatrix::identity(n);

  const double scale = std::max(1.0, a.max_abs());
  const double off_target = 1e-15 * scale;

  auto off_norm = [&]() {
    double m = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) m = std::max(m, std::abs(a(p, q)));
    return m;
  };

  int sweep = 0;
  while (off_norm() > off_target) {
    if (++sweep > opts.max_sweeps)
      throw std::runtime_error("spectral_decompose: no convergence after " +
                               std::to_string(opts.max_sweeps) + " sweeps");
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const cplx gamma = a(p, q);
        const double m = std::abs(gamma);
        if (m <= off_target * 1e-2) continue;
        const double alpha = a(p, p).real();
        const double beta = a(q, q).real();
        const cplx phase = gamma / m;  // e^{i phi}
        const double zeta = (beta - alpha) / (2.0 * m);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const cplx sp = s * phase;        // s e^{i phi}
        const cplx spc = std::conj(sp);   // s e^{-i phi}

        // A <- R^dag A R with R[p][p]=c, R[p][q]=s e^{i phi},
        // R[q][p]=-s e^{-i phi}, R[q][q]=c.
        for (int k = 0; k < n; ++k) {  // column update: A <- A R
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - spc * akq;
          a(k, q) = sp * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {  // row update: A <- R^dag A
          const cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - sp * aqk;
          a(q, k) = spc * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = cplx(a(p, p).real(), 0.0);
        a(q, q) = cplx(a(q, q).real(), 0.0);
        for (int k = 0; k < n; ++k) {  // V <- V R
          const cplx vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - spc * vkq;
          v(k, q) = sp * vkp + c * vkq;
        }
      }
    }
  }

  // ascending eigenvalue order; stable on exact ties
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> diag(n);
  for (int i = 0; i < n; ++i) diag[i] = a(i, i).real();
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return diag[x] < diag[y]; });

  SpectralDecomposition sd;
  sd.eigenvalues.resize(n);
  sd.vectors = ComplexMatrix(n);
  for (int k = 0; k < n; ++k) {
    sd.eigenvalues[k] = diag[order[k]];
    for (int i = 0; i < n; ++i) sd.vectors(i, k) = v(i, order[k]);
  }

  // deterministic basis inside degenerate groups
  const double gtol = opts.degeneracy_tol * scale;
  int k0 = 0;
  while (k0 < n) {
    int k1 = k0 + 1;
    while (k1 < n && sd.eigenvalues[k1] - sd.eigenvalues[k0] <= gtol) ++k1;
    const int g = k1 - k0;
    if (g > 1) {
      // group projector
      ComplexMatrix proj(n);
      for (int k = k0; k < k1; ++k)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            proj(i, j) += sd.vectors(i, k) * std::conj(sd.vectors(j, k));
      // candidates: P e_j, i.e. the columns of P
      std::vector<std::vector<cplx>> cand(n, std::vector<cplx>(n));
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) cand[j][i] = proj(i, j);
      std::vector<bool> used(n, false);
      std::vector<std::vector<cplx>> basis;
      for (int pick = 0; pick < g; ++pick) {
        int best = -1;
        double bestn = -1.0;
        for (int j = 0; j < n; ++j) {
          if (used[j]) continue;
          double nn = 0.0;
          for (const cplx &z : cand[j]) nn += std::norm(z);
          if (nn > bestn * (1.0 + 1e-12)) {
            bestn = nn;
            best = j;
          }
        }
        used[best] = true;
        std::vector<cplx> w = cand[best];
        double nw = std::sqrt(std::real(dot(w, w)));
        for (cplx &z : w) z /= nw;
        basis.push_back(w);
        for (int j = 0; j < n; ++j) {  // deflate remaining candidates
          if (used[j]) continue;
          const cplx ov = dot(w, cand[j]);
          for (int i = 0; i < n; ++i) cand[j][i] -= ov * w[i];
        }
      }
      for (int k = k0; k < k1; ++k)
        for (int i = 0; i < n; ++i) sd.vectors(i, k) = basis[static_cast<size_t>(k - k0)][i];
    }
    k0 = k1;
  }

  for (int k = 0; k < n; ++k) detail::canonical_phase(sd.vectors, k);
  return sd;
}

// exp(scale * A) via the spectral decomposition. scale is real for Gibbs
// weights or purely imaginary for unitary steps.
inline ComplexMatrix expm_hermitian(const HermitianOperator &a, cplx scale,
                                    const EigenOptions &opts = {}) {
  const SpectralDecomposition sd = spectral_decompose(a, opts);
  for (double e : sd.eigenvalues)
    if (std::abs(scale.real() * e) > defaults::exp_overflow_arg)
      throw std::range_error("expm_hermitian: exponent exceeds overflow guard");
  return sd.map_eigenvalues([&](double e) { return std::exp(scale * e); });
}

}  // namespace ggeft
