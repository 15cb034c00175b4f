#pragma once

#include <complex>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ggeft/constants.hpp"

namespace ggeft {

using cplx = std::complex<double>;

// Dense square complex matrix, row-major. Sized for desk-scale problems
// (dim <= ~64); all products are naive O(n^3).
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(int dim) : dim_(dim), a_(static_cast<size_t>(dim) * dim) {
    if (dim < 1) throw std::invalid_argument("ComplexMatrix: dim must be >= 1");
  }

  static ComplexMatrix identity(int dim) {
    ComplexMatrix m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }
  static ComplexMatrix zero(int dim) { return ComplexMatrix(dim); }

  int dim() const { return dim_; }

  cplx &operator()(int i, int j) { return a_[static_cast<size_t>(i) * dim_ + j]; }
  const cplx &operator()(int i, int j) const { return a_[static_cast<size_t>(i) * dim_ + j]; }

  ComplexMatrix adjoint() const {
    ComplexMatrix r(dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
  }

  cplx trace() const {
    cplx t = 0.0;
    for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
  }

  double max_abs() const {
    double m = 0.0;
    for (const cplx &z : a_) m = std::max(m, std::abs(z));
    return m;
  }

  bool approx_equal(const ComplexMatrix &o, double abs_tol) const {
    if (dim_ != o.dim_) return false;
    for (size_t k = 0; k < a_.size(); ++k)
      if (std::abs(a_[k] - o.a_[k]) > abs_tol) return false;
    return true;
  }

  ComplexMatrix &operator+=(const ComplexMatrix &o) {
    check_same_dim(o);
    for (size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
    return *this;
  }
  ComplexMatrix &operator-=(const ComplexMatrix &o) {
    check_same_dim(o);
    for (size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
    return *this;
  }
  ComplexMatrix &operator*=(cplx s) {
    for (cplx &z : a_) z *= s;
    return *this;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix &b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix &b) { return a -= b; }
  friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }
  friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }

  friend ComplexMatrix operator*(const ComplexMatrix &a, const ComplexMatrix &b) {
    a.check_same_dim(b);
    const int n = a.dim_;
    ComplexMatrix r(n);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        const cplx aik = a(i, k);
        if (aik == cplx(0.0)) continue;
        for (int j = 0; j < n; ++j) r(i, j) += aik * b(k, j);
      }
    return r;
  }

  // y = M x
  std::vector<cplx> apply(const std::vector<cplx> &x) const {
    if (static_cast<int>(x.size()) != dim_)
      throw std::invalid_argument("ComplexMatrix::apply: size mismatch");
    std::vector<cplx> y(dim_, cplx(0.0));
    for (int i = 0; i < dim_; ++i) {
      cplx acc = 0.0;
      for (int j = 0; j < dim_; ++j) acc += (*this)(i, j) * x[j];
      y[i] = acc;
    }
    return y;
  }

 private:
  void check_same_dim(const ComplexMatrix &o) const {
    if (dim_ != o.dim_) throw std::invalid_argument("ComplexMatrix: dimension mismatch");
  }

  int dim_ = 0;
  std::vector<cplx> a_;
};

// Kronecker product; joint index = i_first * dim(b) + i_second, so the first
// factor is the system when building |i^0, mu> style joint states.
inline ComplexMatrix tensor(const ComplexMatrix &a, const ComplexMatrix &b) {
  const int na = a.dim(), nb = b.dim();
  ComplexMatrix r(na * nb);
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < na; ++j) {
      const cplx aij = a(i, j);
      if (aij == cplx(0.0)) continue;
      for (int k = 0; k < nb; ++k)
        for (int l = 0; l < nb; ++l) r(i * nb + k, j * nb + l) = aij * b(k, l);
    }
  return r;
}

inline std::vector<cplx> tensor_vec(const std::vector<cplx> &a, const std::vector<cplx> &b) {
  std::vector<cplx> r(a.size() * b.size());
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t k = 0; k < b.size(); ++k) r[i * b.size() + k] = a[i] * b[k];
  return r;
}

inline cplx dot(const std::vector<cplx> &bra, const std::vector<cplx> &ket) {
  cplx s = 0.0;
  for (size_t k = 0; k < bra.size(); ++k) s += std::conj(bra[k]) * ket[k];
  return s;
}

// Hermitian observable with a human-readable label. Construction enforces
// hermiticity; everything downstream may assume M == M^dag.
class HermitianOperator {
 public:
  HermitianOperator() = default;
  explicit HermitianOperator(ComplexMatrix m, std::string label = "",
                             double tol = defaults::hermiticity_tol)
      : matrix_(std::move(m)), label_(std::move(label)) {
    double dev = (matrix_ - matrix_.adjoint()).max_abs();
    if (dev > tol) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.3e", dev);
      throw std::invalid_argument("HermitianOperator '" + label_ +
                                  "': hermiticity violated, deviation " + buf);
    }
    // symmetrize away the sub-tolerance residue so spectra are exactly real
    ComplexMatrix s = matrix_;
    const ComplexMatrix adj = matrix_.adjoint();
    for (int i = 0; i < s.dim(); ++i)
      for (int j = 0; j < s.dim(); ++j) s(i, j) = 0.5 * (s(i, j) + adj(i, j));
    matrix_ = std::move(s);
  }

  const ComplexMatrix &matrix() const { return matrix_; }
  const std::string &label() const { return label_; }
  int dim() const { return matrix_.dim(); }

 private:
  ComplexMatrix matrix_;
  std::string label_;
};

class UnitaryOperator {
 public:
  UnitaryOperator() = default;
  explicit UnitaryOperator(ComplexMatrix m, double tol = defaults::unitarity_tol)
      : matrix_(std::move(m)) {
    const ComplexMatrix gram = matrix_.adjoint() * matrix_;
    double dev = (gram - ComplexMatrix::identity(matrix_.dim())).max_abs();
    if (dev > tol) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.3e", dev);
      throw std::invalid_argument(std::string("UnitaryOperator: unitarity violated, deviation ") +
                                  buf);
    }
  }

  const ComplexMatrix &matrix() const { return matrix_; }
  int dim() const { return matrix_.dim(); }

 private:
  ComplexMatrix matrix_;
};

// AB - BA
inline ComplexMatrix commutator(const HermitianOperator &a, const HermitianOperator &b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("commutator: dimension mismatch");
  return a.matrix() * b.matrix() - b.matrix() * a.matrix();
}

inline ComplexMatrix commutator(const ComplexMatrix &a, const ComplexMatrix &b) {
  return a * b - b * a;
}

}  // namespace ggeft
