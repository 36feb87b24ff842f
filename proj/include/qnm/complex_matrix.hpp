// Copyright 2026 the qnm authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "qnm/errors.hpp"

namespace qnm {

using cplx = std::complex<double>;

/// Tolerance below which a matrix counts as Hermitian (max |A - A^dag|).
inline constexpr double kHermitianTol = 1e-12;

/// Dense square complex matrix. The single numeric carrier of the library:
/// 2x2 for states and qubit operators, 4x4 for superoperator actions and
/// Choi matrices. Plain value type, row-major storage.
class ComplexMatrix {
 public:
  explicit ComplexMatrix(std::size_t dim) : dim_(dim), a_(dim * dim) {
    if (dim == 0) throw DimensionError("ComplexMatrix: dim must be positive");
  }

  static ComplexMatrix identity(std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix from_rows(
      std::initializer_list<std::initializer_list<cplx>> rows) {
    ComplexMatrix m(rows.size());
    std::size_t r = 0;
    for (const auto& row : rows) {
      if (row.size() != m.dim_)
        throw DimensionError("from_rows: ragged row in matrix literal");
      std::size_t c = 0;
      for (const cplx& v : row) m(r, c++) = v;
      ++r;
    }
    return m;
  }

  std::size_t dim() const { return dim_; }

  cplx& operator()(std::size_t r, std::size_t c) { return a_[r * dim_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const {
    return a_[r * dim_ + c];
  }

  ComplexMatrix& operator+=(const ComplexMatrix& o) {
    require_same_dim(o, "+=");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
  }
  ComplexMatrix& operator-=(const ComplexMatrix& o) {
    require_same_dim(o, "-=");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
  }
  ComplexMatrix& operator*=(cplx s) {
    for (auto& v : a_) v *= s;
    return *this;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) {
    return a += b;
  }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) {
    return a -= b;
  }
  friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
  friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }
  friend ComplexMatrix operator*(ComplexMatrix a, double s) {
    return a *= cplx(s, 0.0);
  }
  friend ComplexMatrix operator*(double s, ComplexMatrix a) {
    return a *= cplx(s, 0.0);
  }
  ComplexMatrix operator-() const {
    ComplexMatrix m(*this);
    for (auto& v : m.a_) v = -v;
    return m;
  }

  friend ComplexMatrix operator*(const ComplexMatrix& a,
                                 const ComplexMatrix& b) {
    a.require_same_dim(b, "*");
    const std::size_t n = a.dim_;
    ComplexMatrix c(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        const cplx aik = a(i, k);
        if (aik == cplx{}) continue;
        for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  ComplexMatrix transpose() const {
    ComplexMatrix m(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) m(j, i) = (*this)(i, j);
    return m;
  }
  ComplexMatrix conjugate() const {
    ComplexMatrix m(*this);
    for (auto& v : m.a_) v = std::conj(v);
    return m;
  }
  ComplexMatrix adjoint() const { return transpose().conjugate(); }

  cplx trace() const {
    cplx t{};
    for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& v : a_) m = std::max(m, std::abs(v));
    return m;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const auto& v : a_) s += std::norm(v);
    return std::sqrt(s);
  }

  /// max |A_ij - conj(A_ji)|; zero for an exactly Hermitian matrix.
  double hermiticity_defect() const {
    double d = 0.0;
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = i; j < dim_; ++j)
        d = std::max(d, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return d;
  }

  bool is_hermitian(double tol = kHermitianTol) const {
    return hermiticity_defect() <= tol;
  }

  double max_abs_diff(const ComplexMatrix& o) const {
    require_same_dim(o, "max_abs_diff");
    double d = 0.0;
    for (std::size_t i = 0; i < a_.size(); ++i)
      d = std::max(d, std::abs(a_[i] - o.a_[i]));
    return d;
  }

 private:
  void require_same_dim(const ComplexMatrix& o, const char* op) const {
    if (dim_ != o.dim_)
      throw DimensionError(std::string("ComplexMatrix: dimension mismatch in ") +
                           op + " (" + std::to_string(dim_) + " vs " +
                           std::to_string(o.dim_) + ")");
  }

  std::size_t dim_;
  std::vector<cplx> a_;
};

inline std::vector<cplx> matvec(const ComplexMatrix& m,
                                const std::vector<cplx>& v) {
  if (v.size() != m.dim())
    throw DimensionError("matvec: vector length does not match matrix dim");
  std::vector<cplx> out(m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i) {
    cplx s{};
    for (std::size_t j = 0; j < m.dim(); ++j) s += m(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

/// Column-stacking vectorization, fixed project-wide: v[i + dim*j] = rho(i,j).
inline std::vector<cplx> vectorize(const ComplexMatrix& rho) {
  const std::size_t n = rho.dim();
  std::vector<cplx> v(n * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) v[i + n * j] = rho(i, j);
  return v;
}

inline ComplexMatrix devectorize(const std::vector<cplx>& v) {
  const auto n = static_cast<std::size_t>(std::llround(std::sqrt(
      static_cast<double>(v.size()))));
  if (n * n != v.size())
    throw DimensionError("devectorize: length " + std::to_string(v.size()) +
                         " is not a perfect square");
  ComplexMatrix m(n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) m(i, j) = v[i + n * j];
  return m;
}

/// Kronecker product; (A kron B)(C kron D) = AC kron BD.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t na = a.dim(), nb = b.dim();
  ComplexMatrix c(na * nb);
  for (std::size_t ia = 0; ia < na; ++ia)
    for (std::size_t ja = 0; ja < na; ++ja) {
      const cplx av = a(ia, ja);
      if (av == cplx{}) continue;
      for (std::size_t ib = 0; ib < nb; ++ib)
        for (std::size_t jb = 0; jb < nb; ++jb)
          c(ia * nb + ib, ja * nb + jb) = av * b(ib, jb);
    }
  return c;
}

struct EigenSystem {
  std::vector<double> values;  // descending
  ComplexMatrix vectors;       // orthonormal columns, vectors(:,k) <-> values[k]
};

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Sweeps until the off-diagonal Frobenius mass drops below
/// 1e-13 (scaled by the matrix norm). Intended for the 2x2/4x4 matrices
/// of this library; any dim is accepted.
inline EigenSystem hermitian_eigen(const ComplexMatrix& input) {
  const double defect = input.hermiticity_defect();
  if (defect > kHermitianTol)
    throw InvariantViolation(
        "hermitian_eigen: input is not Hermitian, max|A - A^dag| = " +
        std::to_string(defect));

  const std::size_t n = input.dim();
  ComplexMatrix a = (input + input.adjoint()) * 0.5;
  ComplexMatrix vecs = ComplexMatrix::identity(n);
  const double tol = 1e-13 * std::max(1.0, a.frobenius_norm());

  auto off_mass = [&]() {
    double s = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) s += 2.0 * std::norm(a(p, q));
    return std::sqrt(s);
  };

  const int max_sweeps = 100;
  int sweep = 0;
  while (off_mass() > tol) {
    if (++sweep > max_sweeps)
      throw ConvergenceError("hermitian_eigen: Jacobi sweeps did not converge");
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag <= 1e-300) continue;
        // Strip the phase of a_pq, then a real rotation annihilates it.
        const cplx phase = apq / mag;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * mag);
        const double t =
            (theta >= 0 ? 1.0 : -1.0) /
            (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        ComplexMatrix j = ComplexMatrix::identity(n);
        j(p, p) = c;
        j(p, q) = s;
        j(q, p) = -s * std::conj(phase);
        j(q, q) = c * std::conj(phase);

        a = j.adjoint() * a * j;
        a(p, q) = a(q, p) = 0.0;  // annihilated by construction
        vecs = vecs * j;
      }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a(x, x).real() > a(y, y).real();
  });

  EigenSystem out{std::vector<double>(n), ComplexMatrix(n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = vecs(r, order[k]);
  }
  return out;
}

/// Trace norm (sum of singular values). Hermitian inputs take the direct
/// sum-of-|eigenvalues| route; general inputs go through A^dag A with a
/// clamp for eigenvalues that round just below zero.
inline double trace_norm(const ComplexMatrix& a) {
  if (a.is_hermitian()) {
    const EigenSystem es = hermitian_eigen(a);
    double s = 0.0;
    for (double lam : es.values) s += std::abs(lam);
    return s;
  }
  const ComplexMatrix gram = a.adjoint() * a;
  const EigenSystem es = hermitian_eigen(gram);
  const double clamp = 1e-12 * std::max(1.0, gram.frobenius_norm());
  double s = 0.0;
  for (double lam : es.values) {
    if (lam < -clamp)
      throw InvariantViolation(
          "trace_norm: A^dag A produced eigenvalue " + std::to_string(lam));
    s += std::sqrt(std::max(lam, 0.0));
  }
  return s;
}

/// Gauss-Jordan inverse with partial pivoting.
inline ComplexMatrix inverse(const ComplexMatrix& m) {
  const std::size_t n = m.dim();
  ComplexMatrix a(m);
  ComplexMatrix inv = ComplexMatrix::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    if (std::abs(a(piv, col)) < 1e-14 * std::max(1.0, m.max_abs()))
      throw InvariantViolation("inverse: matrix is numerically singular");
    if (piv != col)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(piv, j), a(col, j));
        std::swap(inv(piv, j), inv(col, j));
      }
    const cplx d = a(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      a(col, j) /= d;
      inv(col, j) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const cplx f = a(r, col);
      if (f == cplx{}) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a(r, j) -= f * a(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

}  // namespace qnm
