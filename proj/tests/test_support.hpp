#pragma once

// Shared fixtures and independent oracles for the test suites. Everything
// here recomputes expected values from first principles (explicit index
// arithmetic, small dense eigensolves) without calling the library paths
// under test.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <complex>
#include <random>
#include <vector>

#include "ffqls/tensor.hpp"

namespace testsupport {

using ffqls::cxd;
using ffqls::Matrix;
using ffqls::Vector;

inline Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline Matrix pauli_y() {
  Matrix m(2, 2);
  m << 0, cxd(0, -1), cxd(0, 1), 0;
  return m;
}

inline Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

inline Matrix sigma_minus() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1;
  return m;
}

inline Vector basis_ket(int dim, int k) {
  Vector v = Vector::Zero(dim);
  v(k) = 1;
  return v;
}

// digits of a mixed-radix index, subsystem 0 most significant
inline std::vector<int> digits_of(int idx, const std::vector<int>& dims) {
  std::vector<int> d(dims.size());
  for (int a = static_cast<int>(dims.size()) - 1; a >= 0; --a) {
    d[a] = idx % dims[a];
    idx /= dims[a];
  }
  return d;
}

inline int index_of(const std::vector<int>& digits, const std::vector<int>& dims) {
  int idx = 0;
  for (size_t a = 0; a < dims.size(); ++a) idx = idx * dims[a] + digits[a];
  return idx;
}

// Oracle: neighborhood embedding by elementwise formula
// M[(i),(j)] = op(i_N, j_N) * delta(i_comp, j_comp).
inline Matrix embed_oracle(const Matrix& op, const std::vector<int>& nbhd,
                           const std::vector<int>& dims) {
  std::vector<int> comp;
  for (int a = 0; a < static_cast<int>(dims.size()); ++a)
    if (std::find(nbhd.begin(), nbhd.end(), a) == nbhd.end()) comp.push_back(a);
  int D = 1;
  for (int d : dims) D *= d;
  std::vector<int> nb_dims;
  for (int a : nbhd) nb_dims.push_back(dims[a]);

  Matrix out = Matrix::Zero(D, D);
  for (int i = 0; i < D; ++i) {
    const auto di = digits_of(i, dims);
    for (int j = 0; j < D; ++j) {
      const auto dj = digits_of(j, dims);
      bool diag = true;
      for (int a : comp)
        if (di[a] != dj[a]) diag = false;
      if (!diag) continue;
      std::vector<int> iN, jN;
      for (int a : nbhd) {
        iN.push_back(di[a]);
        jN.push_back(dj[a]);
      }
      out(i, j) = op(index_of(iN, nb_dims), index_of(jN, nb_dims));
    }
  }
  return out;
}

// Oracle: partial trace by elementwise summation over the complement digits.
inline Matrix partial_trace_oracle(const Matrix& M, const std::vector<int>& keep,
                                   const std::vector<int>& dims) {
  std::vector<int> comp;
  for (int a = 0; a < static_cast<int>(dims.size()); ++a)
    if (std::find(keep.begin(), keep.end(), a) == keep.end()) comp.push_back(a);
  std::vector<int> keep_dims, comp_dims;
  for (int a : keep) keep_dims.push_back(dims[a]);
  for (int a : comp) comp_dims.push_back(dims[a]);
  int dK = 1, dC = 1;
  for (int d : keep_dims) dK *= d;
  for (int d : comp_dims) dC *= d;

  Matrix out = Matrix::Zero(dK, dK);
  for (int i = 0; i < dK; ++i) {
    const auto ki = digits_of(i, keep_dims);
    for (int j = 0; j < dK; ++j) {
      const auto kj = digits_of(j, keep_dims);
      for (int c = 0; c < dC; ++c) {
        const auto cc = digits_of(c, comp_dims);
        std::vector<int> gi(dims.size()), gj(dims.size());
        for (size_t t = 0; t < keep.size(); ++t) {
          gi[keep[t]] = ki[t];
          gj[keep[t]] = kj[t];
        }
        for (size_t t = 0; t < comp.size(); ++t) {
          gi[comp[t]] = cc[t];
          gj[comp[t]] = cc[t];
        }
        out(i, j) += M(index_of(gi, dims), index_of(gj, dims));
      }
    }
  }
  return out;
}

// Oracle: direct evaluation of the Lindblad right-hand side on a matrix.
inline Matrix lindblad_rhs_oracle(const Matrix* H, const std::vector<Matrix>& Ls,
                                  const Matrix& rho) {
  Matrix out = Matrix::Zero(rho.rows(), rho.cols());
  if (H != nullptr) out += cxd(0, -1) * ((*H) * rho - rho * (*H));
  for (const auto& L : Ls) {
    const Matrix LdL = L.adjoint() * L;
    out += L * rho * L.adjoint() - 0.5 * (LdL * rho + rho * LdL);
  }
  return out;
}

// Oracle: null space dimension + orthonormal basis of a (small) matrix by SVD.
inline std::vector<Vector> null_space_oracle(const Matrix& M, double rel_tol = 1e-10) {
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double top = s.size() > 0 ? s(0) : 0.0;
  std::vector<Vector> out;
  for (Eigen::Index k = 0; k < svd.matrixV().cols(); ++k) {
    const double sv = k < s.size() ? s(k) : 0.0;
    if (top == 0.0 || sv <= rel_tol * top) out.push_back(svd.matrixV().col(k));
  }
  return out;
}

inline Matrix random_density(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix G(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) G(i, j) = cxd(gauss(rng), gauss(rng));
  Matrix rho = G * G.adjoint();
  rho /= rho.trace();
  return rho;
}

inline Vector random_pure(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = cxd(gauss(rng), gauss(rng));
  v.normalize();
  return v;
}

inline Matrix random_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix G(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) G(i, j) = cxd(gauss(rng), gauss(rng));
  return G;
}

}  // namespace testsupport
