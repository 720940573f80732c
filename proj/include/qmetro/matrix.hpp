// Dense complex matrix kernel: Hermitian eigendecompositions, matrix norms,
// SLD solves and the small helpers (kron, vectorization, partial traces)
// shared by every other module.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmetro {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

class invalid_input : public std::runtime_error {
 public:
  explicit invalid_input(const std::string& what) : std::runtime_error(what) {}
};

class invalid_state : public std::runtime_error {
 public:
  explicit invalid_state(const std::string& what) : std::runtime_error(what) {}
};

inline bool all_finite(const CMat& a) {
  return a.array().isFinite().all();
}

inline void require_finite(const CMat& a, const char* name) {
  if (!all_finite(a)) throw invalid_input(std::string(name) + ": non-finite entries");
}

/// Largest singular value.  For Hermitian input this equals max|lambda_i|.
inline double operator_norm(const CMat& a) {
  require_finite(a, "operator_norm");
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  return a.jacobiSvd().singularValues()(0);
}

/// Sum of singular values.
inline double trace_norm(const CMat& a) {
  require_finite(a, "trace_norm");
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  return a.jacobiSvd().singularValues().sum();
}

struct HermEig {
  RVec eigenvalues;  // ascending
  CMat eigenvectors; // unitary, columns match eigenvalues
};

/// Eigendecomposition of a Hermitian matrix; the input is symmetrized
/// internally so tiny Hermiticity violations are tolerated.
inline HermEig herm_eig(const CMat& a) {
  require_finite(a, "herm_eig");
  if (a.rows() != a.cols()) throw invalid_input("herm_eig: non-square matrix");
  CMat h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(h);
  if (es.info() != Eigen::Success) throw invalid_input("herm_eig: solver failure");
  return HermEig{es.eigenvalues(), es.eigenvectors()};
}

inline double herm_norm(const CMat& a) {
  // operator norm via eigenvalues, for matrices known to be Hermitian
  HermEig e = herm_eig(a);
  if (e.eigenvalues.size() == 0) return 0.0;
  return std::max(std::abs(e.eigenvalues(0)), std::abs(e.eigenvalues(e.eigenvalues.size() - 1)));
}

/// Solve drho = (L rho + rho L)/2 for Hermitian L on the support of rho.
/// In rho's eigenbasis L_ij = 2 (drho)_ij / (li + lj), with terms where
/// li + lj < eps zeroed out.
inline CMat sylvester_sld(const CMat& rho, const CMat& drho, double eps = -1.0) {
  require_finite(rho, "sylvester_sld");
  require_finite(drho, "sylvester_sld");
  HermEig er = herm_eig(rho);
  double tr = er.eigenvalues.sum();
  if (er.eigenvalues(0) < -1e-10 * std::max(1.0, tr))
    throw invalid_state("sylvester_sld: rho has a negative eigenvalue");
  if (eps < 0) eps = 1e-9 * tr;
  const CMat& v = er.eigenvectors;
  CMat d = v.adjoint() * (0.5 * (drho + drho.adjoint())) * v;
  CMat l = CMat::Zero(rho.rows(), rho.cols());
  for (Eigen::Index i = 0; i < rho.rows(); ++i)
    for (Eigen::Index j = 0; j < rho.cols(); ++j) {
      double s = er.eigenvalues(i) + er.eigenvalues(j);
      if (s >= eps) l(i, j) = 2.0 * d(i, j) / s;
    }
  return v * l * v.adjoint();
}

inline CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// |M> = sum_ij M_ij |i>|j>: row index in the first factor, column index in
/// the second.
inline CVec vectorize(const CMat& m) {
  CVec v(m.rows() * m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      v(i * m.cols() + j) = m(i, j);
  return v;
}

/// Partial trace over the first factor of A acting on C^{d1} (x) C^{d2}.
inline CMat partial_trace_first(const CMat& a, int d1, int d2) {
  CMat out = CMat::Zero(d2, d2);
  for (int i = 0; i < d1; ++i)
    out += a.block(i * d2, i * d2, d2, d2);
  return out;
}

/// Partial trace over the second factor.
inline CMat partial_trace_second(const CMat& a, int d1, int d2) {
  CMat out = CMat::Zero(d1, d1);
  for (int i = 0; i < d1; ++i)
    for (int j = 0; j < d1; ++j) {
      Complex s = 0;
      for (int k = 0; k < d2; ++k) s += a(i * d2 + k, j * d2 + k);
      out(i, j) = s;
    }
  return out;
}

// --- random generators used for property tests and the probe oracle ---

inline CMat random_cmat(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = Complex(n(rng), n(rng));
  return m;
}

inline CMat random_hermitian(std::mt19937_64& rng, int dim) {
  CMat m = random_cmat(rng, dim, dim);
  return 0.5 * (m + m.adjoint());
}

inline CMat random_unitary(std::mt19937_64& rng, int dim) {
  Eigen::HouseholderQR<CMat> qr(random_cmat(rng, dim, dim));
  CMat q = qr.householderQ() * CMat::Identity(dim, dim);
  CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < dim; ++i) {
    Complex d = r(i, i);
    q.col(i) *= (std::abs(d) > 0) ? d / std::abs(d) : 1.0;
  }
  return q;
}

inline CMat random_density(std::mt19937_64& rng, int dim) {
  CMat m = random_cmat(rng, dim, dim);
  CMat rho = m * m.adjoint();
  return rho / rho.trace().real();
}

}  // namespace qmetro
