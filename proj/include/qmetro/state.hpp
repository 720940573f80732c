#pragma once

// State-level metrology: SLD and purification QFI matrices, state metrics
// (fidelity, trace distance, Bures angle), and a gradient-ascent probe
// oracle that certifies channel bounds from below on small instances.

#include <qmetro/channel.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace qmetro {

struct DensityMatrix {
  CMat mat;
};

inline void validate_state(const DensityMatrix& rho, double tol = 1e-10) {
  const CMat& m = rho.mat;
  if (m.rows() != m.cols() || m.rows() == 0)
    throw invalid_input("state: density matrix must be square");
  if (operator_norm(m - m.adjoint()) > tol)
    throw invalid_input("state: density matrix must be Hermitian");
  if (std::abs(m.trace().real() - 1.0) > tol || std::abs(m.trace().imag()) > tol)
    throw invalid_input("state: density matrix must have unit trace");
  HermEig e = herm_eig(m);
  if (e.eigenvalues(0) < -tol)
    throw invalid_input("state: density matrix must be positive semidefinite");
}

struct StateModel {
  DensityMatrix rho;
  std::vector<CMat> drho;  // Hermitian traceless tangents, one per parameter
};

inline void validate_model(const StateModel& model, double tol = 1e-10) {
  validate_state(model.rho, tol);
  for (const CMat& d : model.drho) {
    if (d.rows() != model.rho.mat.rows() || d.cols() != model.rho.mat.cols())
      throw invalid_input("state: tangent dimension mismatch");
    if (operator_norm(d - d.adjoint()) > tol)
      throw invalid_input("state: tangents must be Hermitian");
    if (std::abs(d.trace()) > tol)
      throw invalid_input("state: tangents must be traceless");
  }
}

struct QfiSldResult {
  RMat fisher;   // F_ij = Re Tr[rho L_i L_j]
  CMat overlap;  // Tr[rho L_i L_j], used for the saturation check
};

// SLD quantum Fisher information matrix of a state model.
inline QfiSldResult qfi_matrix_sld(const StateModel& model, double eps = -1.0) {
  validate_model(model);
  const int p = static_cast<int>(model.drho.size());
  std::vector<CMat> slds;
  for (int i = 0; i < p; ++i)
    slds.push_back(sylvester_sld(model.rho.mat, model.drho[i], eps));
  QfiSldResult res;
  res.overlap = CMat::Zero(p, p);
  res.fisher = RMat::Zero(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      res.overlap(i, j) = (model.rho.mat * slds[i] * slds[j]).trace();
  res.fisher = 0.5 * (res.overlap.real() + res.overlap.real().transpose());
  return res;
}

// QFI matrix of a pure-state family given the Jacobian of the purification,
// jac = [ |d1 psi> ... |dp psi> ]:  4 Re[ jac^dag jac - jac^dag P jac ].
inline RMat qfi_matrix_purification(const CMat& jac, const CVec& psi) {
  if (jac.rows() != psi.size())
    throw invalid_input("qfi_matrix_purification: dimension mismatch");
  if (std::abs(psi.norm() - 1.0) > 1e-10)
    throw invalid_input("qfi_matrix_purification: state must be normalized");
  CMat overlaps = jac.adjoint() * jac;
  CVec a = jac.adjoint() * psi;
  CMat g = overlaps - a * a.adjoint();
  RMat f = 4.0 * g.real();
  return 0.5 * (f + f.transpose());
}

namespace state_detail {

inline CMat herm_sqrt(const CMat& m) {
  HermEig e = herm_eig(m);
  CMat s = CMat::Zero(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i) {
    double l = std::max(e.eigenvalues(i), 0.0);
    s += std::sqrt(l) * (e.eigenvectors.col(i) * e.eigenvectors.col(i).adjoint());
  }
  return s;
}

}  // namespace state_detail

// Uhlmann (square-root) fidelity F = tr sqrt( sqrt(r1) r2 sqrt(r1) ).
inline double fidelity(const DensityMatrix& r1, const DensityMatrix& r2) {
  if (r1.mat.rows() != r2.mat.rows())
    throw invalid_input("fidelity: dimension mismatch");
  CMat s = state_detail::herm_sqrt(r1.mat);
  HermEig e = herm_eig(CMat(s * r2.mat * s));
  double f = 0.0;
  for (int i = 0; i < e.eigenvalues.size(); ++i)
    f += std::sqrt(std::max(e.eigenvalues(i), 0.0));
  return std::clamp(f, 0.0, 1.0);
}

inline double trace_distance(const DensityMatrix& r1, const DensityMatrix& r2) {
  if (r1.mat.rows() != r2.mat.rows())
    throw invalid_input("trace_distance: dimension mismatch");
  return 0.5 * trace_norm(r1.mat - r2.mat);
}

inline double bures_angle(const DensityMatrix& r1, const DensityMatrix& r2) {
  return std::acos(fidelity(r1, r2));
}

struct ProbeOracleResult {
  double value = 0.0;
  CVec probe;  // unit vector on system (x) ancilla, ancilla dim = dim_in
};

namespace state_detail {

struct ExtendedChannel {
  int dim = 0;      // output dim of the extended channel
  int probe_dim = 0;
  std::vector<std::vector<CMat>> kraus;   // [x][j], on system (x) ancilla
  std::vector<std::vector<CMat>> dkraus;  // [x][j]
};

inline ExtendedChannel extend_with_ancilla(const ParamChannel& ch) {
  ExtendedChannel ext;
  const CMat id = CMat::Identity(ch.dim_in, ch.dim_in);
  ext.probe_dim = ch.dim_in * ch.dim_in;
  ext.dim = ch.dim_out * ch.dim_in;
  ext.kraus.resize(ch.num_params);
  ext.dkraus.resize(ch.num_params);
  for (int x = 0; x < ch.num_params; ++x)
    for (int j = 0; j < ch.kraus_rank(x); ++j) {
      ext.kraus[x].push_back(kron(ch.kraus[x][j], id));
      ext.dkraus[x].push_back(kron(ch.dkraus[x][j], id));
    }
  return ext;
}

inline double total_qfi_of_probe(const ExtendedChannel& ext, const RVec& weights,
                                 const CVec& probe) {
  CMat rho_in = probe * probe.adjoint();
  double total = 0.0;
  for (int x = 0; x < static_cast<int>(ext.kraus.size()); ++x) {
    CMat rho = CMat::Zero(ext.dim, ext.dim);
    CMat drho = CMat::Zero(ext.dim, ext.dim);
    for (std::size_t j = 0; j < ext.kraus[x].size(); ++j) {
      const CMat& k = ext.kraus[x][j];
      const CMat& dk = ext.dkraus[x][j];
      rho += k * rho_in * k.adjoint();
      drho += dk * rho_in * k.adjoint() + k * rho_in * dk.adjoint();
    }
    CMat l = sylvester_sld(rho, drho);
    total += weights(x) * (drho * l).trace().real();
  }
  return total;
}

}  // namespace state_detail

// Gradient-ascent maximization of the weighted total QFI over pure probes
// on system (x) ancilla; a lower bound on the extended-channel optimum.
// Deterministic for a fixed seed.
inline ProbeOracleResult probe_oracle_max_total_qfi(const ParamChannel& ch,
                                                    const RVec& weights,
                                                    int restarts = 64,
                                                    std::uint64_t seed = 20200828) {
  validate_shapes(ch);
  if (weights.size() != ch.num_params)
    throw invalid_input("probe_oracle: weight count mismatch");
  if (ch.dim_in * ch.dim_in > 36)
    throw invalid_input("probe_oracle: probe space too large");
  state_detail::ExtendedChannel ext = state_detail::extend_with_ancilla(ch);
  const int n = ext.probe_dim;

  auto objective = [&](const CVec& v) {
    return state_detail::total_qfi_of_probe(ext, weights, CVec(v / v.norm()));
  };

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  ProbeOracleResult best;
  best.probe = CVec::Zero(n);

  const double fd_step = 1e-6;
  for (int r = 0; r < restarts; ++r) {
    CVec v(n);
    for (int i = 0; i < n; ++i) v(i) = Complex(gauss(rng), gauss(rng));
    v /= v.norm();
    double f = objective(v);
    double step = 1e-2;
    for (int iter = 0; iter < 400; ++iter) {
      // finite-difference gradient in the 2n real coordinates
      CVec grad(n);
      for (int i = 0; i < n; ++i) {
        CVec vp = v, vm = v;
        vp(i) += fd_step;
        vm(i) -= fd_step;
        double gre = (objective(vp) - objective(vm)) / (2 * fd_step);
        vp = v;
        vm = v;
        vp(i) += Complex(0, fd_step);
        vm(i) -= Complex(0, fd_step);
        double gim = (objective(vp) - objective(vm)) / (2 * fd_step);
        grad(i) = Complex(gre, gim);
      }
      // project onto the tangent space of the unit sphere
      grad -= v * (v.adjoint() * grad)(0, 0).real();
      if (grad.norm() < 1e-7) break;
      bool advanced = false;
      while (step > 1e-12) {
        CVec cand = v + step * grad;
        cand /= cand.norm();
        double fc = objective(cand);
        if (fc > f + 1e-14) {
          v = cand;
          f = fc;
          advanced = true;
          step = std::min(step * 1.5, 1e-1);
          break;
        }
        step *= 0.5;
      }
      if (!advanced) break;
    }
    if (f > best.value) {
      best.value = f;
      best.probe = v;
    }
  }
  return best;
}

}  // namespace qmetro
