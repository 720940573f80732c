#pragma once

// Recovery of an optimal probe state from the solved gauge program: the
// probe lives in the top eigenspace of the weighted alpha operator and must
// satisfy the saddle-point stationarity constraints; within that set we
// return the state of maximal minimum eigenvalue (an interior point), or,
// when a tilt is supplied, the feasible state minimizing a linear functional.

#include <qmetro/bounds.hpp>
#include <qmetro/state.hpp>

#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace qmetro {

struct RecoveryResult {
  DensityMatrix rho_star;
  HermitianGauge gauge;   // optimal gauge the state was recovered against
  RVec weights;
  double bound_value = 0.0;
  bool feasible = false;
  int support_dim = 0;          // dimension of the selected eigenspace
  double eigen_gap = 0.0;       // separation below the selected eigenspace
  double constraint_residual = 0.0;  // max stationarity residual at rho_star
};

namespace recovery_detail {

// Gauge-shifted derivative Kraus stack entries for parameter x.
inline std::vector<CMat> shifted_dkraus(const ParamChannel& ch,
                                        const HermitianGauge& gauge, int x) {
  const int r = ch.kraus_rank(x);
  std::vector<CMat> out;
  out.reserve(r);
  for (int l = 0; l < r; ++l) {
    CMat kt = ch.dkraus[x][l];
    for (int m = 0; m < r; ++m) kt -= Complex(0, 1) * gauge.h[x](l, m) * ch.kraus[x][m];
    out.push_back(kt);
  }
  return out;
}

// Hermitian part of i * sum_{j,l} B_{jl} K_j^dag Ktilde_l for one gauge
// direction B; Re Tr[rho M] = Tr[rho herm(M)] for Hermitian rho.
inline CMat stationarity_matrix(const ParamChannel& ch,
                                const std::vector<CMat>& kt, int x,
                                const CMat& b) {
  const int r = ch.kraus_rank(x);
  CMat m = CMat::Zero(ch.dim_in, ch.dim_in);
  for (int j = 0; j < r; ++j)
    for (int l = 0; l < r; ++l)
      if (b(j, l) != Complex(0, 0))
        m += Complex(0, 1) * b(j, l) * (ch.kraus[x][j].adjoint() * kt[l]);
  return 0.5 * (m + m.adjoint());
}

// Basis of the nullspace of B -> sum B_{jl} K_j^dag K_l over Hermitian B,
// as real coordinate vectors in the herm_to_params convention.
inline std::vector<RVec> gauge_direction_nullspace(const ParamChannel& ch, int x) {
  const int r = ch.kraus_rank(x);
  const int n = herm_param_count(r);
  const int m = herm_param_count(ch.dim_in);
  RMat t(m, n);
  for (int k = 0; k < n; ++k) {
    CMat b = herm_basis(r, k);
    CMat out = CMat::Zero(ch.dim_in, ch.dim_in);
    for (int j = 0; j < r; ++j)
      for (int l = 0; l < r; ++l)
        if (b(j, l) != Complex(0, 0))
          out += b(j, l) * (ch.kraus[x][j].adjoint() * ch.kraus[x][l]);
    t.col(k) = herm_to_params(out);
  }
  Eigen::JacobiSVD<RMat> svd(t, Eigen::ComputeFullV);
  double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  std::vector<RVec> basis;
  for (int k = 0; k < n; ++k) {
    double s = k < svd.singularValues().size() ? svd.singularValues()(k) : 0.0;
    if (s <= 1e-10 * std::max(smax, 1.0)) basis.push_back(svd.matrixV().col(k));
  }
  return basis;
}

// Full-space stationarity matrices for every admissible gauge direction.
inline std::vector<CMat> stationarity_family(const ParamChannel& ch,
                                             const HermitianGauge& gauge,
                                             BoundMode mode) {
  std::vector<CMat> fams;
  for (int x = 0; x < ch.num_params; ++x) {
    std::vector<CMat> kt = shifted_dkraus(ch, gauge, x);
    const int r = ch.kraus_rank(x);
    std::vector<RVec> dirs;
    if (mode == BoundMode::sql) {
      dirs = gauge_direction_nullspace(ch, x);
    } else {
      for (int k = 0; k < herm_param_count(r); ++k) {
        RVec unit = RVec::Zero(herm_param_count(r));
        unit(k) = 1.0;
        dirs.push_back(unit);
      }
    }
    for (const RVec& dv : dirs)
      fams.push_back(stationarity_matrix(ch, kt, x, herm_from_params(dv, r)));
  }
  return fams;
}

struct FaceSolution {
  bool ok = false;
  CMat sigma;
  double residual = 0.0;
};

// Solve for a state on span(v) subject to the stationarity equalities.
// tilt == nullptr: maximize the minimum eigenvalue (analytic-center flavor);
// otherwise minimize Tr[sigma v^dag tilt v].
inline FaceSolution solve_face(const CMat& v, const std::vector<CMat>& family,
                               const CMat* tilt, double gap_tol) {
  const int m = static_cast<int>(v.cols());
  std::vector<CMat> constraint_mats;
  for (const CMat& full : family) {
    CMat c = v.adjoint() * full * v;
    if (c.norm() > 1e-12) constraint_mats.push_back(c);
  }

  const int nsig = herm_param_count(m);
  const bool center = (tilt == nullptr);
  SdpProblem prob;
  prob.num_vars = (center ? 1 : 0) + nsig;
  prob.objective = RVec::Zero(prob.num_vars);
  std::vector<int> ccols(m);
  std::iota(ccols.begin(), ccols.end(), 0);
  std::vector<CMat> cslabs;
  if (center) {
    prob.objective(0) = -1.0;  // maximize the minimum eigenvalue
    cslabs.push_back(-0.5 * CMat::Identity(m, m));
  } else {
    CMat c = v.adjoint() * (*tilt) * v;
    for (int k = 0; k < nsig; ++k)
      prob.objective(k) = (herm_basis(m, k) * c).trace().real();
  }
  for (int k = 0; k < nsig; ++k) cslabs.push_back(0.5 * herm_basis(m, k));
  prob.blocks.push_back(make_complex_block(CMat::Zero(m, m), ccols, cslabs));

  const int off = center ? 1 : 0;
  RVec trace_row = RVec::Zero(prob.num_vars);
  for (int k = 0; k < nsig; ++k)
    trace_row(off + k) = herm_basis(m, k).trace().real();
  prob.eq_constraints.emplace_back(trace_row, 1.0);
  for (const CMat& c : constraint_mats) {
    RVec row = RVec::Zero(prob.num_vars);
    for (int k = 0; k < nsig; ++k)
      row(off + k) = (herm_basis(m, k) * c).trace().real();
    prob.eq_constraints.emplace_back(row, 0.0);
  }

  SdpSolution sol = solve_sdp(prob, gap_tol);
  FaceSolution fs;
  fs.sigma = herm_from_params(sol.y.segment(off, nsig), m);
  fs.ok = (sol.status == SdpStatus::optimal) &&
          (!center || sol.y(0) >= -1e-9);
  for (const CMat& c : constraint_mats)
    fs.residual = std::max(fs.residual, std::abs((fs.sigma * c).trace().real()));
  return fs;
}

}  // namespace recovery_detail

// Recover an optimal probe from the solved bound.  The support starts as the
// eigenvalue cluster within 1e-7 (relative) of the top of the weighted alpha
// operator and grows through near-degenerate levels when the stationarity
// constraints are infeasible on the smaller space.  When `tilt` is given the
// returned state minimizes Tr[rho tilt] over the optimal face instead of
// being the interior point.
inline RecoveryResult recover_optimal_state(const ParamChannel& ch,
                                            const RVec& weights, BoundMode mode,
                                            double gap_tol = 1e-9,
                                            const CMat* tilt = nullptr) {
  const double bound_tol = std::min(gap_tol, 1e-11);
  BoundResult br = (mode == BoundMode::single_use)
                       ? single_use_bound(ch, weights, bound_tol)
                       : sql_bound(ch, weights, bound_tol);
  RecoveryResult res;
  res.gauge = br.gauge;
  res.weights = weights;
  res.bound_value = br.value;

  const int din = ch.dim_in;
  CMat abar = CMat::Zero(din, din);
  for (int x = 0; x < ch.num_params; ++x)
    abar += weights(x) * build_alpha_beta(ch, br.gauge, x).first;
  HermEig e = herm_eig(abar);
  const double amax = e.eigenvalues(din - 1);
  const double scale = std::max(operator_norm(abar), 1.0);
  const double cluster_tol = 1e-7 * scale;
  const double degenerate_tol = 1e-4 * scale;  // growth limit for split faces
  int first = din - 1;
  while (first > 0 && amax - e.eigenvalues(first - 1) <= cluster_tol) --first;

  std::vector<CMat> family =
      recovery_detail::stationarity_family(ch, br.gauge, mode);

  while (true) {
    CMat v = e.eigenvectors.rightCols(din - first);
    recovery_detail::FaceSolution fs =
        recovery_detail::solve_face(v, family, tilt, gap_tol);
    res.support_dim = din - first;
    res.eigen_gap = first > 0 ? amax - e.eigenvalues(first - 1) : 0.0;
    res.rho_star.mat = v * fs.sigma * v.adjoint();
    res.feasible = fs.ok;
    res.constraint_residual = fs.residual;
    bool acceptable = fs.ok && fs.residual <= 1e-7;
    bool can_grow = first > 0 && amax - e.eigenvalues(first - 1) <= degenerate_tol;
    if (acceptable || !can_grow) break;
    --first;  // admit the next near-degenerate level and retry
  }
  return res;
}

struct RecoveredQfi {
  RMat fisher;          // 4 Re Tr[rho* Ktilde_x^dag Ktilde_y]
  CMat complex_fisher;  // same without taking the real part
};

// Full QFI matrix of the recovered probe under the optimal gauge.
inline RecoveredQfi qfi_matrix_of_recovered(const RecoveryResult& result,
                                            const ParamChannel& ch,
                                            const HermitianGauge& gauge) {
  if (!ch.single_channel_mode())
    throw invalid_input("qfi_matrix_of_recovered: requires one shared Kraus list");
  const int p = ch.num_params;
  for (int x = 0; x < p; ++x)
    if (gauge.h[x].rows() != ch.kraus_rank(x))
      throw invalid_input("qfi_matrix_of_recovered: gauge dimension mismatch");
  std::vector<std::vector<CMat>> kt;
  for (int x = 0; x < p; ++x)
    kt.push_back(recovery_detail::shifted_dkraus(ch, gauge, x));
  RecoveredQfi out;
  out.complex_fisher = CMat::Zero(p, p);
  for (int x = 0; x < p; ++x)
    for (int y = 0; y < p; ++y) {
      CMat g = CMat::Zero(ch.dim_in, ch.dim_in);
      for (int l = 0; l < ch.kraus_rank(0); ++l)
        g += kt[x][l].adjoint() * kt[y][l];
      out.complex_fisher(x, y) = 4.0 * (result.rho_star.mat * g).trace();
    }
  RMat f = out.complex_fisher.real();
  out.fisher = 0.5 * (f + f.transpose());
  return out;
}

// True when the complex QFI matrix has a negligible imaginary part, the
// condition under which the scalar bound is asymptotically saturable.
inline bool check_holevo_saturation(const CMat& complex_qfi, double tol) {
  return complex_qfi.imag().cwiseAbs().maxCoeff() <= tol;
}

}  // namespace qmetro
