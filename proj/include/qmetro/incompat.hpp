#pragma once

// Probe-incompatibility costs: how much total precision is lost because one
// probe must serve every parameter at once.  Cost 1 means a single probe is
// simultaneously optimal; cost p means the parameters are fully incompatible.

#include <qmetro/bounds.hpp>
#include <qmetro/recovery.hpp>
#include <qmetro/state.hpp>

#include <string>
#include <vector>

namespace qmetro {

struct IncompatReport {
  RVec singles;   // per-parameter bound values F_x (or B_x)
  RVec weights;   // natural weights 1/F_x used for the joint bound
  double joint = 0.0;  // joint bound value at the natural weights
  double cost = 0.0;   // p / joint, in [1, p]
  std::string mode;    // "single_use" or "asymptotic"
};

namespace incompat_detail {

inline IncompatReport cost_report(const ParamChannel& ch, BoundMode mode) {
  validate_shapes(ch);
  const int p = ch.num_params;
  if (p < 2) throw invalid_input("incompatibility: needs at least 2 parameters");
  IncompatReport rep;
  rep.mode = (mode == BoundMode::single_use) ? "single_use" : "asymptotic";
  rep.singles = RVec(p);
  rep.weights = RVec(p);
  for (int x = 0; x < p; ++x) {
    double fx = single_parameter_bound(ch, x, mode);
    if (!(fx > 1e-9))
      throw invalid_input("incompatibility: degenerate parameter " +
                          (ch.labels.empty() ? std::to_string(x) : ch.labels[x]));
    rep.singles(x) = fx;
    rep.weights(x) = 1.0 / fx;
  }
  BoundResult joint = (mode == BoundMode::single_use)
                          ? single_use_bound(ch, rep.weights)
                          : sql_bound(ch, rep.weights);
  rep.joint = joint.value;
  rep.cost = p / joint.value;
  return rep;
}

}  // namespace incompat_detail

// Single-use probe-incompatibility cost: p / (joint bound at weights 1/F_x).
inline IncompatReport incompat_single_use(const ParamChannel& ch) {
  return incompat_detail::cost_report(ch, BoundMode::single_use);
}

// Asymptotic probe-incompatibility cost: p / (joint SQL bound at 1/B_x).
// Throws heisenberg_possible when a parameter admits Heisenberg scaling.
inline IncompatReport incompat_asymptotic(const ParamChannel& ch) {
  return incompat_detail::cost_report(ch, BoundMode::sql);
}

// Diagnostic for the parametrization behind the cost definitions: recover
// the optimal probe of each single-parameter problem, evaluate its full QFI
// matrix, and report the worst off-diagonal-to-diagonal Frobenius ratio.
// Near zero means the parametrization is natural (per-parameter optima do
// not trade information between parameters).
inline double naturalness_check(const ParamChannel& ch) {
  validate_shapes(ch);
  if (!ch.single_channel_mode())
    throw invalid_input("naturalness_check: requires one shared Kraus list");
  const int p = ch.num_params;
  state_detail::ExtendedChannel ext = state_detail::extend_with_ancilla(ch);
  // per-parameter optimal gauges; their alpha operators bound the information
  // a probe carries about each parameter from above
  std::vector<ParamChannel> subs;
  std::vector<CMat> alphas;
  std::vector<double> singles;
  for (int y = 0; y < p; ++y) {
    subs.push_back(select_parameter(ch, y));
    BoundResult by = single_use_bound(subs.back(), RVec::Ones(1));
    // zero-gauge alpha: a state-discriminating upper bound on parameter-y
    // information (the optimal-gauge alpha is flat on the optimal face)
    alphas.push_back(
        build_alpha_beta(subs.back(), HermitianGauge::zero(subs.back()), 0).first);
    singles.push_back(std::max(by.value, 1e-12));
  }
  double worst = 0.0;
  for (int x = 0; x < p; ++x) {
    const ParamChannel& sub = subs[x];
    // among the x-optimal probes, take the one least informative about the
    // other parameters -- the probe a per-parameter strategy would use
    CMat tilt = CMat::Zero(ch.dim_in, ch.dim_in);
    for (int y = 0; y < p; ++y)
      if (y != x) tilt += alphas[y] / singles[y];
    RecoveryResult rec = recover_optimal_state(sub, RVec::Ones(1),
                                               BoundMode::single_use, 1e-9, &tilt);
    if (!rec.feasible)
      throw invalid_input("naturalness_check: probe recovery infeasible for parameter " +
                          (ch.labels.empty() ? std::to_string(x) : ch.labels[x]));
    // purify the recovered probe onto system (x) ancilla
    HermEig e = herm_eig(rec.rho_star.mat);
    const int din = ch.dim_in;
    CVec psi = CVec::Zero(din * din);
    for (int i = 0; i < din; ++i) {
      CVec basis = CVec::Zero(din);
      basis(i) = 1.0;
      psi += std::sqrt(std::max(e.eigenvalues(i), 0.0)) *
             kron(CMat(e.eigenvectors.col(i)), CMat(basis));
    }
    CMat rho_in = psi * psi.adjoint();
    CMat rho = CMat::Zero(ext.dim, ext.dim);
    std::vector<CMat> drho(p, CMat::Zero(ext.dim, ext.dim));
    for (int y = 0; y < p; ++y)
      for (std::size_t j = 0; j < ext.kraus[y].size(); ++j) {
        if (y == 0) rho += ext.kraus[y][j] * rho_in * ext.kraus[y][j].adjoint();
        drho[y] += ext.dkraus[y][j] * rho_in * ext.kraus[y][j].adjoint() +
                   ext.kraus[y][j] * rho_in * ext.dkraus[y][j].adjoint();
      }
    QfiSldResult q = qfi_matrix_sld(StateModel{{rho}, drho});
    double diag = q.fisher.diagonal().norm();
    RMat off = q.fisher;
    off.diagonal().setZero();
    if (diag > 1e-12) worst = std::max(worst, off.norm() / diag);
  }
  return worst;
}

}  // namespace qmetro
