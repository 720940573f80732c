#pragma once

// Channel/state discrimination: Helstrom errors (binary closed form and the
// multi-hypothesis POVM program), the pairwise lower bound, geodesic speed
// limits on the number of channel queries, and the oracle runtime bounds.

#include <qmetro/bounds.hpp>
#include <qmetro/state.hpp>

#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace qmetro {

struct Ensemble {
  std::vector<DensityMatrix> states;
  RVec priors;
};

inline void validate_ensemble(const Ensemble& ens, double tol = 1e-12) {
  const int p = static_cast<int>(ens.states.size());
  if (p < 2 || ens.priors.size() != p)
    throw invalid_input("ensemble: needs >= 2 states with matching priors");
  double sum = 0.0;
  for (int x = 0; x < p; ++x) {
    if (ens.priors(x) < -tol) throw invalid_input("ensemble: negative prior");
    sum += ens.priors(x);
    validate_state(ens.states[x], 1e-9);
    if (ens.states[x].mat.rows() != ens.states[0].mat.rows())
      throw invalid_input("ensemble: state dimension mismatch");
  }
  if (std::abs(sum - 1.0) > tol)
    throw invalid_input("ensemble: priors must sum to 1");
}

// Minimal equal-prior error for two hypotheses: (1 - D_tr)/2.
inline double helstrom_binary(const DensityMatrix& r1, const DensityMatrix& r2) {
  return 0.5 * (1.0 - trace_distance(r1, r2));
}

// Minimal average error over POVMs: 1 - max sum_x p_x Tr[rho_x Pi_x],
// sum_x Pi_x = I, solved as a semidefinite program.
inline double helstrom_multi(const Ensemble& ens) {
  validate_ensemble(ens);
  const int p = static_cast<int>(ens.states.size());
  const int d = static_cast<int>(ens.states[0].mat.rows());
  const int nper = herm_param_count(d);
  // variables: Pi_1 .. Pi_{p-1}; Pi_p = I - sum of the others
  SdpProblem prob;
  prob.num_vars = (p - 1) * nper;
  prob.objective = RVec::Zero(prob.num_vars);
  for (int x = 0; x < p - 1; ++x) {
    CMat c = ens.priors(x) * ens.states[x].mat -
             ens.priors(p - 1) * ens.states[p - 1].mat;
    for (int k = 0; k < nper; ++k)
      prob.objective(x * nper + k) = -(herm_basis(d, k) * c).trace().real();
  }
  std::vector<int> ccols(d);
  std::iota(ccols.begin(), ccols.end(), 0);
  const CMat zero = CMat::Zero(d, d);
  for (int x = 0; x < p - 1; ++x) {
    std::vector<CMat> slabs(prob.num_vars, zero);
    for (int k = 0; k < nper; ++k)
      slabs[x * nper + k] = 0.5 * herm_basis(d, k);
    prob.blocks.push_back(make_complex_block(zero, ccols, slabs));
  }
  {
    std::vector<CMat> slabs(prob.num_vars, zero);
    for (int x = 0; x < p - 1; ++x)
      for (int k = 0; k < nper; ++k)
        slabs[x * nper + k] = -0.5 * herm_basis(d, k);
    prob.blocks.push_back(make_complex_block(CMat::Identity(d, d), ccols, slabs));
  }
  SdpSolution sol = solve_sdp(prob);
  if (sol.status != SdpStatus::optimal)
    throw invalid_input(std::string("helstrom_multi: solver status ") +
                        to_string(sol.status));
  double success = ens.priors(p - 1);
  for (int x = 0; x < p - 1; ++x) {
    CMat pix = herm_from_params(sol.y.segment(x * nper, nper), d);
    CMat c = ens.priors(x) * ens.states[x].mat -
             ens.priors(p - 1) * ens.states[p - 1].mat;
    success += (pix * c).trace().real();
  }
  return 1.0 - success;
}

// Pairwise lower bound on the multi-hypothesis error:
// (1 - (p-1)^{-1} sum_{x<y} || p_x rho_x - p_y rho_y ||_1) / 2.
inline double pairwise_error_lower_bound(const Ensemble& ens) {
  validate_ensemble(ens);
  const int p = static_cast<int>(ens.states.size());
  double sum = 0.0;
  for (int x = 0; x < p; ++x)
    for (int y = x + 1; y < p; ++y)
      sum += trace_norm(ens.priors(x) * ens.states[x].mat -
                        ens.priors(y) * ens.states[y].mat);
  return 0.5 * (1.0 - sum / (p - 1));
}

enum class DiscriminationTarget { error_probability, bures_angle };

struct SpeedLimitQuery {
  int num_channels = 0;
  std::function<double(double)> sql_bound_curve;  // theta -> B(theta) >= 0
  bool constant_curve = false;  // short-circuits the quadrature
  double theta_star = 0.0;
  DiscriminationTarget target = DiscriminationTarget::error_probability;
  double target_value = 0.0;  // epsilon in [0, 1/2) or delta in (0, pi/2]

  static SpeedLimitQuery constant(int p, double b, double theta_star,
                                  DiscriminationTarget t, double value) {
    SpeedLimitQuery q;
    q.num_channels = p;
    q.sql_bound_curve = [b](double) { return b; };
    q.constant_curve = true;
    q.theta_star = theta_star;
    q.target = t;
    q.target_value = value;
    return q;
  }
};

namespace discrimination_detail {

inline double simpson(const std::function<double(double)>& f, double a,
                      double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double fa, double fm, double fb,
                               double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson(f, a, m, fa, flm, fm);
  double right = simpson(f, m, b, fm, frm, fb);
  if (depth <= 0 || std::abs(left + right - whole) <=
                        15.0 * tol * std::max(std::abs(left + right), 1e-300))
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double rel_tol) {
  double m = 0.5 * (a + b);
  double fa = f(a), fm = f(m), fb = f(b);
  return adaptive_simpson(f, a, b, fa, fm, fb, simpson(f, a, b, fa, fm, fb),
                          rel_tol, 48);
}

}  // namespace discrimination_detail

// Lower bound on the number of channel queries needed to reach the target:
// N >= p (1-2eps)^2 / (int_0^{theta*} sqrt(B) dtheta)^2, or with a Bures-
// angle target delta, N >= p delta^2 / (same integral)^2.
inline double speed_limit_queries(const SpeedLimitQuery& q) {
  if (q.num_channels < 2)
    throw invalid_input("speed_limit: needs >= 2 channels");
  if (!(q.theta_star > 0)) throw invalid_input("speed_limit: theta_star must be > 0");
  double numerator;
  if (q.target == DiscriminationTarget::error_probability) {
    if (q.target_value < 0) throw invalid_input("speed_limit: epsilon < 0");
    if (q.target_value >= 0.5) return 0.0;  // the bound is trivial here
    numerator = q.num_channels * std::pow(1.0 - 2.0 * q.target_value, 2);
  } else {
    if (!(q.target_value > 0) || q.target_value > M_PI / 2 + 1e-12)
      throw invalid_input("speed_limit: delta must be in (0, pi/2]");
    numerator = q.num_channels * q.target_value * q.target_value;
  }
  double integral;
  if (q.constant_curve) {
    integral = std::sqrt(q.sql_bound_curve(0.0)) * q.theta_star;
  } else {
    integral = discrimination_detail::integrate(
        [&](double t) { return std::sqrt(std::max(q.sql_bound_curve(t), 0.0)); },
        0.0, q.theta_star, 1e-9);
  }
  if (!(integral > 0)) throw invalid_input("speed_limit: vanishing bound curve");
  return numerator / (integral * integral);
}

// Lower bound on the total runtime per oracle query, T/N >= delta^2 /
// (omega^2 B_omega), with the per-time ensemble bound B_omega computed from
// the continuous-time oracle model (not from its closed form).
inline double grover_runtime_bound(const std::string& noise, int d, double gamma,
                                   double omega, double delta) {
  if (d < 2) throw invalid_input("grover_runtime_bound: d >= 2 required");
  if (!(gamma > 0) || !(omega > 0))
    throw invalid_input("grover_runtime_bound: rates must be positive");
  if (!(delta > 0) || delta > M_PI / 2 + 1e-12)
    throw invalid_input("grover_runtime_bound: delta must be in (0, pi/2]");
  LindbladModel model = grover_lindblad(noise, d, gamma);
  double b_omega = markovian_sql_bound(model, RVec::Ones(d)).value;
  return delta * delta / (omega * omega * b_omega);
}

// d -> infinity limit of the dephasing-oracle runtime bound (B_omega -> 4/gamma).
inline double grover_runtime_cap_dephasing(double gamma, double omega,
                                           double delta) {
  return delta * delta * gamma / (4.0 * omega * omega);
}

}  // namespace qmetro
