#pragma once

// Channel precision bounds: single-use and asymptotic-SQL total-QFI bounds
// via the operator-norm epigraph SDP, finite-N and parallel-strategy
// evaluations, the Markovian (Lindblad) SQL bound, the RLD Choi-matrix
// bound, the noiseless generator bound, and per-parameter sums.

#include <qmetro/channel.hpp>
#include <qmetro/sdp.hpp>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmetro {

// Raised when a beta_x = 0 gauge does not exist for some parameter, i.e.
// the asymptotic bound does not apply and super-linear scaling is possible.
class heisenberg_possible : public std::runtime_error {
 public:
  explicit heisenberg_possible(const std::string& what)
      : std::runtime_error(what) {}
};

// Per-parameter Hermitian gauge matrices h_x (size = Kraus count of x).
struct HermitianGauge {
  std::vector<CMat> h;

  static HermitianGauge zero(const ParamChannel& ch) {
    HermitianGauge g;
    for (int x = 0; x < ch.num_params; ++x) {
      int r = ch.kraus_rank(x);
      g.h.push_back(CMat::Zero(r, r));
    }
    return g;
  }
};

struct BoundResult {
  double value = 0.0;
  HermitianGauge gauge;
  RVec weights;
  SdpSolution solver;
  std::vector<double> beta_residuals;
};

// alpha_x = (dK - i h K)^dag (dK - i h K), beta_x = (dK - i h K)^dag K for
// the stacked Kraus lists of parameter x.
inline std::pair<CMat, CMat> build_alpha_beta(const ParamChannel& ch,
                                              const HermitianGauge& gauge,
                                              int x) {
  const int r = ch.kraus_rank(x);
  const CMat& h = gauge.h[x];
  if (h.rows() != r || h.cols() != r)
    throw invalid_input("build_alpha_beta: gauge dimension mismatch");
  CMat alpha = CMat::Zero(ch.dim_in, ch.dim_in);
  CMat beta = CMat::Zero(ch.dim_in, ch.dim_in);
  for (int j = 0; j < r; ++j) {
    CMat dj = ch.dkraus[x][j];
    for (int l = 0; l < r; ++l) dj -= Complex(0, 1) * h(j, l) * ch.kraus[x][l];
    alpha += dj.adjoint() * dj;
    beta += dj.adjoint() * ch.kraus[x][j];
  }
  return {alpha, beta};
}

namespace bound_detail {

inline void check_weights(const ParamChannel& ch, const RVec& weights) {
  if (weights.size() != ch.num_params)
    throw invalid_input("bound: weight count != num_params");
  for (int x = 0; x < ch.num_params; ++x)
    if (!(weights(x) > 0)) throw invalid_input("bound: weights must be > 0");
}

// Shared scaffolding of the epigraph program
//   minimize t  s.t.  [[t I_din, D^dag],[D, I]] >= 0,
//   D = stack_x sqrt(w_x) (dK_x - i h_x K_x),
// optionally with the linear equalities beta_x = 0.
struct GaugeProgram {
  SdpProblem prob;
  std::vector<int> offsets;  // first gauge-variable index per parameter
  std::vector<int> ranks;
};

inline GaugeProgram build_gauge_program(const ParamChannel& ch,
                                        const RVec& weights, bool beta_zero) {
  validate_shapes(ch);
  check_weights(ch, weights);
  const int din = ch.dim_in, dout = ch.dim_out, p = ch.num_params;

  GaugeProgram gp;
  gp.ranks.resize(p);
  gp.offsets.resize(p);
  int nvars = 1;  // epigraph variable t first
  int dbar = 0;
  for (int x = 0; x < p; ++x) {
    gp.ranks[x] = ch.kraus_rank(x);
    gp.offsets[x] = nvars;
    nvars += herm_param_count(gp.ranks[x]);
    dbar += dout * gp.ranks[x];
  }
  const int nc = din + dbar;

  CMat f0c = CMat::Zero(nc, nc);
  f0c.bottomRightCorner(dbar, dbar) = CMat::Identity(dbar, dbar);
  std::vector<int> row0(p);
  {
    int row = din;
    for (int x = 0; x < p; ++x) {
      row0[x] = row;
      double sq = std::sqrt(weights(x));
      for (int j = 0; j < gp.ranks[x]; ++j) {
        f0c.block(row, 0, dout, din) = sq * ch.dkraus[x][j];
        row += dout;
      }
    }
    f0c.block(0, din, din, dbar) =
        f0c.block(din, 0, dbar, din).adjoint();
  }

  std::vector<int> ccols(din);
  for (int i = 0; i < din; ++i) ccols[i] = i;
  std::vector<CMat> cslabs(nvars, CMat::Zero(nc, din));
  cslabs[0].topLeftCorner(din, din) = 0.5 * CMat::Identity(din, din);
  for (int x = 0; x < p; ++x) {
    const int r = gp.ranks[x];
    const double sq = std::sqrt(weights(x));
    for (int k = 0; k < herm_param_count(r); ++k) {
      CMat bk = herm_basis(r, k);
      CMat& slab = cslabs[gp.offsets[x] + k];
      for (int j = 0; j < r; ++j)
        for (int l = 0; l < r; ++l)
          if (std::abs(bk(j, l)) > 0)
            slab.block(row0[x] + j * dout, 0, dout, din) -=
                Complex(0, 1) * sq * bk(j, l) * ch.kraus[x][l];
    }
  }

  gp.prob.num_vars = nvars;
  gp.prob.objective = RVec::Zero(nvars);
  gp.prob.objective(0) = 1.0;
  gp.prob.blocks.push_back(make_complex_block(f0c, ccols, cslabs));

  if (beta_zero) {
    for (int x = 0; x < p; ++x) {
      const int r = gp.ranks[x];
      CMat b0 = CMat::Zero(din, din);
      for (int j = 0; j < r; ++j)
        b0 += ch.dkraus[x][j].adjoint() * ch.kraus[x][j];
      std::vector<CMat> coef(herm_param_count(r));
      for (int k = 0; k < herm_param_count(r); ++k) {
        CMat bk = herm_basis(r, k);
        CMat c = CMat::Zero(din, din);
        for (int l = 0; l < r; ++l)
          for (int j = 0; j < r; ++j)
            if (std::abs(bk(l, j)) > 0)
              c += Complex(0, 1) * bk(l, j) *
                   (ch.kraus[x][l].adjoint() * ch.kraus[x][j]);
        coef[k] = c;
      }
      for (int a = 0; a < din; ++a)
        for (int b = 0; b < din; ++b) {
          RVec re = RVec::Zero(nvars), im = RVec::Zero(nvars);
          for (int k = 0; k < herm_param_count(r); ++k) {
            re(gp.offsets[x] + k) = coef[k](a, b).real();
            im(gp.offsets[x] + k) = coef[k](a, b).imag();
          }
          gp.prob.eq_constraints.push_back({re, -b0(a, b).real()});
          gp.prob.eq_constraints.push_back({im, -b0(a, b).imag()});
        }
    }
  }
  return gp;
}

inline BoundResult finish_gauge_solution(const ParamChannel& ch,
                                         const RVec& weights,
                                         const GaugeProgram& gp,
                                         SdpSolution&& sol) {
  BoundResult res;
  res.value = 4.0 * sol.y(0);
  res.weights = weights;
  for (int x = 0; x < ch.num_params; ++x) {
    const int r = gp.ranks[x];
    res.gauge.h.push_back(herm_from_params(
        sol.y.segment(gp.offsets[x], herm_param_count(r)), r));
  }
  for (int x = 0; x < ch.num_params; ++x)
    res.beta_residuals.push_back(
        operator_norm(build_alpha_beta(ch, res.gauge, x).second));
  res.solver = std::move(sol);
  return res;
}

}  // namespace bound_detail

// 4 min_h || sum_x w_x alpha_x ||: the one-shot extended-channel total-QFI
// bound (attained by the best entangled probe).
inline BoundResult single_use_bound(const ParamChannel& ch, const RVec& weights,
                                    double gap_tol = 1e-9) {
  bound_detail::GaugeProgram gp =
      bound_detail::build_gauge_program(ch, weights, false);
  return bound_detail::finish_gauge_solution(ch, weights, gp,
                                             solve_sdp(gp.prob, gap_tol));
}

// Same minimization restricted to gauges with beta_x = 0: the per-use
// asymptotic bound for adaptive strategies at the standard quantum limit.
inline BoundResult sql_bound(const ParamChannel& ch, const RVec& weights,
                             double gap_tol = 1e-9) {
  std::string offending;
  for (int x = 0; x < ch.num_params; ++x)
    if (!hks_check(ch, x).satisfied) {
      if (!offending.empty()) offending += ", ";
      offending += ch.labels.empty() ? std::to_string(x) : ch.labels[x];
    }
  if (!offending.empty())
    throw heisenberg_possible(
        "sql_bound: no vanishing-beta gauge exists for parameter(s) " +
        offending + "; super-linear precision scaling is not ruled out");
  bound_detail::GaugeProgram gp =
      bound_detail::build_gauge_program(ch, weights, true);
  return bound_detail::finish_gauge_solution(ch, weights, gp,
                                             solve_sdp(gp.prob, gap_tol));
}

// Finite-N adaptive-strategy bound, evaluated verbatim at each candidate
// gauge (the expression is not jointly convex in the gauge):
//   4{ N ||sum w a|| + N(N-1) max_x||b_x|| [ ||sum w b|| + 2 sqrt((sum w)||sum w a||) ] }
inline double finite_n_bound_eval(const ParamChannel& ch, const RVec& weights,
                                  const std::vector<HermitianGauge>& candidates,
                                  long long n) {
  bound_detail::check_weights(ch, weights);
  if (n < 1) throw invalid_input("finite_n_bound_eval: N >= 1 required");
  if (candidates.empty())
    throw invalid_input("finite_n_bound_eval: no gauge candidates");
  double best = std::numeric_limits<double>::infinity();
  for (const HermitianGauge& g : candidates) {
    CMat asum = CMat::Zero(ch.dim_in, ch.dim_in);
    CMat bsum = CMat::Zero(ch.dim_in, ch.dim_in);
    double maxb = 0.0;
    for (int x = 0; x < ch.num_params; ++x) {
      auto [a, b] = build_alpha_beta(ch, g, x);
      asum += weights(x) * a;
      bsum += weights(x) * b;
      maxb = std::max(maxb, operator_norm(b));
    }
    double na = operator_norm(asum);
    double val = 4.0 * (n * na +
                        double(n) * double(n - 1) * maxb *
                            (operator_norm(bsum) +
                             2.0 * std::sqrt(weights.sum() * na)));
    best = std::min(best, val);
  }
  return best;
}

// Parallel-strategy bound 4{ N ||sum w a|| + N(N-1) ||sum w b_x^2|| },
// with b_x^2 evaluated literally; gauges where beta_x deviates from
// Hermitian by more than 1e-8 are reported through hermiticity_flags.
inline double parallel_bound_eval(const ParamChannel& ch, const RVec& weights,
                                  const std::vector<HermitianGauge>& candidates,
                                  long long n,
                                  std::vector<bool>* hermiticity_flags = nullptr) {
  bound_detail::check_weights(ch, weights);
  if (n < 1) throw invalid_input("parallel_bound_eval: N >= 1 required");
  if (candidates.empty())
    throw invalid_input("parallel_bound_eval: no gauge candidates");
  if (hermiticity_flags) hermiticity_flags->assign(candidates.size(), false);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const HermitianGauge& g = candidates[c];
    CMat asum = CMat::Zero(ch.dim_in, ch.dim_in);
    CMat b2sum = CMat::Zero(ch.dim_in, ch.dim_in);
    for (int x = 0; x < ch.num_params; ++x) {
      auto [a, b] = build_alpha_beta(ch, g, x);
      asum += weights(x) * a;
      b2sum += weights(x) * (b * b);
      if (hermiticity_flags && operator_norm(b - b.adjoint()) > 1e-8)
        (*hermiticity_flags)[c] = true;
    }
    double val = 4.0 * (n * operator_norm(asum) +
                        double(n) * double(n - 1) * operator_norm(b2sum));
    best = std::min(best, val);
  }
  return best;
}

// The standard candidate set for the finite-N evaluations: h = 0, the
// single-use optimal gauge, and (when it exists) the SQL optimal gauge.
inline std::vector<HermitianGauge> default_gauge_candidates(
    const ParamChannel& ch, const RVec& weights) {
  std::vector<HermitianGauge> cands;
  cands.push_back(HermitianGauge::zero(ch));
  cands.push_back(single_use_bound(ch, weights).gauge);
  try {
    cands.push_back(sql_bound(ch, weights).gauge);
  } catch (const heisenberg_possible&) {
  }
  return cands;
}

// Asymptotic SQL bound per unit time for Markovian dynamics:
//   4 min || sum_x w_x B_x^dag B_x ||  over  {h0_x, hvec_x, hmat_x}
//   with B_x = stack_j (hvec_x)_j I + sum_k (hmat_x)_{jk} L_{x,k}
// subject to H_x + h0_x I + hvec^dag L + L^dag hvec + L^dag hmat L = 0.
// The norm and the constraint are restricted to the probe subspace of the
// model: absorbing flag levels are never prepared, so neither the dynamics
// constraint nor the cost on those levels affects achievable precision.
inline BoundResult markovian_sql_bound(const LindbladModel& model,
                                       const RVec& weights,
                                       double gap_tol = 1e-9) {
  const int p = model.num_params;
  const int d = model.dim;
  const int di = model.probe_subspace_dim();
  if (weights.size() != p)
    throw invalid_input("markovian_sql_bound: weight count mismatch");
  for (int x = 0; x < p; ++x)
    if (!(weights(x) > 0))
      throw invalid_input("markovian_sql_bound: weights must be > 0");
  std::string offending;
  for (int x = 0; x < p; ++x)
    if (!hls_check(model, x).satisfied) {
      if (!offending.empty()) offending += ", ";
      offending += std::to_string(x);
    }
  if (!offending.empty())
    throw heisenberg_possible(
        "markovian_sql_bound: Hamiltonian outside the dissipative span for "
        "parameter(s) " + offending +
        "; super-linear precision scaling is not ruled out");

  // variable layout per parameter: [h0 | re c_1, im c_1, ..., re c_J, im c_J
  //                                 | J^2 Hermitian-matrix parameters]
  std::vector<int> jx(p), off(p), row0(p);
  int nvars = 1, dbar = 0;
  for (int x = 0; x < p; ++x) {
    jx[x] = static_cast<int>(model.collapse_ops[x].size());
    off[x] = nvars;
    nvars += 1 + 2 * jx[x] + herm_param_count(jx[x]);
    row0[x] = di + dbar;
    dbar += d * jx[x];
  }
  const int nc = di + dbar;

  CMat f0c = CMat::Zero(nc, nc);
  f0c.bottomRightCorner(dbar, dbar) = CMat::Identity(dbar, dbar);
  std::vector<int> ccols(di);
  for (int i = 0; i < di; ++i) ccols[i] = i;
  std::vector<CMat> cslabs(nvars, CMat::Zero(nc, di));
  cslabs[0].topLeftCorner(di, di) = 0.5 * CMat::Identity(di, di);

  SdpProblem prob;
  for (int x = 0; x < p; ++x) {
    const double sq = std::sqrt(weights(x));
    const auto& ls = model.collapse_ops[x];
    // hvec entries
    for (int j = 0; j < jx[x]; ++j) {
      cslabs[off[x] + 1 + 2 * j].block(row0[x] + j * d, 0, d, di) =
          sq * CMat::Identity(d, d).leftCols(di);
      cslabs[off[x] + 2 + 2 * j].block(row0[x] + j * d, 0, d, di) =
          Complex(0, 1) * sq * CMat::Identity(d, d).leftCols(di);
    }
    // hmat entries
    for (int k = 0; k < herm_param_count(jx[x]); ++k) {
      CMat bk = herm_basis(jx[x], k);
      CMat& slab = cslabs[off[x] + 1 + 2 * jx[x] + k];
      for (int j = 0; j < jx[x]; ++j)
        for (int m = 0; m < jx[x]; ++m)
          if (std::abs(bk(j, m)) > 0)
            slab.block(row0[x] + j * d, 0, d, di) +=
                sq * bk(j, m) * ls[m].leftCols(di);
    }
    // beta equalities on the probe subspace
    for (int a = 0; a < di; ++a)
      for (int b = 0; b < di; ++b) {
        RVec re = RVec::Zero(nvars), im = RVec::Zero(nvars);
        auto put = [&](int var, Complex c) {
          re(var) = c.real();
          im(var) = c.imag();
        };
        put(off[x], (a == b) ? Complex(1, 0) : Complex(0, 0));
        for (int j = 0; j < jx[x]; ++j) {
          CMat sym = ls[j] + ls[j].adjoint();
          CMat asym = Complex(0, 1) * (ls[j].adjoint() - ls[j]);
          put(off[x] + 1 + 2 * j, sym(a, b));
          put(off[x] + 2 + 2 * j, asym(a, b));
        }
        for (int k = 0; k < herm_param_count(jx[x]); ++k) {
          CMat bk = herm_basis(jx[x], k);
          Complex c(0, 0);
          for (int j = 0; j < jx[x]; ++j)
            for (int m = 0; m < jx[x]; ++m)
              if (std::abs(bk(j, m)) > 0)
                c += bk(j, m) * (ls[j].adjoint() * ls[m])(a, b);
          put(off[x] + 1 + 2 * jx[x] + k, c);
        }
        prob.eq_constraints.push_back({re, -model.hamiltonians[x](a, b).real()});
        prob.eq_constraints.push_back({im, -model.hamiltonians[x](a, b).imag()});
      }
  }
  prob.num_vars = nvars;
  prob.objective = RVec::Zero(nvars);
  prob.objective(0) = 1.0;
  prob.blocks.push_back(make_complex_block(f0c, ccols, cslabs));

  SdpSolution sol = solve_sdp(prob, gap_tol);
  BoundResult res;
  res.value = 4.0 * sol.y(0);
  res.weights = weights;
  for (int x = 0; x < p; ++x) {
    const int j = jx[x];
    CMat hfull = CMat::Zero(1 + j, 1 + j);
    hfull(0, 0) = sol.y(off[x]);
    for (int m = 0; m < j; ++m) {
      Complex c(sol.y(off[x] + 1 + 2 * m), sol.y(off[x] + 2 + 2 * m));
      hfull(1 + m, 0) = c;
      hfull(0, 1 + m) = std::conj(c);
    }
    hfull.bottomRightCorner(j, j) =
        herm_from_params(sol.y.segment(off[x] + 1 + 2 * j, herm_param_count(j)), j);
    res.gauge.h.push_back(hfull);
    // residual of the linearized-dynamics constraint at the solution
    CMat beta = model.hamiltonians[x] + hfull(0, 0) * CMat::Identity(d, d);
    const auto& ls = model.collapse_ops[x];
    for (int m = 0; m < j; ++m) {
      Complex c = hfull(1 + m, 0);
      beta += std::conj(c) * ls[m] + c * ls[m].adjoint();
    }
    for (int a = 0; a < j; ++a)
      for (int b = 0; b < j; ++b)
        beta += hfull(1 + a, 1 + b) * (ls[a].adjoint() * ls[b]);
    res.beta_residuals.push_back(operator_norm(beta.topLeftCorner(di, di)));
  }
  res.solver = std::move(sol);
  return res;
}

// Right-logarithmic-derivative channel bound from the Choi matrix:
// || sum_x Tr_out[(dOmega) Omega^+ (dOmega)] ||, finite only when every
// Choi derivative stays on the support of Omega.
struct RldResult {
  bool finite = false;
  double value = std::numeric_limits<double>::infinity();
  double leak = 0.0;  // ||sum (dOmega)^2 Pi_perp|| / ||sum (dOmega)^2||
};

inline RldResult rld_bound(const ParamChannel& ch) {
  validate_shapes(ch);
  const int n = ch.dim_out * ch.dim_in;
  CMat omega = choi_matrix(ch, 0).omega;
  std::vector<CMat> domegas;
  for (int x = 0; x < ch.num_params; ++x) {
    ChoiPair cp = choi_matrix(ch, x);
    if (operator_norm(cp.omega - omega) > 1e-10 * ch.dim_in)
      throw invalid_input("rld_bound: parameters must share one channel");
    domegas.push_back(cp.domega);
  }
  HermEig eig = herm_eig(omega);
  const double rank_tol = 1e-10 * std::abs(omega.trace());
  CMat pinv = CMat::Zero(n, n);
  CMat proj_perp = CMat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    CVec v = eig.eigenvectors.col(i);
    if (eig.eigenvalues(i) > rank_tol)
      pinv += (1.0 / eig.eigenvalues(i)) * (v * v.adjoint());
    else
      proj_perp += v * v.adjoint();
  }
  CMat d2 = CMat::Zero(n, n);
  for (const CMat& dom : domegas) d2 += dom * dom;
  RldResult res;
  double scale = operator_norm(d2);
  res.leak = scale > 0 ? operator_norm(d2 * proj_perp) / scale : 0.0;
  res.finite = res.leak <= 1e-8;
  if (!res.finite) return res;
  CMat m = CMat::Zero(ch.dim_in, ch.dim_in);
  for (const CMat& dom : domegas)
    m += partial_trace_first(CMat(dom * pinv * dom), ch.dim_out, ch.dim_in);
  res.value = operator_norm(m);
  return res;
}

// Noiseless linear-encoding bound 4 || sum_x G_x^2 ||.
inline double kura_ueda_bound(const std::vector<CMat>& generators) {
  if (generators.empty()) throw invalid_input("kura_ueda_bound: no generators");
  const int d = static_cast<int>(generators[0].rows());
  CMat s = CMat::Zero(d, d);
  for (const CMat& g : generators) {
    if (g.rows() != d || g.cols() != d)
      throw invalid_input("kura_ueda_bound: dimension mismatch");
    if (operator_norm(g - g.adjoint()) > 1e-10 * std::max(1.0, operator_norm(g)))
      throw invalid_input("kura_ueda_bound: generators must be Hermitian");
    s += g * g;
  }
  return 4.0 * operator_norm(s);
}

enum class BoundMode { single_use, sql };

// Restriction of a channel family to one parameter.
inline ParamChannel select_parameter(const ParamChannel& ch, int x) {
  if (x < 0 || x >= ch.num_params)
    throw invalid_input("select_parameter: bad index");
  ParamChannel one;
  one.dim_in = ch.dim_in;
  one.dim_out = ch.dim_out;
  one.num_params = 1;
  one.kraus = {ch.kraus[x]};
  one.dkraus = {ch.dkraus[x]};
  if (!ch.labels.empty()) one.labels = {ch.labels[x]};
  one.theta_star = RVec::Zero(1);
  if (ch.theta_star.size() == ch.num_params) one.theta_star(0) = ch.theta_star(x);
  return one;
}

// Weighted sum of independent single-parameter bounds; an upper bound on
// the joint bound that ignores probe incompatibility.
inline double sum_of_singles(const ParamChannel& ch, const RVec& weights,
                             BoundMode mode) {
  bound_detail::check_weights(ch, weights);
  double total = 0.0;
  RVec one = RVec::Ones(1);
  for (int x = 0; x < ch.num_params; ++x) {
    ParamChannel sub = select_parameter(ch, x);
    BoundResult r = (mode == BoundMode::single_use) ? single_use_bound(sub, one)
                                                    : sql_bound(sub, one);
    total += weights(x) * r.value;
  }
  return total;
}

// Single-parameter convenience wrapper.
inline double single_parameter_bound(const ParamChannel& ch, int x,
                                     BoundMode mode) {
  ParamChannel sub = select_parameter(ch, x);
  RVec one = RVec::Ones(1);
  return (mode == BoundMode::single_use) ? single_use_bound(sub, one).value
                                         : sql_bound(sub, one).value;
}

}  // namespace qmetro
