// Dense semidefinite programming backend.
//
// Solves   min c'y   s.t.   F0_b + sum_i y_i F_{b,i}  PSD  for every block b,
//                           A y = rhs (linear equalities),
// with a primal-dual interior-point method (Nesterov-Todd scaling, Mehrotra
// predictor-corrector).  Equalities are eliminated onto the affine feasible
// set before the cone iteration starts.
//
// Every variable matrix F_i is stored as a "slab" D_i (dim x m) on a fixed
// column index set, with F_i = scatter(D_i) + scatter(D_i)^T.  Operator-norm
// epigraph LMIs only touch a thin column strip of a large block, and the
// Schur complement assembly exploits that; a dense F_i is the special case
// where the strip is every column and D_i = F_i / 2.
#pragma once

#include "matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <utility>
#include <vector>

namespace qmetro {

/// [[Re H, -Im H], [Im H, Re H]].  PSD iff H is Hermitian PSD; each
/// eigenvalue of a Hermitian H appears twice in the embedding.
inline RMat real_embed(const CMat& h) {
  if (h.rows() != h.cols()) throw invalid_input("real_embed: non-square input");
  const Eigen::Index n = h.rows();
  RMat out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = h.real();
  out.topRightCorner(n, n) = -h.imag();
  out.bottomLeftCorner(n, n) = h.imag();
  out.bottomRightCorner(n, n) = h.real();
  return out;
}

// --- Hermitian matrix variables as r^2 real parameters ---
// Order: r diagonal entries, then (re, im) for each off-diagonal pair (j,k),
// j < k, row-major.

inline int herm_param_count(int r) { return r * r; }

inline CMat herm_from_params(const Eigen::Ref<const RVec>& v, int r) {
  if (v.size() != r * r) throw invalid_input("herm_from_params: wrong length");
  CMat h = CMat::Zero(r, r);
  int idx = 0;
  for (int j = 0; j < r; ++j) h(j, j) = v(idx++);
  for (int j = 0; j < r; ++j)
    for (int k = j + 1; k < r; ++k) {
      double re = v(idx++);
      double im = v(idx++);
      h(j, k) = Complex(re, im);
      h(k, j) = Complex(re, -im);
    }
  return h;
}

inline RVec herm_to_params(const CMat& h) {
  const int r = static_cast<int>(h.rows());
  RVec v(r * r);
  int idx = 0;
  for (int j = 0; j < r; ++j) v(idx++) = h(j, j).real();
  for (int j = 0; j < r; ++j)
    for (int k = j + 1; k < r; ++k) {
      v(idx++) = h(j, k).real();
      v(idx++) = h(j, k).imag();
    }
  return v;
}

/// k-th element of the Hermitian basis dual to herm_to_params.
inline CMat herm_basis(int r, int k) {
  RVec v = RVec::Zero(r * r);
  v(k) = 1.0;
  return herm_from_params(v, r);
}

// --- problem description ---

struct LmiBlock {
  RMat f0;                    // symmetric constant term, dim x dim
  std::vector<int> cols;      // slab column indices, size m
  std::vector<RMat> slabs;    // one dim x m slab per variable

  Eigen::Index dim() const { return f0.rows(); }
  Eigen::Index slab_width() const { return static_cast<Eigen::Index>(cols.size()); }

  /// F(y) at a concrete point.
  RMat eval(const RVec& y) const {
    RMat a = f0;
    for (std::size_t i = 0; i < slabs.size(); ++i) {
      if (y(static_cast<Eigen::Index>(i)) == 0.0) continue;
      for (std::size_t k = 0; k < cols.size(); ++k) {
        a.col(cols[k]) += y(static_cast<Eigen::Index>(i)) * slabs[i].col(static_cast<Eigen::Index>(k));
        a.row(cols[k]) += y(static_cast<Eigen::Index>(i)) * slabs[i].col(static_cast<Eigen::Index>(k)).transpose();
      }
    }
    return a;
  }
};

/// Block with dense symmetric coefficient matrices.
inline LmiBlock make_dense_block(const RMat& f0, const std::vector<RMat>& fs) {
  LmiBlock b;
  b.f0 = 0.5 * (f0 + f0.transpose());
  b.cols.resize(static_cast<std::size_t>(f0.rows()));
  std::iota(b.cols.begin(), b.cols.end(), 0);
  b.slabs.reserve(fs.size());
  for (const RMat& f : fs) b.slabs.push_back(0.25 * (f + f.transpose()));
  return b;
}

/// Block built from complex data: F(y) = embed( f0c + sum_i y_i (C_i E' + E C_i^dag) )
/// where E selects the complex columns `ccols` and C_i is the compact
/// nc x ccols.size() strip.  f0c must be Hermitian.
inline LmiBlock make_complex_block(const CMat& f0c, const std::vector<int>& ccols,
                                   const std::vector<CMat>& cslabs) {
  const Eigen::Index nc = f0c.rows();
  const Eigen::Index mc = static_cast<Eigen::Index>(ccols.size());
  LmiBlock b;
  b.f0 = real_embed(0.5 * (f0c + f0c.adjoint()));
  b.cols.resize(static_cast<std::size_t>(2 * mc));
  for (Eigen::Index k = 0; k < mc; ++k) {
    b.cols[static_cast<std::size_t>(k)] = ccols[static_cast<std::size_t>(k)];
    b.cols[static_cast<std::size_t>(mc + k)] = static_cast<int>(nc) + ccols[static_cast<std::size_t>(k)];
  }
  b.slabs.reserve(cslabs.size());
  for (const CMat& c : cslabs) {
    if (c.rows() != nc || c.cols() != mc)
      throw invalid_input("make_complex_block: slab shape mismatch");
    RMat d(2 * nc, 2 * mc);
    d.topLeftCorner(nc, mc) = c.real();
    d.bottomLeftCorner(nc, mc) = c.imag();
    d.topRightCorner(nc, mc) = -c.imag();
    d.bottomRightCorner(nc, mc) = c.real();
    b.slabs.push_back(std::move(d));
  }
  return b;
}

struct SdpProblem {
  int num_vars = 0;
  RVec objective;  // minimized; length num_vars
  std::vector<LmiBlock> blocks;
  std::vector<std::pair<RVec, double>> eq_constraints;  // (row, rhs)
};

enum class SdpStatus { optimal, infeasible, unbounded, max_iter };

inline const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::optimal: return "optimal";
    case SdpStatus::infeasible: return "infeasible";
    case SdpStatus::unbounded: return "unbounded";
    default: return "max-iter";
  }
}

struct SdpSolution {
  SdpStatus status = SdpStatus::max_iter;
  RVec y;
  double primal_objective = 0.0;
  double duality_gap = 0.0;
  double max_eq_residual = 0.0;
  double min_lmi_eig = 0.0;  // over all blocks at the returned y
  int iterations = 0;
};

namespace sdp_detail {

struct BlockWork {
  Eigen::Index N = 0, m = 0;
  std::vector<int> cols;
  RMat F0;
  RMat Dmat;  // (N*m) x n, column i = vec(D_i)

  RMat X, Z, W, Zinv, Rd;
  RMat R, Rinv;  // NT scaling factor: W = R R^T, R^-1 X R^-T = R^T Z R = diag(v)
  RVec v;
  Eigen::LLT<RMat> lltX, lltZ;
  // scratch for the current direction
  RMat dxa, dza, dx, dz, Rc;

  RMat scatter(const Eigen::Ref<const RMat>& dy) const {
    RMat a = RMat::Zero(N, N);
    for (Eigen::Index k = 0; k < m; ++k) a.col(cols[static_cast<std::size_t>(k)]) += dy.col(k);
    RMat at = a.transpose();
    return a + at;
  }

  RMat mat_of(const RVec& y) const {
    if (Dmat.cols() == 0) return F0;
    RVec v = Dmat * y;
    Eigen::Map<const RMat> dy(v.data(), N, m);
    return F0 + scatter(dy);
  }

  /// <F_i, G> for all i, G symmetric.
  RVec dots(const RMat& g) const {
    RMat gc(N, m);
    for (Eigen::Index k = 0; k < m; ++k) gc.col(k) = g.col(cols[static_cast<std::size_t>(k)]);
    Eigen::Map<const RVec> gv(gc.data(), N * m);
    return 2.0 * (Dmat.transpose() * gv);
  }

  bool compute_scaling() {
    lltX.compute(X);
    lltZ.compute(Z);
    if (lltX.info() != Eigen::Success || lltZ.info() != Eigen::Success) return false;
    RMat lx = lltX.matrixL();
    RMat a = lx.transpose() * Z * lx;
    Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (a + a.transpose()));
    if (es.info() != Eigen::Success) return false;
    RVec ev = es.eigenvalues().cwiseMax(1e-300);
    v = ev.cwiseSqrt();
    RVec dq = ev.array().pow(-0.25);
    R = lx * es.eigenvectors() * dq.asDiagonal();
    Rinv = dq.cwiseInverse().asDiagonal() * es.eigenvectors().transpose() *
           lx.triangularView<Eigen::Lower>().solve(RMat::Identity(N, N));
    W = R * R.transpose();
    W = 0.5 * (W + W.transpose()).eval();
    Zinv = lltZ.solve(RMat::Identity(N, N));
    Zinv = 0.5 * (Zinv + Zinv.transpose()).eval();
    return true;
  }

  void add_schur(RMat& msum) const {
    const Eigen::Index n = Dmat.cols();
    if (n == 0) return;
    Eigen::Map<const RMat> dcat(Dmat.data(), N, m * n);
    RMat p = W * dcat;  // N x (m n)
    RMat wmm(m, m);
    for (Eigen::Index j = 0; j < m; ++j)
      for (Eigen::Index k = 0; k < m; ++k)
        wmm(j, k) = W(cols[static_cast<std::size_t>(j)], cols[static_cast<std::size_t>(k)]);
    RMat qcat(N, m * n);
    for (Eigen::Index i = 0; i < n; ++i)
      qcat.middleCols(i * m, m).noalias() = dcat.middleCols(i * m, m) * wmm;
    RMat smat(m * m, n), smat_t(m * m, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index c = 0; c < m; ++c)
        for (Eigen::Index j = 0; j < m; ++j) {
          double val = p(cols[static_cast<std::size_t>(j)], i * m + c);
          smat(j + c * m, i) = val;    // vec(S_i)
          smat_t(c + j * m, i) = val;  // vec(S_i^T)
        }
    Eigen::Map<const RMat> pmat(p.data(), N * m, n);
    Eigen::Map<const RMat> qmat(qcat.data(), N * m, n);
    msum.noalias() += 2.0 * (smat.transpose() * smat_t);
    msum.noalias() += 2.0 * (pmat.transpose() * qmat);
  }
};

/// Largest step alpha with base + alpha*delta staying PSD (capped by caller).
inline double max_psd_step(const Eigen::LLT<RMat>& llt, const RMat& delta) {
  RMat t1 = llt.matrixL().solve(delta);
  RMat t2 = llt.matrixL().solve(RMat(t1.transpose()));
  Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (t2 + t2.transpose()),
                                         Eigen::EigenvaluesOnly);
  double lmin = es.eigenvalues()(0);
  if (lmin >= -1e-14) return 1e18;
  return -1.0 / lmin;
}

inline bool is_pd(const RMat& a) {
  Eigen::LLT<RMat> llt(a);
  return llt.info() == Eigen::Success;
}

struct ReducedResult {
  SdpStatus status = SdpStatus::max_iter;
  RVec y;
  double gap = 0.0;
  int iterations = 0;
};

inline ReducedResult solve_reduced(const RVec& c, std::vector<BlockWork>& blocks,
                                   double gap_tol, int max_iterations) {
  const Eigen::Index n = c.size();
  ReducedResult res;
  res.y = RVec::Zero(n);
  double total_dim = 0.0;
  for (const auto& b : blocks) total_dim += static_cast<double>(b.N);

  double scale = 10.0;
  for (const auto& b : blocks) {
    scale = std::max(scale, b.F0.cwiseAbs().maxCoeff());
    if (b.Dmat.size() > 0) scale = std::max(scale, 2.0 * b.Dmat.cwiseAbs().maxCoeff());
  }
  if (n > 0) scale = std::max(scale, c.cwiseAbs().maxCoeff());
  const double f0_scale = 1.0 + scale;
  for (auto& b : blocks) {
    b.X = scale * RMat::Identity(b.N, b.N);
    b.Z = scale * RMat::Identity(b.N, b.N);
  }

  RVec y = RVec::Zero(n);
  const double feas_tol = 1e-8;
  const double c_inf = (n > 0) ? c.cwiseAbs().maxCoeff() : 0.0;

  for (int iter = 0; iter < max_iterations; ++iter) {
    res.iterations = iter;
    bool ok = true;
    for (auto& b : blocks) ok = ok && b.compute_scaling();
    if (!ok) break;  // iterate left the cone numerically; report best so far

    double gap = 0.0;
    for (auto& b : blocks) gap += b.X.cwiseProduct(b.Z).sum();
    double mu = gap / total_dim;

    RVec rp = c;
    double rd_inf = 0.0;
    for (auto& b : blocks) {
      b.Rd = b.mat_of(y) - b.Z;
      rd_inf = std::max(rd_inf, b.Rd.cwiseAbs().maxCoeff());
      rp -= b.dots(b.X);
    }
    double obj_p = c.dot(y);
    double obj_d = 0.0;
    for (auto& b : blocks) obj_d -= b.F0.cwiseProduct(b.X).sum();
    double rp_inf = (n > 0) ? rp.cwiseAbs().maxCoeff() : 0.0;

    res.y = y;
    res.gap = gap;
    if (gap <= std::max(gap_tol, gap_tol * (1.0 + std::abs(obj_p))) &&
        rp_inf <= feas_tol * (1.0 + c_inf) && rd_inf <= feas_tol * f0_scale) {
      res.status = SdpStatus::optimal;
      res.iterations = iter;
      return res;
    }
    if (obj_p < -1e12 * f0_scale && rd_inf <= 1e-4 * f0_scale) {
      res.status = SdpStatus::unbounded;
      return res;
    }
    if (obj_d > 1e12 * f0_scale && rp_inf <= 1e-4 * (1.0 + c_inf)) {
      res.status = SdpStatus::infeasible;
      return res;
    }

    RMat m = RMat::Zero(n, n);
    for (auto& b : blocks) b.add_schur(m);
    m = 0.5 * (m + m.transpose()).eval();
    double jitter = 1e-14 * (1.0 + m.trace() / std::max<Eigen::Index>(n, 1));
    Eigen::LDLT<RMat> ldlt;
    for (int attempt = 0; attempt < 8; ++attempt) {
      ldlt.compute(m + jitter * RMat::Identity(n, n));
      if (ldlt.info() == Eigen::Success && ldlt.isPositive()) break;
      jitter *= 100.0;
    }

    auto schur_rhs = [&](void) {
      RVec rhs = -rp;
      for (auto& b : blocks) {
        RMat g = b.Rc - b.W * b.Rd * b.W;
        rhs += b.dots(0.5 * (g + g.transpose()));
      }
      return rhs;
    };
    auto directions = [&](const RVec& dy, bool affine) {
      for (auto& b : blocks) {
        RMat dz = b.Rd;
        if (n > 0) {
          RVec v = b.Dmat * dy;
          Eigen::Map<const RMat> dyslab(v.data(), b.N, b.m);
          dz += b.scatter(dyslab);
        }
        dz = 0.5 * (dz + dz.transpose()).eval();
        RMat dx = b.Rc - b.W * dz * b.W;
        dx = 0.5 * (dx + dx.transpose()).eval();
        if (affine) {
          b.dza = dz;
          b.dxa = dx;
        } else {
          b.dz = dz;
          b.dx = dx;
        }
      }
    };

    // predictor
    for (auto& b : blocks) b.Rc = -b.X;
    RVec dy_aff = ldlt.solve(schur_rhs());
    directions(dy_aff, true);
    double ap = 1.0, ad = 1.0;
    for (auto& b : blocks) {
      ap = std::min(ap, max_psd_step(b.lltX, b.dxa));
      ad = std::min(ad, max_psd_step(b.lltZ, b.dza));
    }
    double mu_aff = 0.0;
    for (auto& b : blocks)
      mu_aff += (b.X + ap * b.dxa).cwiseProduct(b.Z + ad * b.dza).sum();
    mu_aff = std::max(mu_aff / total_dim, 0.0);
    double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3.0);

    // corrector, assembled in the NT scaled frame where the scaling point is
    // diag(v): solve v o (dxhat + dzhat) = sigma*mu*I - diag(v)^2 - dxhat_a o dzhat_a
    // entrywise, then map back (o is the symmetrized Jordan product)
    for (auto& b : blocks) {
      RMat dxh = b.Rinv * b.dxa * b.Rinv.transpose();
      RMat dzh = b.R.transpose() * b.dza * b.R;
      RMat h = 0.5 * (dxh * dzh + dzh * dxh);
      RMat g(b.N, b.N);
      for (Eigen::Index i = 0; i < b.N; ++i)
        for (Eigen::Index j = 0; j < b.N; ++j) {
          double num = -h(i, j);
          if (i == j) num += sigma * mu - b.v(i) * b.v(i);
          g(i, j) = 2.0 * num / (b.v(i) + b.v(j));
        }
      RMat rc = b.R * g * b.R.transpose();
      b.Rc = 0.5 * (rc + rc.transpose());
    }
    RVec dy = ldlt.solve(schur_rhs());
    directions(dy, false);

    const double tau = 0.98;
    ap = 1.0;
    ad = 1.0;
    for (auto& b : blocks) {
      ap = std::min(ap, tau * max_psd_step(b.lltX, b.dx));
      ad = std::min(ad, tau * max_psd_step(b.lltZ, b.dz));
    }
    ap = std::min(ap, 1.0);
    ad = std::min(ad, 1.0);
    auto all_pd = [&](double a_p, double a_d) {
      for (auto& b : blocks)
        if (!is_pd(b.X + a_p * b.dx) || !is_pd(b.Z + a_d * b.dz)) return false;
      return true;
    };
    int guard = 0;
    while (!all_pd(ap, ad) && guard++ < 40) {
      ap *= 0.7;
      ad *= 0.7;
    }
    if (guard >= 40) break;
    static const bool trace = std::getenv("QMETRO_SDP_TRACE") != nullptr;
    if (trace)
      std::fprintf(stderr,
                   "sdp iter %3d mu=%.3e gap=%.3e obj_p=%.9e obj_d=%.9e rp=%.2e rd=%.2e "
                   "sigma=%.2e ap=%.3f ad=%.3f guard=%d\n",
                   iter, mu, gap, obj_p, obj_d, rp_inf, rd_inf, sigma, ap, ad, guard);
    for (auto& b : blocks) {
      b.X += ap * b.dx;
      b.Z += ad * b.dz;
      b.X = 0.5 * (b.X + b.X.transpose()).eval();
      b.Z = 0.5 * (b.Z + b.Z.transpose()).eval();
    }
    y += ad * dy;
    res.y = y;
  }
  res.status = SdpStatus::max_iter;
  return res;
}

}  // namespace sdp_detail

/// Solve the SDP.  Deterministic for identical inputs.  On status=optimal the
/// returned y is feasible (all blocks PSD to -1e-8 scale, equality residual
/// <= 1e-8) and the objective is within gap_tol of the dual objective.
inline SdpSolution solve_sdp(const SdpProblem& problem, double gap_tol = 1e-9,
                             int max_iterations = 200) {
  const int n = problem.num_vars;
  if (problem.objective.size() != n)
    throw invalid_input("solve_sdp: objective length mismatch");
  for (const auto& blk : problem.blocks) {
    if (static_cast<int>(blk.slabs.size()) != n)
      throw invalid_input("solve_sdp: block slab count mismatch");
    for (const auto& d : blk.slabs)
      if (d.rows() != blk.dim() || d.cols() != blk.slab_width())
        throw invalid_input("solve_sdp: slab shape mismatch");
    for (int c : blk.cols)
      if (c < 0 || c >= blk.dim()) throw invalid_input("solve_sdp: slab column out of range");
  }
  if (gap_tol <= 0) throw invalid_input("solve_sdp: gap_tol must be positive");

  SdpSolution sol;

  // Equality elimination: y = y0 + Nz on the affine feasible set.
  RVec y0 = RVec::Zero(n);
  RMat nullbasis = RMat::Identity(n, n);
  const std::size_t k = problem.eq_constraints.size();
  if (k > 0) {
    RMat a(static_cast<Eigen::Index>(k), n);
    RVec rhs(static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) {
      if (problem.eq_constraints[i].first.size() != n)
        throw invalid_input("solve_sdp: equality row length mismatch");
      a.row(static_cast<Eigen::Index>(i)) = problem.eq_constraints[i].first.transpose();
      rhs(static_cast<Eigen::Index>(i)) = problem.eq_constraints[i].second;
    }
    Eigen::JacobiSVD<RMat> svd(a, Eigen::ComputeThinU | Eigen::ComputeFullV);
    double smax = (svd.singularValues().size() > 0) ? svd.singularValues()(0) : 0.0;
    double thresh = 1e-11 * std::max(1.0, smax);
    Eigen::Index rank = 0;
    while (rank < svd.singularValues().size() && svd.singularValues()(rank) > thresh) ++rank;
    RVec ut_rhs = svd.matrixU().leftCols(rank).transpose() * rhs;
    y0 = svd.matrixV().leftCols(rank) *
         (ut_rhs.array() / svd.singularValues().head(rank).array()).matrix();
    double eq_res = (a * y0 - rhs).cwiseAbs().maxCoeff();
    if (eq_res > 1e-8 * (1.0 + rhs.cwiseAbs().maxCoeff())) {
      sol.status = SdpStatus::infeasible;
      sol.y = y0;
      sol.max_eq_residual = eq_res;
      return sol;
    }
    nullbasis = svd.matrixV().rightCols(n - rank);
  }
  const Eigen::Index nz = nullbasis.cols();

  // Reduced block workspaces.
  std::vector<sdp_detail::BlockWork> work(problem.blocks.size());
  for (std::size_t bi = 0; bi < problem.blocks.size(); ++bi) {
    const LmiBlock& blk = problem.blocks[bi];
    auto& w = work[bi];
    w.N = blk.dim();
    w.m = blk.slab_width();
    w.cols = blk.cols;
    RMat dmat(w.N * w.m, n);
    for (int i = 0; i < n; ++i)
      dmat.col(i) = Eigen::Map<const RVec>(blk.slabs[static_cast<std::size_t>(i)].data(), w.N * w.m);
    // fold the particular solution into the constant term
    w.F0 = blk.f0;
    if (k > 0 && n > 0) {
      RVec v = dmat * y0;
      Eigen::Map<const RMat> dy(v.data(), w.N, w.m);
      w.F0 += w.scatter(dy);
    }
    w.Dmat = dmat * nullbasis;
  }
  RVec c_red = nullbasis.transpose() * problem.objective;

  sdp_detail::ReducedResult red;
  if (nz == 0) {
    red.status = SdpStatus::optimal;
    red.y = RVec::Zero(0);
  } else {
    red = sdp_detail::solve_reduced(c_red, work, gap_tol, max_iterations);
  }

  sol.status = red.status;
  sol.iterations = red.iterations;
  sol.duality_gap = red.gap;
  sol.y = y0 + nullbasis * red.y;
  sol.primal_objective = problem.objective.dot(sol.y);

  // Independent certificate against the original data.
  double min_eig = std::numeric_limits<double>::infinity();
  double cert_scale = 1.0;
  for (const auto& blk : problem.blocks) {
    RMat f = blk.eval(sol.y);
    cert_scale = std::max(cert_scale, f.cwiseAbs().maxCoeff());
    if (f.rows() == 0) continue;
    Eigen::SelfAdjointEigenSolver<RMat> es(f, Eigen::EigenvaluesOnly);
    min_eig = std::min(min_eig, es.eigenvalues()(0));
  }
  if (problem.blocks.empty()) min_eig = 0.0;
  sol.min_lmi_eig = min_eig;
  sol.max_eq_residual = 0.0;
  for (const auto& [row, rhs] : problem.eq_constraints)
    sol.max_eq_residual = std::max(sol.max_eq_residual, std::abs(row.dot(sol.y) - rhs));
  if (sol.status == SdpStatus::optimal) {
    if (min_eig < -1e-8 * cert_scale || sol.max_eq_residual > 1e-8)
      sol.status = SdpStatus::max_iter;  // certificate failed; never report wrong values as optimal
  }
  return sol;
}

}  // namespace qmetro
