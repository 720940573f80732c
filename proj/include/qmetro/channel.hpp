#pragma once

// Parametric quantum channels as Kraus-operator families with per-parameter
// derivatives: CPTP validation, Choi matrices, Kraus/Lindblad span checks,
// and a zoo of named channel families.

#include <qmetro/matrix.hpp>
#include <qmetro/sdp.hpp>

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace qmetro {

// A family of channels E_x(rho) = sum_j K_{x,j} rho K_{x,j}^dag, one per
// estimated parameter, together with the derivatives d/dtheta_x K_{x,j}
// evaluated at theta_star.  When all parameters belong to one channel the
// Kraus lists coincide and only the derivatives differ.
struct ParamChannel {
  int dim_in = 0;
  int dim_out = 0;
  int num_params = 0;
  std::vector<std::vector<CMat>> kraus;   // [x][j], dim_out x dim_in
  std::vector<std::vector<CMat>> dkraus;  // [x][j], same shapes
  std::vector<std::string> labels;
  RVec theta_star;

  int kraus_rank(int x) const { return static_cast<int>(kraus[x].size()); }

  // True when every parameter shares one Kraus list (entrywise).
  bool single_channel_mode() const {
    for (int x = 1; x < num_params; ++x) {
      if (kraus[x].size() != kraus[0].size()) return false;
      for (std::size_t j = 0; j < kraus[0].size(); ++j)
        if (kraus[x][j].rows() != kraus[0][j].rows() ||
            kraus[x][j].cols() != kraus[0][j].cols() ||
            (kraus[x][j] - kraus[0][j]).cwiseAbs().maxCoeff() > 1e-14)
          return false;
    }
    return true;
  }
};

// Time-continuous dynamics d rho/dt = -i [sum_x theta_x H_x, rho] + dissipator
// with per-parameter collapse-operator lists L_{x,j}.
struct LindbladModel {
  int dim = 0;
  int num_params = 0;
  std::vector<CMat> hamiltonians;             // [x], dim x dim Hermitian
  std::vector<std::vector<CMat>> collapse_ops;  // [x][j], dim x dim
  // Probe subspace: the first probe_dim levels carry the input states;
  // levels beyond are absorbing flags never populated at preparation
  // (0 means the full space).
  int probe_dim = 0;

  int probe_subspace_dim() const {
    return (probe_dim > 0 && probe_dim <= dim) ? probe_dim : dim;
  }
};

struct CptpReport {
  std::vector<double> residuals;  // per parameter, ||sum_j K^dag K - I||_op
  double max_residual = 0.0;
  bool passed = false;
};

inline void validate_shapes(const ParamChannel& ch) {
  if (ch.dim_in <= 0 || ch.dim_out <= 0 || ch.num_params <= 0)
    throw invalid_input("channel: nonpositive dimensions");
  if (static_cast<int>(ch.kraus.size()) != ch.num_params ||
      static_cast<int>(ch.dkraus.size()) != ch.num_params)
    throw invalid_input("channel: kraus list count != num_params");
  for (int x = 0; x < ch.num_params; ++x) {
    if (ch.kraus[x].empty() || ch.kraus[x].size() != ch.dkraus[x].size())
      throw invalid_input("channel: kraus/dkraus size mismatch");
    for (std::size_t j = 0; j < ch.kraus[x].size(); ++j) {
      const CMat& k = ch.kraus[x][j];
      const CMat& dk = ch.dkraus[x][j];
      if (k.rows() != ch.dim_out || k.cols() != ch.dim_in ||
          dk.rows() != ch.dim_out || dk.cols() != ch.dim_in)
        throw invalid_input("channel: Kraus operator shape mismatch");
      require_finite(k, "channel Kraus");
      require_finite(dk, "channel Kraus derivative");
    }
  }
}

inline CptpReport validate_cptp(const ParamChannel& ch, double tol = 1e-10) {
  validate_shapes(ch);
  CptpReport rep;
  for (int x = 0; x < ch.num_params; ++x) {
    CMat gram = CMat::Zero(ch.dim_in, ch.dim_in);
    for (const CMat& k : ch.kraus[x]) gram += k.adjoint() * k;
    rep.residuals.push_back(
        operator_norm(gram - CMat::Identity(ch.dim_in, ch.dim_in)));
  }
  rep.max_residual =
      *std::max_element(rep.residuals.begin(), rep.residuals.end());
  rep.passed = rep.max_residual <= tol;
  return rep;
}

// Choi matrix Omega = sum_j |K_j><K_j| on (output tensor input-copy), with
// |M> = sum_ij M_ij |i>|j>, plus its derivative along parameter x.
struct ChoiPair {
  CMat omega;   // (dim_out*dim_in) square, PSD, trace = dim_in
  CMat domega;  // same size, Hermitian
};

inline ChoiPair choi_matrix(const ParamChannel& ch, int x) {
  validate_shapes(ch);
  if (x < 0 || x >= ch.num_params) throw invalid_input("choi_matrix: bad index");
  const int n = ch.dim_out * ch.dim_in;
  ChoiPair out;
  out.omega = CMat::Zero(n, n);
  out.domega = CMat::Zero(n, n);
  for (std::size_t j = 0; j < ch.kraus[x].size(); ++j) {
    CVec k = vectorize(ch.kraus[x][j]);
    CVec dk = vectorize(ch.dkraus[x][j]);
    out.omega += k * k.adjoint();
    out.domega += dk * k.adjoint() + k * dk.adjoint();
  }
  return out;
}

// Result of a linear span-membership test, with the least-squares witness.
struct SpanCheck {
  bool satisfied = false;
  double residual = 0.0;
  CMat h;  // Hermitian least-squares solution (gauge matrix / span element)
};

namespace span_detail {

inline RVec stack_reim(const CMat& m) {
  const int n = static_cast<int>(m.size());
  RVec v(2 * n);
  v.head(n) = Eigen::Map<const CVec>(m.data(), n).real();
  v.tail(n) = Eigen::Map<const CVec>(m.data(), n).imag();
  return v;
}

}  // namespace span_detail

// "Hamiltonian in the Kraus span": does beta_x(h) = sum_j dK_j^dag K_j
// + i sum_{lj} h_{lj} K_l^dag K_j vanish for some Hermitian h?
inline SpanCheck hks_check(const ParamChannel& ch, int x, double tol = 1e-9) {
  validate_shapes(ch);
  if (x < 0 || x >= ch.num_params) throw invalid_input("hks_check: bad index");
  const int r = ch.kraus_rank(x);
  const int nv = herm_param_count(r);
  CMat b0 = CMat::Zero(ch.dim_in, ch.dim_in);
  for (int j = 0; j < r; ++j) b0 += ch.dkraus[x][j].adjoint() * ch.kraus[x][j];
  RMat a(2 * ch.dim_in * ch.dim_in, nv);
  for (int k = 0; k < nv; ++k) {
    CMat bk = herm_basis(r, k);
    CMat col = CMat::Zero(ch.dim_in, ch.dim_in);
    for (int l = 0; l < r; ++l)
      for (int j = 0; j < r; ++j)
        if (std::abs(bk(l, j)) > 0)
          col += Complex(0, 1) * bk(l, j) *
                 (ch.kraus[x][l].adjoint() * ch.kraus[x][j]);
    a.col(k) = span_detail::stack_reim(col);
  }
  RVec b = -span_detail::stack_reim(b0);
  Eigen::JacobiSVD<RMat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  RVec v = svd.solve(b);
  SpanCheck res;
  res.residual = (a * v - b).norm();
  res.satisfied = res.residual <= tol * std::max(1.0, b0.norm());
  res.h = herm_from_params(v, r);
  return res;
}

// "Hamiltonian in the Lindblad span": H_x in the real span of
// {I, L^H, i L^AH, (L^dag L')^H, i (L^dag L')^AH} over the parameter's
// collapse operators.
inline SpanCheck hls_check(const LindbladModel& model, int x,
                           double tol = 1e-9) {
  if (x < 0 || x >= model.num_params) throw invalid_input("hls_check: bad index");
  const int d = model.dim;
  const CMat& hx = model.hamiltonians[x];
  if (hx.rows() != d || hx.cols() != d)
    throw invalid_input("hls_check: Hamiltonian shape mismatch");
  if (operator_norm(hx - hx.adjoint()) > 1e-10 * std::max(1.0, operator_norm(hx)))
    throw invalid_input("hls_check: Hamiltonian not Hermitian");
  const auto& ls = model.collapse_ops[x];
  std::vector<CMat> span;
  span.push_back(CMat::Identity(d, d));
  for (const CMat& l : ls) {
    span.push_back(0.5 * (l + l.adjoint()));
    span.push_back(Complex(0, 0.5) * (l - l.adjoint()));
  }
  for (std::size_t j = 0; j < ls.size(); ++j)
    for (std::size_t k = 0; k < ls.size(); ++k) {
      CMat prod = ls[j].adjoint() * ls[k];
      span.push_back(0.5 * (prod + prod.adjoint()));
      span.push_back(Complex(0, 0.5) * (prod - prod.adjoint()));
    }
  RMat a(2 * d * d, static_cast<int>(span.size()));
  for (std::size_t i = 0; i < span.size(); ++i)
    a.col(static_cast<int>(i)) = span_detail::stack_reim(span[i]);
  RVec b = span_detail::stack_reim(hx);
  Eigen::JacobiSVD<RMat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  RVec v = svd.solve(b);
  SpanCheck res;
  res.residual = (a * v - b).norm();
  res.satisfied = res.residual <= tol * std::max(1.0, hx.norm());
  CMat proj = CMat::Zero(d, d);
  for (std::size_t i = 0; i < span.size(); ++i) proj += v(static_cast<int>(i)) * span[i];
  res.h = proj;
  return res;
}

// ---------------------------------------------------------------------------
// Channel zoo
// ---------------------------------------------------------------------------

using ZooParams = std::map<std::string, double>;

namespace zoo_detail {

inline double get(const ZooParams& p, const std::string& key) {
  auto it = p.find(key);
  if (it == p.end()) throw invalid_input("zoo_build: missing parameter " + key);
  return it->second;
}

inline double get_or(const ZooParams& p, const std::string& key, double def) {
  auto it = p.find(key);
  return it == p.end() ? def : it->second;
}

inline int get_int(const ZooParams& p, const std::string& key) {
  double v = get(p, key);
  int i = static_cast<int>(std::lround(v));
  if (std::abs(v - i) > 1e-12) throw invalid_input("zoo_build: non-integer " + key);
  return i;
}

inline double get_unit_interval(const ZooParams& p, const std::string& key) {
  double v = get(p, key);
  if (!(v > 0.0 && v < 1.0))
    throw invalid_input("zoo_build: " + key + " must lie in (0,1)");
  return v;
}

}  // namespace zoo_detail

// Generators of U(d): d diagonal projectors |j><j|, d(d-1)/2 real
// off-diagonal (|j><k|+|k><j|)/2 and d(d-1)/2 imaginary off-diagonal
// i(|j><k|-|k><j|)/2, selected by subset name {diag, real, imag, full}.
inline std::vector<CMat> unitary_generators(int d, const std::string& subset) {
  if (d < 2) throw invalid_input("unitary_generators: d >= 2 required");
  std::vector<CMat> gens;
  auto add_diag = [&] {
    for (int j = 0; j < d; ++j) {
      CMat g = CMat::Zero(d, d);
      g(j, j) = 1.0;
      gens.push_back(g);
    }
  };
  auto add_real = [&] {
    for (int j = 0; j < d; ++j)
      for (int k = j + 1; k < d; ++k) {
        CMat g = CMat::Zero(d, d);
        g(j, k) = 0.5;
        g(k, j) = 0.5;
        gens.push_back(g);
      }
  };
  auto add_imag = [&] {
    for (int j = 0; j < d; ++j)
      for (int k = j + 1; k < d; ++k) {
        CMat g = CMat::Zero(d, d);
        g(j, k) = Complex(0, 0.5);
        g(k, j) = Complex(0, -0.5);
        gens.push_back(g);
      }
  };
  if (subset == "diag") add_diag();
  else if (subset == "real") add_real();
  else if (subset == "imag") add_imag();
  else if (subset == "full") { add_diag(); add_real(); add_imag(); }
  else throw invalid_input("unitary_generators: unknown subset " + subset);
  return gens;
}

// Qudit erasure: with probability 1-eta the input is replaced by a flag
// state outside the qudit space.  d+1 Kraus operators of shape (d+1) x d.
inline std::vector<CMat> erasure_kraus(int d, double eta) {
  std::vector<CMat> ks;
  CMat k0 = CMat::Zero(d + 1, d);
  k0.topRows(d) = std::sqrt(eta) * CMat::Identity(d, d);
  ks.push_back(k0);
  for (int i = 0; i < d; ++i) {
    CMat ki = CMat::Zero(d + 1, d);
    ki(d, i) = std::sqrt(1.0 - eta);
    ks.push_back(ki);
  }
  return ks;
}

// Uniform qudit dephasing, non-minimal (d+1)-operator form:
// K_0 = sqrt(eta) I, K_j = sqrt(1-eta) |j><j|.
inline std::vector<CMat> qudit_dephasing_kraus(int d, double eta) {
  std::vector<CMat> ks;
  ks.push_back(std::sqrt(eta) * CMat::Identity(d, d));
  for (int j = 0; j < d; ++j) {
    CMat kj = CMat::Zero(d, d);
    kj(j, j) = std::sqrt(1.0 - eta);
    ks.push_back(kj);
  }
  return ks;
}

// exp(-i sum_x theta_x G_x) for Hermitian generators.
inline CMat unitary_from_generators(const std::vector<CMat>& gens,
                                    const RVec& theta) {
  const int d = static_cast<int>(gens[0].rows());
  CMat htot = CMat::Zero(d, d);
  for (std::size_t x = 0; x < gens.size(); ++x) htot += theta(static_cast<int>(x)) * gens[x];
  HermEig e = herm_eig(htot);
  CVec phases(d);
  for (int i = 0; i < d; ++i)
    phases(i) = std::exp(Complex(0, -e.eigenvalues(i)));
  return e.eigenvectors * phases.asDiagonal() * e.eigenvectors.adjoint();
}

// Directional derivative of exp(-iA) at Hermitian A along Hermitian B,
// via the divided-difference (Daleckii-Krein) formula in A's eigenbasis.
inline CMat exp_neg_i_derivative(const CMat& a, const CMat& b) {
  HermEig e = herm_eig(a);
  const int d = static_cast<int>(a.rows());
  CMat bt = e.eigenvectors.adjoint() * b * e.eigenvectors;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double li = e.eigenvalues(i), lj = e.eigenvalues(j);
      Complex dd;
      if (std::abs(li - lj) < 1e-12)
        dd = Complex(0, -1) * std::exp(Complex(0, -0.5 * (li + lj)));
      else
        dd = (std::exp(Complex(0, -li)) - std::exp(Complex(0, -lj))) / (li - lj);
      bt(i, j) *= dd;
    }
  return e.eigenvectors * bt * e.eigenvectors.adjoint();
}

// Channel K_j U_theta acting after a unitary parameter encoding, with exact
// derivatives d/dtheta_x (K_j U_theta) = K_j dU/dtheta_x at any theta.
inline ParamChannel noise_after_unitary(const std::vector<CMat>& noise_kraus,
                                        const std::vector<CMat>& gens,
                                        const RVec& theta,
                                        const std::vector<std::string>& labels) {
  const int p = static_cast<int>(gens.size());
  const int din = static_cast<int>(gens[0].rows());
  if (theta.size() != p) throw invalid_input("noise_after_unitary: theta size");
  CMat htot = CMat::Zero(din, din);
  for (int x = 0; x < p; ++x) htot += theta(x) * gens[x];
  CMat u = unitary_from_generators(gens, theta);
  ParamChannel ch;
  ch.dim_in = din;
  ch.dim_out = static_cast<int>(noise_kraus[0].rows());
  ch.num_params = p;
  ch.labels = labels;
  ch.theta_star = theta;
  ch.kraus.assign(p, {});
  ch.dkraus.assign(p, {});
  for (int x = 0; x < p; ++x) {
    CMat du = exp_neg_i_derivative(htot, gens[x]);
    for (const CMat& k : noise_kraus) {
      ch.kraus[x].push_back(k * u);
      ch.dkraus[x].push_back(k * du);
    }
  }
  return ch;
}

// Build a named channel family at an evaluation point.  theta overrides the
// default evaluation point (all zeros for unitary-encoded families; the
// keyed parameter values otherwise).
inline ParamChannel zoo_build(const std::string& name, const ZooParams& params,
                              const std::string& submodel = "",
                              const RVec* theta_override = nullptr) {
  using namespace zoo_detail;
  auto theta_or = [&](const RVec& def) {
    if (!theta_override) return def;
    if (theta_override->size() != def.size())
      throw invalid_input("zoo_build: theta override length mismatch");
    return RVec(*theta_override);
  };

  ParamChannel ch;
  if (name == "erasure_tomography") {
    int d = get_int(params, "d");
    double eta = get_unit_interval(params, "eta");
    std::string sub = submodel.empty() ? "full" : submodel;
    std::vector<CMat> gens = unitary_generators(d, sub);
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < gens.size(); ++i)
      labels.push_back("g" + std::to_string(i));
    ch = noise_after_unitary(erasure_kraus(d, eta), gens,
                             theta_or(RVec::Zero(static_cast<int>(gens.size()))), labels);
  } else if (name == "lossy_multiphase") {
    int p = get_int(params, "p");
    if (p < 1) throw invalid_input("zoo_build: p >= 1 required");
    int d = static_cast<int>(std::lround(get_or(params, "modes", p + 1)));
    if (d < p + 1) throw invalid_input("zoo_build: modes >= p+1 required");
    double eta = get_unit_interval(params, "eta");
    std::vector<CMat> gens;
    std::vector<std::string> labels;
    for (int x = 1; x <= p; ++x) {
      CMat g = CMat::Zero(d, d);
      g(x, x) = 1.0;  // mode 0 is the unmodulated reference arm
      gens.push_back(g);
      labels.push_back("phi" + std::to_string(x));
    }
    ch = noise_after_unitary(erasure_kraus(d, eta), gens,
                             theta_or(RVec::Zero(p)), labels);
  } else if (name == "qudit_dephasing_unitary") {
    int d = get_int(params, "d");
    double eta = get_unit_interval(params, "eta");
    std::vector<CMat> gens = unitary_generators(d, "diag");
    std::vector<std::string> labels;
    for (int x = 0; x < d; ++x) labels.push_back("theta" + std::to_string(x));
    ch = noise_after_unitary(qudit_dephasing_kraus(d, eta), gens,
                             theta_or(RVec::Zero(d)), labels);
  } else if (name == "unitary_family") {
    int d = get_int(params, "d");
    std::string sub = submodel.empty() ? "full" : submodel;
    std::vector<CMat> gens = unitary_generators(d, sub);
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < gens.size(); ++i)
      labels.push_back("g" + std::to_string(i));
    ch = noise_after_unitary({CMat::Identity(d, d)}, gens,
                             theta_or(RVec::Zero(static_cast<int>(gens.size()))), labels);
  } else if (name == "gad") {
    RVec def(2);
    def << get(params, "nu"), get(params, "gamma");
    RVec th = theta_or(def);
    double nu = th(0), gamma = th(1);
    if (!(nu > 0 && nu < 1 && gamma > 0 && gamma < 1))
      throw invalid_input("zoo_build: gad requires nu, gamma in (0,1)");
    auto diag2 = [](double a, double b) {
      CMat m = CMat::Zero(2, 2);
      m(0, 0) = a;
      m(1, 1) = b;
      return m;
    };
    auto upper = [](double v) {
      CMat m = CMat::Zero(2, 2);
      m(0, 1) = v;
      return m;
    };
    auto lower = [](double v) {
      CMat m = CMat::Zero(2, 2);
      m(1, 0) = v;
      return m;
    };
    double sn = std::sqrt(nu), cn = std::sqrt(1 - nu);
    double sg = std::sqrt(gamma), cg = std::sqrt(1 - gamma);
    ch.dim_in = ch.dim_out = 2;
    ch.num_params = 2;
    ch.labels = {"nu", "gamma"};
    ch.theta_star = th;
    std::vector<CMat> ks = {cn * diag2(1, cg), cn * upper(sg),
                            sn * diag2(cg, 1), sn * lower(sg)};
    std::vector<CMat> dnu = {(-0.5 / cn) * diag2(1, cg), (-0.5 / cn) * upper(sg),
                             (0.5 / sn) * diag2(cg, 1), (0.5 / sn) * lower(sg)};
    std::vector<CMat> dga = {cn * diag2(0, -0.5 / cg), cn * upper(0.5 / sg),
                             sn * diag2(-0.5 / cg, 0), sn * lower(0.5 / sg)};
    ch.kraus = {ks, ks};
    ch.dkraus = {dnu, dga};
  } else if (name == "phase_loss") {
    RVec def(2);
    def << get_or(params, "phi", 0.0), get(params, "eta");
    RVec th = theta_or(def);
    double phi = th(0), eta = th(1);
    if (!(eta > 0 && eta < 1))
      throw invalid_input("zoo_build: phase_loss requires eta in (0,1)");
    Complex ep = std::exp(Complex(0, -phi));
    double se = std::sqrt(eta), ce = std::sqrt(1 - eta);
    CMat k0 = CMat::Zero(3, 2), k1 = CMat::Zero(3, 2);
    k0(0, 0) = se * ep;
    k0(1, 1) = 1.0;
    k1(2, 0) = ce;
    CMat dphi_k0 = CMat::Zero(3, 2), dphi_k1 = CMat::Zero(3, 2);
    dphi_k0(0, 0) = Complex(0, -1) * se * ep;
    CMat deta_k0 = CMat::Zero(3, 2), deta_k1 = CMat::Zero(3, 2);
    deta_k0(0, 0) = (0.5 / se) * ep;
    deta_k1(2, 0) = -0.5 / ce;
    ch.dim_in = 2;
    ch.dim_out = 3;
    ch.num_params = 2;
    ch.labels = {"phi", "eta"};
    ch.theta_star = th;
    ch.kraus = {{k0, k1}, {k0, k1}};
    ch.dkraus = {{dphi_k0, dphi_k1}, {deta_k0, deta_k1}};
  } else if (name == "phase_dephasing") {
    RVec def(2);
    def << get_or(params, "phi", 0.0), get(params, "eta");
    RVec th = theta_or(def);
    double phi = th(0), eta = th(1);
    if (!(eta > 0 && eta < 1))
      throw invalid_input("zoo_build: phase_dephasing requires eta in (0,1)");
    Complex ep = std::exp(Complex(0, phi));
    double a = std::sqrt((1 + eta) / 2), b = std::sqrt((1 - eta) / 2);
    CMat k0 = CMat::Zero(2, 2), k1 = CMat::Zero(2, 2);
    k0(0, 0) = a * ep;
    k0(1, 1) = a;
    k1(0, 0) = b * ep;
    k1(1, 1) = -b;
    CMat dphi_k0 = CMat::Zero(2, 2), dphi_k1 = CMat::Zero(2, 2);
    dphi_k0(0, 0) = Complex(0, 1) * a * ep;
    dphi_k1(0, 0) = Complex(0, 1) * b * ep;
    CMat deta_k0 = CMat::Zero(2, 2), deta_k1 = CMat::Zero(2, 2);
    double da = 0.25 / a, db = -0.25 / b;
    deta_k0(0, 0) = da * ep;
    deta_k0(1, 1) = da;
    deta_k1(0, 0) = db * ep;
    deta_k1(1, 1) = -db;
    ch.dim_in = ch.dim_out = 2;
    ch.num_params = 2;
    ch.labels = {"phi", "eta"};
    ch.theta_star = th;
    ch.kraus = {{k0, k1}, {k0, k1}};
    ch.dkraus = {{dphi_k0, dphi_k1}, {deta_k0, deta_k1}};
  } else {
    throw invalid_input("zoo_build: unknown channel family " + name);
  }
  validate_shapes(ch);
  return ch;
}

// Rebuilder closure for finite-difference validation of zoo derivatives.
inline std::function<ParamChannel(const RVec&)> zoo_builder(
    const std::string& name, const ZooParams& params,
    const std::string& submodel = "") {
  return [name, params, submodel](const RVec& theta) {
    return zoo_build(name, params, submodel, &theta);
  };
}

// Central finite differences of the Kraus entries against the stored
// derivatives; returns the maximum entrywise residual over all parameters.
inline double finite_diff_check(
    const ParamChannel& ch,
    const std::function<ParamChannel(const RVec&)>& builder, double step) {
  if (!(step > 0)) throw invalid_input("finite_diff_check: step must be > 0");
  double worst = 0.0;
  for (int x = 0; x < ch.num_params; ++x) {
    RVec tp = ch.theta_star, tm = ch.theta_star;
    tp(x) += step;
    tm(x) -= step;
    ParamChannel plus = builder(tp);
    ParamChannel minus = builder(tm);
    for (std::size_t j = 0; j < ch.kraus[x].size(); ++j) {
      CMat fd = (plus.kraus[x][j] - minus.kraus[x][j]) / (2 * step);
      worst = std::max(worst, (fd - ch.dkraus[x][j]).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

// Grover-search Lindblad models: one oracle-strength parameter per label x
// with Hamiltonian generator |x><x|, under either uniform dephasing
// (L_j = sqrt(gamma) |j><j|) or erasure-style decay into an extra level
// (L_j = sqrt(gamma) |flag><j|).
inline LindbladModel grover_lindblad(const std::string& noise, int d,
                                     double gamma) {
  if (d < 2) throw invalid_input("grover_lindblad: d >= 2 required");
  if (!(gamma > 0)) throw invalid_input("grover_lindblad: gamma must be > 0");
  LindbladModel m;
  m.num_params = d;
  std::vector<CMat> ls;
  int dim = 0;
  if (noise == "dephasing") {
    dim = d;
    for (int j = 0; j < d; ++j) {
      CMat l = CMat::Zero(dim, dim);
      l(j, j) = std::sqrt(gamma);
      ls.push_back(l);
    }
  } else if (noise == "erasure") {
    dim = d + 1;
    m.probe_dim = d;  // the flag level is absorbing and never prepared
    for (int j = 0; j < d; ++j) {
      CMat l = CMat::Zero(dim, dim);
      l(d, j) = std::sqrt(gamma);
      ls.push_back(l);
    }
  } else {
    throw invalid_input("grover_lindblad: unknown noise " + noise);
  }
  m.dim = dim;
  for (int x = 0; x < d; ++x) {
    CMat h = CMat::Zero(dim, dim);
    h(x, x) = 1.0;
    m.hamiltonians.push_back(h);
    m.collapse_ops.push_back(ls);
  }
  return m;
}

}  // namespace qmetro
