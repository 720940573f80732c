#pragma once

// JSON serialization for channels and results.  Channel schema:
//   {"dim_in": n, "dim_out": m, "params": ["name", ...],
//    "kraus": [matrix, ...], "dkraus": [[matrix, ...] per parameter],
//    "theta_star": [real, ...] (optional)}
// where a matrix is a row-major nested list and each entry is [re, im].
// The schema carries one shared Kraus list; every parameter is a derivative
// direction of the same channel.

#include <qmetro/bounds.hpp>
#include <qmetro/channel.hpp>
#include <qmetro/incompat.hpp>
#include <qmetro/recovery.hpp>

#include <json.hpp>

namespace qmetro {

inline nlohmann::json cmat_to_json(const CMat& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < m.cols(); ++j)
      row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(row);
  }
  return rows;
}

inline CMat cmat_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty())
    throw invalid_input("channel json: matrix must be a nonempty array");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j[0].size());
  CMat m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(j[i].size()) != cols)
      throw invalid_input("channel json: ragged matrix rows");
    for (int c = 0; c < cols; ++c) {
      const auto& e = j[i][c];
      if (!e.is_array() || e.size() != 2)
        throw invalid_input("channel json: entries must be [re, im]");
      m(i, c) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

inline nlohmann::json channel_to_json(const ParamChannel& ch) {
  if (!ch.single_channel_mode())
    throw invalid_input(
        "channel_to_json: schema supports one shared Kraus list only");
  nlohmann::json j;
  j["dim_in"] = ch.dim_in;
  j["dim_out"] = ch.dim_out;
  j["params"] = ch.labels;
  nlohmann::json ks = nlohmann::json::array();
  for (const CMat& k : ch.kraus[0]) ks.push_back(cmat_to_json(k));
  j["kraus"] = ks;
  nlohmann::json dks = nlohmann::json::array();
  for (int x = 0; x < ch.num_params; ++x) {
    nlohmann::json lst = nlohmann::json::array();
    for (const CMat& dk : ch.dkraus[x]) lst.push_back(cmat_to_json(dk));
    dks.push_back(lst);
  }
  j["dkraus"] = dks;
  nlohmann::json th = nlohmann::json::array();
  for (int x = 0; x < ch.theta_star.size(); ++x) th.push_back(ch.theta_star(x));
  j["theta_star"] = th;
  return j;
}

inline ParamChannel channel_from_json(const nlohmann::json& j,
                                      double cptp_tol = 1e-10) {
  for (const char* key : {"dim_in", "dim_out", "params", "kraus", "dkraus"})
    if (!j.contains(key))
      throw invalid_input(std::string("channel json: missing field ") + key);
  ParamChannel ch;
  ch.dim_in = j["dim_in"].get<int>();
  ch.dim_out = j["dim_out"].get<int>();
  ch.labels = j["params"].get<std::vector<std::string>>();
  ch.num_params = static_cast<int>(ch.labels.size());
  std::vector<CMat> shared;
  for (const auto& km : j["kraus"]) shared.push_back(cmat_from_json(km));
  if (static_cast<int>(j["dkraus"].size()) != ch.num_params)
    throw invalid_input("channel json: dkraus count != params count");
  ch.kraus.assign(ch.num_params, shared);
  for (const auto& lst : j["dkraus"]) {
    std::vector<CMat> dks;
    for (const auto& dkm : lst) dks.push_back(cmat_from_json(dkm));
    ch.dkraus.push_back(dks);
  }
  if (j.contains("theta_star")) {
    auto v = j["theta_star"].get<std::vector<double>>();
    ch.theta_star = Eigen::Map<const RVec>(v.data(), static_cast<int>(v.size()));
  } else {
    ch.theta_star = RVec::Zero(ch.num_params);
  }
  CptpReport rep = validate_cptp(ch, cptp_tol);
  if (!rep.passed)
    throw invalid_input("channel json: Kraus list is not trace preserving, residual " +
                        std::to_string(rep.max_residual));
  return ch;
}

inline nlohmann::json bound_result_to_json(const BoundResult& r,
                                           const std::string& mode) {
  nlohmann::json j;
  j["bound"] = r.value;
  j["mode"] = mode;
  nlohmann::json w = nlohmann::json::array();
  for (int x = 0; x < r.weights.size(); ++x) w.push_back(r.weights(x));
  j["weights"] = w;
  nlohmann::json gs = nlohmann::json::array();
  for (const CMat& h : r.gauge.h) gs.push_back(cmat_to_json(h));
  j["gauge"] = gs;
  j["beta_residuals"] = r.beta_residuals;
  j["solver"] = {{"status", to_string(r.solver.status)},
                 {"gap", r.solver.duality_gap}};
  return j;
}

// Continuous-time model schema:
//   {"dim": d, "params": ["name", ...], "probe_dim": d' (optional),
//    "hamiltonians": [matrix per parameter],
//    "collapse_ops": [[matrix, ...] per parameter]}
inline LindbladModel lindblad_from_json(const nlohmann::json& j) {
  for (const char* key : {"dim", "hamiltonians", "collapse_ops"})
    if (!j.contains(key))
      throw invalid_input(std::string("model json: missing field ") + key);
  LindbladModel m;
  m.dim = j["dim"].get<int>();
  if (j.contains("probe_dim")) m.probe_dim = j["probe_dim"].get<int>();
  for (const auto& hm : j["hamiltonians"]) m.hamiltonians.push_back(cmat_from_json(hm));
  for (const auto& lst : j["collapse_ops"]) {
    std::vector<CMat> ls;
    for (const auto& lm : lst) ls.push_back(cmat_from_json(lm));
    m.collapse_ops.push_back(ls);
  }
  m.num_params = static_cast<int>(m.hamiltonians.size());
  if (static_cast<int>(m.collapse_ops.size()) != m.num_params)
    throw invalid_input("model json: collapse_ops count != hamiltonians count");
  return m;
}

inline nlohmann::json rld_result_to_json(const RldResult& r) {
  nlohmann::json j;
  j["finite"] = r.finite;
  j["leak"] = r.leak;
  if (r.finite) j["bound"] = r.value;
  return j;
}

inline nlohmann::json incompat_report_to_json(const IncompatReport& rep) {
  nlohmann::json j;
  j["mode"] = rep.mode;
  j["cost"] = rep.cost;
  j["joint_bound"] = rep.joint;
  nlohmann::json s = nlohmann::json::array(), w = nlohmann::json::array();
  for (int x = 0; x < rep.singles.size(); ++x) {
    s.push_back(rep.singles(x));
    w.push_back(rep.weights(x));
  }
  j["single_parameter_bounds"] = s;
  j["weights"] = w;
  return j;
}

inline nlohmann::json recovery_result_to_json(const RecoveryResult& rec,
                                              const RecoveredQfi& qfi) {
  nlohmann::json j;
  j["feasible"] = rec.feasible;
  j["bound"] = rec.bound_value;
  j["rho_star"] = cmat_to_json(rec.rho_star.mat);
  j["support_dim"] = rec.support_dim;
  j["eigen_gap"] = rec.eigen_gap;
  j["constraint_residual"] = rec.constraint_residual;
  nlohmann::json rows = nlohmann::json::array();
  for (int x = 0; x < qfi.fisher.rows(); ++x) {
    nlohmann::json row = nlohmann::json::array();
    for (int y = 0; y < qfi.fisher.cols(); ++y) row.push_back(qfi.fisher(x, y));
    rows.push_back(row);
  }
  j["qfi_matrix"] = rows;
  j["holevo_saturated"] = check_holevo_saturation(qfi.complex_fisher, 1e-6);
  return j;
}

}  // namespace qmetro
