// Command-line front door for the precision-bound library: run bounds,
// incompatibility costs, probe recovery, discrimination speed limits, the
// known-result reproduction suite, and grid sweeps with JSON/CSV output.

#include <CLI11.hpp>
#include <json.hpp>

#include <qmetro/bounds.hpp>
#include <qmetro/channel.hpp>
#include <qmetro/discrimination.hpp>
#include <qmetro/incompat.hpp>
#include <qmetro/io.hpp>
#include <qmetro/recovery.hpp>
#include <qmetro/state.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

using nlohmann::json;
using namespace qmetro;

std::string fmt17(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_input("cannot open file: " + path);
  json j;
  in >> j;
  return j;
}

RVec parse_weights(const std::string& spec, int p) {
  if (spec.empty()) return RVec::Ones(p);
  std::vector<double> vals;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
  if (static_cast<int>(vals.size()) != p)
    throw invalid_input("weights: expected " + std::to_string(p) + " entries");
  return Eigen::Map<const RVec>(vals.data(), p);
}

void emit(const json& j, const std::string& out) {
  if (out == "csv") {
    // flat key,value rows for scalar fields
    std::cout << "key,value\n";
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it->is_number())
        std::cout << it.key() << "," << fmt17(it->get<double>()) << "\n";
      else if (it->is_boolean())
        std::cout << it.key() << "," << (it->get<bool>() ? "true" : "false") << "\n";
      else if (it->is_string())
        std::cout << it.key() << "," << it->get<std::string>() << "\n";
    }
  } else {
    std::cout << j.dump(2) << "\n";
  }
}

int worker_count() {
  if (const char* env = std::getenv("QMETRO_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

// ---------------------------------------------------------------------------
// reproduction registry: named computations with their expected values
// ---------------------------------------------------------------------------

struct RegistryCase {
  std::string id;
  std::string description;
  std::function<double()> run;
  double expected;
  double tol;
};

std::vector<RegistryCase> build_registry() {
  std::vector<RegistryCase> reg;
  auto gad = [] { return zoo_build("gad", {{"nu", 0.25}, {"gamma", 0.5}}); };
  reg.push_back({"gad-f-singleuse", "joint single-use bound, damping reference point",
                 [=] { return single_use_bound(gad(), RVec::Ones(2)).value; }, 3.84,
                 0.01});
  reg.push_back({"gad-sum-singles", "sum of per-parameter single-use bounds",
                 [=] { return sum_of_singles(gad(), RVec::Ones(2), BoundMode::single_use); },
                 4.72, 0.01});
  reg.push_back({"gad-rld", "right-logarithmic-derivative bound",
                 [=] { return rld_bound(gad()).value; }, 10.67, 0.01});
  reg.push_back({"phase-loss-i-eta-half", "single-use incompatibility cost at eta=1/2",
                 [] {
                   return incompat_single_use(zoo_build("phase_loss", {{"eta", 0.5}}))
                       .cost;
                 },
                 1.21822, 1e-4});
  reg.push_back({"phase-loss-iinf", "asymptotic incompatibility cost (any eta)",
                 [] {
                   return incompat_asymptotic(zoo_build("phase_loss", {{"eta", 0.5}}))
                       .cost;
                 },
                 1.0, 1e-6});
  reg.push_back({"multiphase-iinf-p3", "asymptotic cost p^2/(4(p-1)) at p=3",
                 [] {
                   return incompat_asymptotic(
                              zoo_build("lossy_multiphase", {{"p", 3}, {"eta", 0.5}}))
                       .cost;
                 },
                 1.125, 1e-5});
  reg.push_back({"erasure-iinf-d3", "asymptotic cost d^3/(2(d^2+d-2)) at d=3",
                 [] {
                   return incompat_asymptotic(
                              zoo_build("erasure_tomography", {{"d", 3}, {"eta", 0.5}}))
                       .cost;
                 },
                 1.35, 1e-5});
  reg.push_back({"qudit-deph-sql-d2", "joint dephased-rotation bound, d=2, eta=1/2",
                 [] {
                   ParamChannel ch = zoo_build("qudit_dephasing_unitary",
                                               {{"d", 2}, {"eta", 0.5}});
                   return sql_bound(ch, RVec::Ones(ch.num_params)).value;
                 },
                 2.0 / 3.0, 1e-6});
  reg.push_back({"grover-deph-bomega-d2", "per-time ensemble bound, dephasing d=2",
                 [] {
                   return markovian_sql_bound(grover_lindblad("dephasing", 2, 1.0),
                                              RVec::Ones(2))
                       .value;
                 },
                 1.0, 1e-6});
  reg.push_back({"grover-erasure-bomega-d2", "per-time ensemble bound, erasure d=2",
                 [] {
                   return markovian_sql_bound(grover_lindblad("erasure", 2, 1.0),
                                              RVec::Ones(2))
                       .value;
                 },
                 2.0, 1e-6});
  reg.push_back({"grover-deph-runtime-dinf",
                 "runtime per query, dephasing large-d cap, quarter rotation",
                 [] { return grover_runtime_cap_dephasing(1.0, 1.0, M_PI / 2); },
                 M_PI * M_PI / 16.0, 1e-9});
  return reg;
}

int run_reproduce(const std::string& case_id, bool all, const std::string& out) {
  std::vector<RegistryCase> reg = build_registry();
  std::vector<RegistryCase> todo;
  if (all || case_id.empty()) {
    todo = reg;
  } else {
    for (const RegistryCase& c : reg)
      if (c.id == case_id) todo.push_back(c);
    if (todo.empty()) {
      std::cerr << "unknown case: " << case_id << "\n";
      return 1;
    }
  }
  json report = json::array();
  std::vector<std::string> failing;
  for (const RegistryCase& c : todo) {
    json row;
    row["case_id"] = c.id;
    row["description"] = c.description;
    row["expected"] = c.expected;
    row["tol"] = c.tol;
    auto t0 = std::chrono::steady_clock::now();
    try {
      double v = c.run();
      row["value"] = v;
      bool pass = std::abs(v - c.expected) <= c.tol;
      row["pass"] = pass;
      if (!pass) failing.push_back(c.id);
    } catch (const std::exception& e) {
      row["error"] = e.what();
      row["pass"] = false;
      failing.push_back(c.id);
    }
    row["runtime_ms"] = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
    report.push_back(row);
  }
  if (out == "csv") {
    std::cout << "case_id,value,expected,tol,pass,runtime_ms\n";
    for (const auto& row : report)
      std::cout << row["case_id"].get<std::string>() << ","
                << (row.contains("value") ? fmt17(row["value"].get<double>()) : "")
                << "," << fmt17(row["expected"].get<double>()) << ","
                << fmt17(row["tol"].get<double>()) << ","
                << (row["pass"].get<bool>() ? "true" : "false") << ","
                << fmt17(row["runtime_ms"].get<double>()) << "\n";
  } else {
    std::cout << report.dump(2) << "\n";
  }
  if (!failing.empty()) {
    std::cerr << "failing cases:";
    for (const std::string& id : failing) std::cerr << " " << id;
    std::cerr << "\n";
    return 1;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// sweep: cartesian grid over zoo parameters, one result row per point
// ---------------------------------------------------------------------------

struct SweepRow {
  std::map<std::string, double> point;
  std::string status = "ok";
  double value = 0.0;
};

double sweep_value(const std::string& mode, const std::string& zoo,
                   const std::string& submodel,
                   const std::map<std::string, double>& point,
                   const std::string& weights_spec) {
  ParamChannel ch = zoo_build(zoo, ZooParams(point.begin(), point.end()), submodel);
  if (mode == "single-use")
    return single_use_bound(ch, parse_weights(weights_spec, ch.num_params)).value;
  if (mode == "sql")
    return sql_bound(ch, parse_weights(weights_spec, ch.num_params)).value;
  if (mode == "incompat-single-use") return incompat_single_use(ch).cost;
  if (mode == "incompat-asymptotic") return incompat_asymptotic(ch).cost;
  throw invalid_input("sweep: unknown mode " + mode);
}

int run_sweep(const std::string& config_path, const std::string& out) {
  json cfg = load_json_file(config_path);
  if (!cfg.contains("schema_version") || cfg["schema_version"].get<int>() != 1)
    throw invalid_input("sweep config: schema_version 1 required");
  for (const char* key : {"mode", "zoo", "grid"})
    if (!cfg.contains(key))
      throw invalid_input(std::string("sweep config: missing field ") + key);
  const std::string mode = cfg["mode"].get<std::string>();
  const std::string zoo = cfg["zoo"].get<std::string>();
  const std::string submodel = cfg.value("submodel", std::string());
  const std::string weights_spec = cfg.value("weights", std::string());

  // sorted axis names for a stable column order
  std::vector<std::string> axes;
  std::vector<std::vector<double>> values;
  for (auto it = cfg["grid"].begin(); it != cfg["grid"].end(); ++it) {
    axes.push_back(it.key());
    values.push_back(it->get<std::vector<double>>());
  }
  std::size_t total = axes.empty() ? 0 : 1;
  for (const auto& v : values) total *= v.size();

  std::vector<SweepRow> rows(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      rows[idx].point[axes[a]] = values[a][rem % values[a].size()];
      rem /= values[a].size();
    }
  }

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= rows.size()) break;
      try {
        rows[i].value = sweep_value(mode, zoo, submodel, rows[i].point, weights_spec);
      } catch (const std::exception& e) {
        rows[i].status = std::string("error: ") + e.what();
      }
    }
  };
  int nw = std::min<int>(worker_count(), std::max<std::size_t>(rows.size(), 1));
  std::vector<std::thread> pool;
  for (int w = 1; w < nw; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  if (out == "json") {
    json jrows = json::array();
    for (const SweepRow& r : rows) {
      json row;
      for (const auto& [k, v] : r.point) row[k] = v;
      row["status"] = r.status;
      if (r.status == "ok") row["value"] = r.value;
      jrows.push_back(row);
    }
    std::cout << jrows.dump(2) << "\n";
  } else {
    for (const std::string& a : axes) std::cout << a << ",";
    std::cout << "value,status\n";
    for (const SweepRow& r : rows) {
      for (const std::string& a : axes) std::cout << fmt17(r.point.at(a)) << ",";
      std::cout << (r.status == "ok" ? fmt17(r.value) : "") << "," << r.status
                << "\n";
    }
  }
  for (const SweepRow& r : rows)
    if (r.status != "ok") return 1;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"precision bounds for multiparameter noisy channel estimation"};
  app.require_subcommand(1);

  std::string channel_path, model_path, weights_spec, out = "json";
  double tol = 1e-9;
  long long uses = 1;
  std::uint64_t seed = 20200828;
  app.add_option("--seed", seed, "seed for stochastic subroutines")
      ->capture_default_str();

  auto add_common = [&](CLI::App* sub, bool needs_channel) {
    if (needs_channel)
      sub->add_option("--channel", channel_path, "channel JSON file")->required();
    sub->add_option("--weights", weights_spec, "comma-separated weights (default: ones)");
    sub->add_option("--tol", tol, "solver duality-gap tolerance")->capture_default_str();
    sub->add_option("--out", out, "output format")->check(CLI::IsMember({"json", "csv"}));
  };

  CLI::App* bound = app.add_subcommand("bound", "precision bounds for a channel");
  std::string bound_mode;
  bound->add_option("mode", bound_mode, "bound flavor")
      ->required()
      ->check(CLI::IsMember(
          {"single-use", "sql", "finite-n", "parallel", "markovian", "rld"}));
  bound->add_option("--model", model_path, "continuous-time model JSON (markovian)");
  bound->add_option("--n", uses, "number of channel uses (finite-n, parallel)");
  add_common(bound, false);
  bound->add_option("--channel", channel_path, "channel JSON file");

  CLI::App* incompat = app.add_subcommand("incompat", "probe-incompatibility cost");
  std::string incompat_mode;
  incompat->add_option("mode", incompat_mode, "cost flavor")
      ->required()
      ->check(CLI::IsMember({"single-use", "asymptotic"}));
  add_common(incompat, true);

  CLI::App* recover = app.add_subcommand("recover", "optimal probe recovery");
  std::string recover_mode = "single-use";
  recover->add_option("--mode", recover_mode, "bound flavor")
      ->check(CLI::IsMember({"single-use", "sql"}));
  add_common(recover, true);

  CLI::App* speed = app.add_subcommand("speedlimit", "query lower bound for discrimination");
  int sl_p = 2;
  double sl_bound = 0.0, sl_theta = 0.0, sl_value = 0.0;
  std::string sl_target = "bures";
  speed->add_option("--p", sl_p, "number of channels")->required();
  speed->add_option("--bound", sl_bound, "constant per-theta bound value")->required();
  speed->add_option("--theta-star", sl_theta, "path length")->required();
  speed->add_option("--target", sl_target, "target type")
      ->check(CLI::IsMember({"error", "bures"}));
  speed->add_option("--value", sl_value, "target value (epsilon or delta)")->required();
  speed->add_option("--out", out, "output format")->check(CLI::IsMember({"json", "csv"}));

  CLI::App* grover = app.add_subcommand("grover", "oracle runtime lower bound");
  std::string gr_noise = "dephasing";
  int gr_d = 2;
  double gr_gamma = 1.0, gr_omega = 1.0, gr_delta = M_PI / 2;
  grover->add_option("--noise", gr_noise, "noise type")
      ->check(CLI::IsMember({"dephasing", "erasure"}));
  grover->add_option("--d", gr_d, "number of oracle labels")->required();
  grover->add_option("--gamma", gr_gamma, "noise rate")->capture_default_str();
  grover->add_option("--omega", gr_omega, "oracle rotation rate")->capture_default_str();
  grover->add_option("--delta", gr_delta, "target Bures angle")->capture_default_str();
  grover->add_option("--out", out, "output format")->check(CLI::IsMember({"json", "csv"}));

  CLI::App* reproduce = app.add_subcommand("reproduce", "run the known-result registry");
  std::string case_id;
  bool rep_all = false;
  reproduce->add_option("case_id", case_id, "registry case to run");
  reproduce->add_flag("--all", rep_all, "run every registered case");
  reproduce->add_option("--out", out, "output format")
      ->check(CLI::IsMember({"json", "csv"}));

  CLI::App* sweep = app.add_subcommand("sweep", "grid sweep from a JSON config");
  std::string sweep_config;
  sweep->add_option("--config", sweep_config, "sweep config JSON")->required();
  sweep->add_option("--out", out, "output format")->check(CLI::IsMember({"json", "csv"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (bound->parsed()) {
      if (bound_mode == "markovian") {
        if (model_path.empty())
          throw invalid_input("bound markovian: --model is required");
        LindbladModel model = lindblad_from_json(load_json_file(model_path));
        BoundResult r = markovian_sql_bound(
            model, parse_weights(weights_spec, model.num_params), tol);
        emit(bound_result_to_json(r, "markovian"), out);
        return 0;
      }
      if (channel_path.empty()) throw invalid_input("bound: --channel is required");
      ParamChannel ch = channel_from_json(load_json_file(channel_path));
      RVec w = parse_weights(weights_spec, ch.num_params);
      if (bound_mode == "single-use") {
        emit(bound_result_to_json(single_use_bound(ch, w, tol), "single_use"), out);
      } else if (bound_mode == "sql") {
        emit(bound_result_to_json(sql_bound(ch, w, tol), "sql"), out);
      } else if (bound_mode == "rld") {
        emit(rld_result_to_json(rld_bound(ch)), out);
      } else {
        std::vector<HermitianGauge> cands = default_gauge_candidates(ch, w);
        json j;
        j["n"] = uses;
        if (bound_mode == "finite-n") {
          j["mode"] = "finite_n";
          j["bound"] = finite_n_bound_eval(ch, w, cands, uses);
        } else {
          std::vector<bool> flags;
          j["mode"] = "parallel";
          j["bound"] = parallel_bound_eval(ch, w, cands, uses, &flags);
          j["nonhermitian_beta_flags"] = flags;
        }
        emit(j, out);
      }
      return 0;
    }
    if (incompat->parsed()) {
      ParamChannel ch = channel_from_json(load_json_file(channel_path));
      IncompatReport rep = (incompat_mode == "single-use")
                               ? incompat_single_use(ch)
                               : incompat_asymptotic(ch);
      json j = incompat_report_to_json(rep);
      j["naturalness"] = naturalness_check(ch);
      emit(j, out);
      return 0;
    }
    if (recover->parsed()) {
      ParamChannel ch = channel_from_json(load_json_file(channel_path));
      RVec w = parse_weights(weights_spec, ch.num_params);
      BoundMode mode = (recover_mode == "sql") ? BoundMode::sql : BoundMode::single_use;
      RecoveryResult rec = recover_optimal_state(ch, w, mode, tol);
      RecoveredQfi qfi = qfi_matrix_of_recovered(rec, ch, rec.gauge);
      emit(recovery_result_to_json(rec, qfi), out);
      return rec.feasible ? 0 : 1;
    }
    if (speed->parsed()) {
      DiscriminationTarget t = (sl_target == "error")
                                   ? DiscriminationTarget::error_probability
                                   : DiscriminationTarget::bures_angle;
      double n = speed_limit_queries(
          SpeedLimitQuery::constant(sl_p, sl_bound, sl_theta, t, sl_value));
      json j;
      j["queries_lower_bound"] = n;
      emit(j, out);
      return 0;
    }
    if (grover->parsed()) {
      json j;
      j["runtime_per_query_lower_bound"] =
          grover_runtime_bound(gr_noise, gr_d, gr_gamma, gr_omega, gr_delta);
      emit(j, out);
      return 0;
    }
    if (reproduce->parsed()) return run_reproduce(case_id, rep_all, out);
    if (sweep->parsed()) return run_sweep(sweep_config, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
