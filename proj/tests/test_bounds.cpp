#include <catch2/catch_amalgamated.hpp>

#include <qmetro/bounds.hpp>

#include <cmath>
#include <random>

using namespace qmetro;

namespace {

// Random unitary mixing of a Kraus list (an equivalent representation of
// the same channel), with derivatives co-transformed.
ParamChannel mixed_kraus_copy(const ParamChannel& ch, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ParamChannel out = ch;
  for (int x = 0; x < ch.num_params; ++x) {
    const int r = ch.kraus_rank(x);
    CMat u = random_unitary(rng, r);
    for (int j = 0; j < r; ++j) {
      out.kraus[x][j] = CMat::Zero(ch.dim_out, ch.dim_in);
      out.dkraus[x][j] = CMat::Zero(ch.dim_out, ch.dim_in);
      for (int l = 0; l < r; ++l) {
        out.kraus[x][j] += u(j, l) * ch.kraus[x][l];
        out.dkraus[x][j] += u(j, l) * ch.dkraus[x][l];
      }
    }
  }
  return out;
}

ParamChannel single_generator_qubit() {
  CMat g = CMat::Zero(2, 2);
  g(0, 0) = 0.5;
  g(1, 1) = -0.5;
  return noise_after_unitary({CMat::Identity(2, 2)}, {g}, RVec::Zero(1), {"g"});
}

// Qubit dephasing channel with coherence-decay factor eta around a
// sigma_z/2 generator, evaluated at theta = 0.
ParamChannel dephased_qubit_phase(double eta) {
  CMat sz = CMat::Zero(2, 2);
  sz(0, 0) = 1.0;
  sz(1, 1) = -1.0;
  std::vector<CMat> ks = {std::sqrt((1 + eta) / 2) * CMat::Identity(2, 2),
                          std::sqrt((1 - eta) / 2) * sz};
  return noise_after_unitary(ks, {0.5 * sz}, RVec::Zero(1), {"phi"});
}

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

}  // namespace

TEST_CASE("alpha and beta follow their definitions") {
  ParamChannel gad = zoo_build("gad", {{"nu", 0.25}, {"gamma", 0.5}});
  HermitianGauge zero = HermitianGauge::zero(gad);
  for (int x = 0; x < 2; ++x) {
    auto [a, b] = build_alpha_beta(gad, zero, x);
    CMat aref = CMat::Zero(2, 2), bref = CMat::Zero(2, 2);
    for (int j = 0; j < gad.kraus_rank(x); ++j) {
      aref += gad.dkraus[x][j].adjoint() * gad.dkraus[x][j];
      bref += gad.dkraus[x][j].adjoint() * gad.kraus[x][j];
    }
    REQUIRE(operator_norm(a - aref) < 1e-14);
    REQUIRE(operator_norm(b - bref) < 1e-14);
    REQUIRE(operator_norm(a - a.adjoint()) < 1e-14);
  }

  SECTION("single-Kraus unitary algebra") {
    ParamChannel u = single_generator_qubit();
    HermitianGauge g;
    g.h.push_back(CMat::Zero(1, 1));
    g.h[0](0, 0) = 0.2;
    auto [a, b] = build_alpha_beta(u, g, 0);
    CMat gen = CMat::Zero(2, 2);
    gen(0, 0) = 0.5;
    gen(1, 1) = -0.5;
    CMat shifted = gen + 0.2 * CMat::Identity(2, 2);
    REQUIRE(operator_norm(a - shifted * shifted) < 1e-12);
    REQUIRE(operator_norm(b - Complex(0, 1) * shifted) < 1e-12);
  }

  SECTION("phase-loss vanishing-beta gauge") {
    double eta = 0.35;
    ParamChannel pl = zoo_build("phase_loss", {{"eta", eta}});
    HermitianGauge g = HermitianGauge::zero(pl);
    g.h[0](1, 1) = -eta / (1 - eta);
    auto [a, b] = build_alpha_beta(pl, g, 0);
    REQUIRE(operator_norm(b) < 1e-12);
    CMat want = CMat::Zero(2, 2);
    want(0, 0) = 4 * eta / (1 - eta);
    REQUIRE(operator_norm(4 * a - want) < 1e-12);
  }

  SECTION("gauge dimension mismatch is rejected") {
    HermitianGauge bad;
    bad.h.assign(2, CMat::Zero(3, 3));
    REQUIRE_THROWS_AS(build_alpha_beta(gad, bad, 0), invalid_input);
  }
}

TEST_CASE("single-use bound reproduces known values") {
  SECTION("amplitude-damping family, joint and per-parameter") {
    ParamChannel gad = zoo_build("gad", {{"nu", 0.25}, {"gamma", 0.5}});
    BoundResult joint = single_use_bound(gad, RVec::Ones(2));
    REQUIRE(joint.solver.status == SdpStatus::optimal);
    REQUIRE(std::abs(joint.value - 3.84) < 0.01);
    double singles = sum_of_singles(gad, RVec::Ones(2), BoundMode::single_use);
    REQUIRE(std::abs(singles - 4.72) < 0.01);
    REQUIRE(joint.value <= singles + 1e-8);
  }

  SECTION("qubit phase with dephasing: no incompatibility at the one-shot level") {
    for (double eta : {0.3, 0.5, 0.8}) {
      ParamChannel ch = zoo_build("phase_dephasing", {{"eta", eta}});
      double fphi = single_parameter_bound(ch, 0, BoundMode::single_use);
      double feta = single_parameter_bound(ch, 1, BoundMode::single_use);
      REQUIRE(rel_err(fphi, eta * eta) < 1e-7);
      REQUIRE(rel_err(feta, 1.0 / (1 - eta * eta)) < 1e-7);
      BoundResult joint = single_use_bound(ch, RVec::Ones(2));
      REQUIRE(rel_err(joint.value, eta * eta + 1.0 / (1 - eta * eta)) < 1e-6);
    }
  }

  SECTION("qubit phase with loss, per-parameter") {
    for (double eta : {0.25, 0.5, 0.75}) {
      ParamChannel ch = zoo_build("phase_loss", {{"eta", eta}});
      double fphi = single_parameter_bound(ch, 0, BoundMode::single_use);
      double feta = single_parameter_bound(ch, 1, BoundMode::single_use);
      double se = std::sqrt(eta);
      REQUIRE(rel_err(fphi, 4 * eta / ((1 + se) * (1 + se))) < 1e-7);
      REQUIRE(rel_err(feta, 1.0 / (eta * (1 - eta))) < 1e-7);
    }
  }

  SECTION("noiseless qubit rotation") {
    double v = single_use_bound(single_generator_qubit(), RVec::Ones(1)).value;
    REQUIRE(rel_err(v, 1.0) < 1e-7);
  }
}

TEST_CASE("asymptotic bound closed forms: qubit phase families") {
  for (double eta : {0.25, 0.5, 0.75}) {
    ParamChannel pl = zoo_build("phase_loss", {{"eta", eta}});
    double bphi = single_parameter_bound(pl, 0, BoundMode::sql);
    double beta_b = single_parameter_bound(pl, 1, BoundMode::sql);
    REQUIRE(rel_err(bphi, 4 * eta / (1 - eta)) < 1e-7);
    REQUIRE(rel_err(beta_b, 1.0 / (eta * (1 - eta))) < 1e-7);
    BoundResult joint = sql_bound(pl, RVec::Ones(2));
    REQUIRE(rel_err(joint.value, 4 * eta / (1 - eta) + 1.0 / (eta * (1 - eta))) <
            1e-6);
    for (double r : joint.beta_residuals) REQUIRE(r <= 1e-7);

    ParamChannel pd = zoo_build("phase_dephasing", {{"eta", eta}});
    REQUIRE(rel_err(single_parameter_bound(pd, 0, BoundMode::sql),
                    eta * eta / (1 - eta * eta)) < 1e-7);
    REQUIRE(rel_err(single_parameter_bound(pd, 1, BoundMode::sql),
                    1.0 / (1 - eta * eta)) < 1e-7);
  }

  SECTION("amplitude damping: single-use and asymptotic bounds coincide") {
    ParamChannel gad = zoo_build("gad", {{"nu", 0.25}, {"gamma", 0.5}});
    double f = single_use_bound(gad, RVec::Ones(2)).value;
    BoundResult b = sql_bound(gad, RVec::Ones(2));
    REQUIRE(rel_err(b.value, f) < 1e-6);
    for (double r : b.beta_residuals) REQUIRE(r <= 1e-7);
  }
}

TEST_CASE("asymptotic bound closed forms: erasure tomography") {
  const double eta = 0.5;
  const double pref = eta / (1 - eta);
  for (int d : {2, 3, 4}) {
    ParamChannel full = zoo_build("erasure_tomography", {{"d", double(d)}, {"eta", eta}});
    double want_full = pref * (4.0 * (d - 1) / d + 2.0 * (d - 1));
    BoundResult r = sql_bound(full, RVec::Ones(full.num_params));
    REQUIRE(rel_err(r.value, want_full) < 1e-5);

    ParamChannel diag =
        zoo_build("erasure_tomography", {{"d", double(d)}, {"eta", eta}}, "diag");
    REQUIRE(rel_err(sql_bound(diag, RVec::Ones(d)).value,
                    pref * 4.0 * (d - 1) / d) < 1e-6);

    for (const char* sub : {"real", "imag"}) {
      ParamChannel part =
          zoo_build("erasure_tomography", {{"d", double(d)}, {"eta", eta}}, sub);
      REQUIRE(rel_err(sql_bound(part, RVec::Ones(part.num_params)).value,
                      pref * (d - 1)) < 1e-6);
    }
  }
}

TEST_CASE("asymptotic bound closed forms: multiphase and qudit dephasing") {
  SECTION("lossy multiphase interferometry") {
    const double eta = 0.4;
    ParamChannel one = zoo_build("lossy_multiphase", {{"p", 1}, {"eta", eta}});
    REQUIRE(rel_err(sql_bound(one, RVec::Ones(1)).value, eta / (1 - eta)) < 1e-7);
    for (int p : {2, 3}) {
      ParamChannel ch = zoo_build("lossy_multiphase", {{"p", double(p)}, {"eta", eta}});
      double want = eta / (1 - eta) * 4.0 * (p - 1) / p;
      REQUIRE(rel_err(sql_bound(ch, RVec::Ones(p)).value, want) < 1e-6);
    }
  }

  SECTION("qudit dephasing around commuting phases") {
    for (int d : {2, 3, 4})
      for (double eta : {0.3, 0.5, 0.7}) {
        ParamChannel ch =
            zoo_build("qudit_dephasing_unitary", {{"d", double(d)}, {"eta", eta}});
        double want = 4 * eta * (d - 1) / ((1 - eta) * (d + 2 / eta));
        BoundResult r = sql_bound(ch, RVec::Ones(d));
        REQUIRE(rel_err(r.value, want) < 1e-6);
        for (double res : r.beta_residuals) REQUIRE(res <= 1e-7);
      }
  }
}

TEST_CASE("asymptotic bound refuses channels without a vanishing-beta gauge") {
  ParamChannel ch = zoo_build("unitary_family", {{"d", 2}}, "diag");
  REQUIRE_THROWS_AS(sql_bound(ch, RVec::Ones(2)), heisenberg_possible);
  try {
    sql_bound(ch, RVec::Ones(2));
  } catch (const heisenberg_possible& e) {
    REQUIRE(std::string(e.what()).find("g0") != std::string::npos);
    REQUIRE(std::string(e.what()).find("g1") != std::string::npos);
  }
}

TEST_CASE("finite-N and parallel evaluations") {
  ParamChannel gad = zoo_build("gad", {{"nu", 0.25}, {"gamma", 0.5}});
  RVec w = RVec::Ones(2);
  BoundResult su = single_use_bound(gad, w);
  BoundResult sq = sql_bound(gad, w);

  SECTION("N = 1 at the one-shot optimum reduces to the one-shot bound") {
    double v = finite_n_bound_eval(gad, w, {su.gauge}, 1);
    REQUIRE(rel_err(v, su.value) < 1e-9);
    REQUIRE(parallel_bound_eval(gad, w, {su.gauge}, 1) >= su.value - 1e-9);
  }

  SECTION("a vanishing-beta gauge kills the quadratic term") {
    for (long long n : {1LL, 7LL, 50LL}) {
      REQUIRE(rel_err(finite_n_bound_eval(gad, w, {sq.gauge}, n),
                      n * sq.value) < 1e-6);
      REQUIRE(rel_err(parallel_bound_eval(gad, w, {sq.gauge}, n),
                      n * sq.value) < 1e-6);
    }
  }

  SECTION("joint finite-N bound respects the per-parameter triangle bound") {
    std::vector<HermitianGauge> cands = default_gauge_candidates(gad, w);
    double joint = finite_n_bound_eval(gad, w, cands, 10);
    double split = 0.0;
    for (int x = 0; x < 2; ++x) {
      ParamChannel sub = select_parameter(gad, x);
      RVec one = RVec::Ones(1);
      split += finite_n_bound_eval(sub, one, default_gauge_candidates(sub, one), 10);
    }
    REQUIRE(joint <= split + 1e-8);
    REQUIRE(finite_n_bound_eval(gad, w, cands, 5) <=
            finite_n_bound_eval(gad, w, cands, 6) + 1e-12);
  }

  SECTION("literal evaluation on the noiseless qubit at h = 0") {
    ParamChannel u = single_generator_qubit();
    RVec one = RVec::Ones(1);
    std::vector<HermitianGauge> zero = {HermitianGauge::zero(u)};
    // alpha = G^2 = I/4, beta = iG: 4{5/4 + 20*(1/2)*(1/2 + 2*sqrt(1/4))} = 65
    REQUIRE(rel_err(finite_n_bound_eval(u, one, zero, 5), 65.0) < 1e-12);
    // parallel: beta^2 = -I/4: 4{5/4 + 20/4} = 25, with non-Hermitian beta
    std::vector<bool> flags;
    REQUIRE(rel_err(parallel_bound_eval(u, one, zero, 5, &flags), 25.0) < 1e-12);
    REQUIRE(flags == std::vector<bool>{true});
  }

  SECTION("argument validation") {
    REQUIRE_THROWS_AS(finite_n_bound_eval(gad, w, {}, 3), invalid_input);
    REQUIRE_THROWS_AS(finite_n_bound_eval(gad, w, {su.gauge}, 0), invalid_input);
  }
}

TEST_CASE("markovian bound reproduces the oracle-ensemble closed forms") {
  for (double gamma : {1.0, 0.7})
    for (int d = 2; d <= 6; ++d) {
      LindbladModel deph = grover_lindblad("dephasing", d, gamma);
      BoundResult r = markovian_sql_bound(deph, RVec::Ones(d));
      REQUIRE(rel_err(r.value, 4.0 * (d - 1) / (gamma * (d + 2))) < 1e-6);
      for (double res : r.beta_residuals) REQUIRE(res <= 1e-7);

      LindbladModel era = grover_lindblad("erasure", d, gamma);
      REQUIRE(rel_err(markovian_sql_bound(era, RVec::Ones(d)).value,
                      4.0 * (d - 1) / (d * gamma)) < 1e-6);
    }
}

TEST_CASE("markovian bound matches the short-time channel limit") {
  const double gamma = 0.8;
  // qubit dephasing L = sqrt(gamma/2) sigma_z, H = sigma_z/2: coherence
  // decays as exp(-gamma t), so the discretized channel has eta = e^{-g tau}
  CMat sz = CMat::Zero(2, 2);
  sz(0, 0) = 1.0;
  sz(1, 1) = -1.0;
  LindbladModel m;
  m.dim = 2;
  m.num_params = 1;
  m.hamiltonians = {0.5 * sz};
  m.collapse_ops = {{std::sqrt(gamma / 2) * sz}};
  double markov = markovian_sql_bound(m, RVec::Ones(1)).value;
  REQUIRE(rel_err(markov, 1.0 / (2 * gamma)) < 1e-7);

  double tau = 1e-4;
  double eta = std::exp(-gamma * tau);
  double per_use = sql_bound(dephased_qubit_phase(eta), RVec::Ones(1)).value;
  REQUIRE(rel_err(tau * per_use, markov) < 1e-3);
}

TEST_CASE("markovian bound refuses models outside the dissipative span") {
  // Hamiltonian sigma_x/2 with sigma_z dephasing cannot be linearized away
  CMat sx = CMat::Zero(2, 2), sz = CMat::Zero(2, 2);
  sx(0, 1) = 1.0;
  sx(1, 0) = 1.0;
  sz(0, 0) = 1.0;
  sz(1, 1) = -1.0;
  LindbladModel m;
  m.dim = 2;
  m.num_params = 1;
  m.hamiltonians = {0.5 * sx};
  m.collapse_ops = {{std::sqrt(0.5) * sz}};
  REQUIRE_THROWS_AS(markovian_sql_bound(m, RVec::Ones(1)), heisenberg_possible);
}

TEST_CASE("right-logarithmic-derivative bound") {
  SECTION("amplitude damping value and ordering") {
    ParamChannel gad = zoo_build("gad", {{"nu", 0.25}, {"gamma", 0.5}});
    RldResult r = rld_bound(gad);
    REQUIRE(r.finite);
    REQUIRE(std::abs(r.value - 10.67) < 0.01);
    REQUIRE(sql_bound(gad, RVec::Ones(2)).value <= r.value + 1e-8);
  }

  SECTION("ordering against the asymptotic bound whenever finite") {
    for (const char* name : {"phase_dephasing", "phase_loss"}) {
      ParamChannel ch = zoo_build(name, {{"eta", 0.6}});
      RldResult r = rld_bound(ch);
      if (r.finite)
        REQUIRE(sql_bound(ch, RVec::Ones(2)).value <= r.value + 1e-8);
    }
  }

  SECTION("noiseless unitary leaks off the Choi support") {
    RldResult r = rld_bound(single_generator_qubit());
    REQUIRE_FALSE(r.finite);
  }
}

TEST_CASE("noiseless generator bound") {
  CMat sz = CMat::Zero(2, 2);
  sz(0, 0) = 0.5;
  sz(1, 1) = -0.5;
  REQUIRE(rel_err(kura_ueda_bound({sz}), 1.0) < 1e-14);

  std::vector<CMat> diag3 = unitary_generators(3, "diag");
  REQUIRE(rel_err(kura_ueda_bound(diag3), 4.0) < 1e-14);

  std::vector<CMat> full3 = unitary_generators(3, "full");
  CMat s = CMat::Zero(3, 3);
  for (const CMat& g : full3) s += g * g;
  double ku = kura_ueda_bound(full3);
  REQUIRE(rel_err(ku, 4 * operator_norm(s)) < 1e-14);
  ParamChannel u = zoo_build("unitary_family", {{"d", 3}});
  REQUIRE(single_use_bound(u, RVec::Ones(u.num_params)).value <= ku + 1e-7);

  CMat nh = CMat::Zero(2, 2);
  nh(0, 1) = 1.0;
  REQUIRE_THROWS_AS(kura_ueda_bound({nh}), invalid_input);
}

TEST_CASE("bounds are invariant under Kraus mixing and evaluation point") {
  ParamChannel gad = zoo_build("gad", {{"nu", 0.25}, {"gamma", 0.5}});
  ParamChannel mixed = mixed_kraus_copy(gad, 20260823);
  RVec w(2);
  w << 0.7, 1.4;
  REQUIRE(std::abs(single_use_bound(gad, w).value -
                   single_use_bound(mixed, w).value) < 1e-8);
  REQUIRE(std::abs(sql_bound(gad, w).value - sql_bound(mixed, w).value) < 1e-8);
  REQUIRE(std::abs(rld_bound(gad).value - rld_bound(mixed).value) < 1e-8);

  SECTION("commuting phase family: bound independent of the phase point") {
    ParamChannel at0 = zoo_build("lossy_multiphase", {{"p", 2}, {"eta", 0.4}});
    RVec theta(2);
    theta << 0.3, -0.2;
    ParamChannel at_theta =
        zoo_build("lossy_multiphase", {{"p", 2}, {"eta", 0.4}}, "", &theta);
    RVec ww = RVec::Ones(2);
    REQUIRE(std::abs(sql_bound(at0, ww).value - sql_bound(at_theta, ww).value) <
            1e-6);
  }
}

TEST_CASE("bounds are positively homogeneous in the weights") {
  ParamChannel gad = zoo_build("gad", {{"nu", 0.25}, {"gamma", 0.5}});
  RVec w(2);
  w << 0.4, 1.3;
  const double c = 2.7;
  REQUIRE(rel_err(single_use_bound(gad, RVec(c * w)).value,
                  c * single_use_bound(gad, w).value) < 1e-7);
  ParamChannel er = zoo_build("erasure_tomography", {{"d", 2}, {"eta", 0.4}});
  RVec we = RVec::Ones(4);
  REQUIRE(rel_err(sql_bound(er, RVec(c * we)).value,
                  c * sql_bound(er, we).value) < 1e-6);
}

TEST_CASE("triangle chain across the channel zoo") {
  struct Case {
    ParamChannel ch;
  };
  std::vector<ParamChannel> channels;
  channels.push_back(zoo_build("gad", {{"nu", 0.25}, {"gamma", 0.5}}));
  channels.push_back(zoo_build("phase_loss", {{"eta", 0.5}}));
  channels.push_back(zoo_build("phase_dephasing", {{"eta", 0.6}}));
  channels.push_back(zoo_build("erasure_tomography", {{"d", 2}, {"eta", 0.5}}, "diag"));
  for (const ParamChannel& ch : channels) {
    for (double scale : {1.0, 0.5}) {
      RVec w = RVec::Constant(ch.num_params, scale);
      w(0) *= 1.5;
      double su = single_use_bound(ch, w).value;
      double sq = sql_bound(ch, w).value;
      REQUIRE(su <= sum_of_singles(ch, w, BoundMode::single_use) + 1e-7);
      REQUIRE(sq <= sum_of_singles(ch, w, BoundMode::sql) + 1e-7);
      REQUIRE(su <= sq + 1e-7);
      REQUIRE(su >= 0.0);
    }
  }
}
