#include <catch2/catch_amalgamated.hpp>

#include <qmetro/incompat.hpp>
#include <qmetro/recovery.hpp>

#include <cmath>

using namespace qmetro;

namespace {

double weighted_trace(const RMat& fisher, const RVec& weights) {
  double t = 0.0;
  for (int x = 0; x < weights.size(); ++x) t += weights(x) * fisher(x, x);
  return t;
}

ParamChannel single_generator_qubit() {
  CMat sz(2, 2);
  sz << 1, 0, 0, -1;
  return noise_after_unitary({CMat::Identity(2, 2)}, {0.5 * sz}, RVec::Zero(1),
                             {"g"});
}

}  // namespace

TEST_CASE("recovered probes reproduce the solved bound across the zoo") {
  struct Case {
    ParamChannel ch;
    RVec weights;
  };
  std::vector<Case> cases;
  cases.push_back({zoo_build("gad", {{"nu", 0.25}, {"gamma", 0.5}}), RVec::Ones(2)});
  cases.push_back({zoo_build("phase_loss", {{"eta", 0.5}}), RVec::Ones(2)});
  cases.push_back({zoo_build("phase_dephasing", {{"eta", 0.6}}), RVec::Ones(2)});
  cases.push_back(
      {zoo_build("erasure_tomography", {{"d", 2}, {"eta", 0.5}}, "diag"), RVec::Ones(2)});
  cases.push_back(
      {zoo_build("lossy_multiphase", {{"p", 2}, {"eta", 0.4}}), RVec::Ones(2)});
  RVec uneven(2);
  uneven << 2.0, 0.7;
  cases.push_back({zoo_build("gad", {{"nu", 0.25}, {"gamma", 0.5}}), uneven});

  for (const Case& c : cases) {
    RecoveryResult rec = recover_optimal_state(c.ch, c.weights, BoundMode::single_use);
    REQUIRE(rec.feasible);
    CHECK(rec.constraint_residual <= 1e-7);
    // valid state on the selected eigenspace
    CHECK(std::abs(rec.rho_star.mat.trace().real() - 1.0) < 1e-8);
    HermEig e = herm_eig(rec.rho_star.mat);
    CHECK(e.eigenvalues(0) > -1e-9);
    // weighted trace of the QFI matrix equals the bound value
    RecoveredQfi q = qfi_matrix_of_recovered(rec, c.ch, rec.gauge);
    double wt = weighted_trace(q.fisher, c.weights);
    CHECK(std::abs(wt - rec.bound_value) < 1e-5 * (1.0 + rec.bound_value));
    // bit-exact symmetry of the returned matrix
    CHECK(q.fisher == RMat(q.fisher.transpose()));
  }
}

TEST_CASE("dephased phase-visibility probe is the balanced superposition") {
  double eta = 0.6;
  ParamChannel ch = zoo_build("phase_dephasing", {{"eta", eta}});
  RecoveryResult rec = recover_optimal_state(ch, RVec::Ones(2), BoundMode::single_use);
  REQUIRE(rec.feasible);
  // the balanced superposition lies in the recovered optimal face: full
  // stationarity residual and support within the selected eigenspace
  CMat plus(2, 2);
  plus << 0.5, 0.5, 0.5, 0.5;
  double resid = 0.0;
  for (const CMat& c :
       recovery_detail::stationarity_family(ch, rec.gauge, BoundMode::single_use))
    resid = std::max(resid, std::abs((plus * c).trace().real()));
  CHECK(resid < 1e-7);
  CHECK(rec.support_dim == 2);  // mixed optima exist (entangled probes)
  RecoveredQfi q = qfi_matrix_of_recovered(rec, ch, rec.gauge);
  CHECK(std::abs(q.fisher(0, 0) - eta * eta) < 1e-5);
  CHECK(std::abs(q.fisher(1, 1) - 1.0 / (1.0 - eta * eta)) < 1e-5);
  CHECK(std::abs(q.fisher(0, 1)) < 1e-5);
  CHECK(check_holevo_saturation(q.complex_fisher, 1e-6));
}

TEST_CASE("amplitude-damping probe is mixed, signalling entanglement pays") {
  ParamChannel gad = zoo_build("gad", {{"nu", 0.25}, {"gamma", 0.5}});
  RecoveryResult rec = recover_optimal_state(gad, RVec::Ones(2), BoundMode::single_use);
  REQUIRE(rec.feasible);
  HermEig e = herm_eig(rec.rho_star.mat);
  int rank = 0;
  for (int i = 0; i < e.eigenvalues.size(); ++i)
    if (e.eigenvalues(i) > 1e-8) ++rank;
  CHECK(rank == 2);
}

TEST_CASE("degenerate single-parameter rotation recovers a full-support state") {
  ParamChannel ch = single_generator_qubit();
  RecoveryResult rec = recover_optimal_state(ch, RVec::Ones(1), BoundMode::single_use);
  REQUIRE(rec.feasible);
  CHECK(rec.support_dim == 2);
  RecoveredQfi q = qfi_matrix_of_recovered(rec, ch, rec.gauge);
  CHECK(std::abs(q.fisher(0, 0) - 1.0) < 1e-5);
  CHECK(check_holevo_saturation(q.complex_fisher, 1e-9));
}

TEST_CASE("recovery in asymptotic mode verifies the saddle algebra") {
  for (auto name : {"phase_dephasing", "phase_loss"}) {
    ParamChannel ch = zoo_build(name, {{"eta", 0.5}});
    RecoveryResult rec = recover_optimal_state(ch, RVec::Ones(2), BoundMode::sql);
    REQUIRE(rec.feasible);
    CHECK(rec.constraint_residual <= 1e-7);
    RecoveredQfi q = qfi_matrix_of_recovered(rec, ch, rec.gauge);
    CHECK(std::abs(weighted_trace(q.fisher, rec.weights) - rec.bound_value) <
          1e-5 * (1.0 + rec.bound_value));
  }
}

TEST_CASE("recovered-qfi input validation") {
  ParamChannel ch = zoo_build("phase_dephasing", {{"eta", 0.5}});
  RecoveryResult rec = recover_optimal_state(ch, RVec::Ones(2), BoundMode::single_use);
  HermitianGauge bad = rec.gauge;
  bad.h[0] = CMat::Zero(3, 3);
  CHECK_THROWS_AS(qfi_matrix_of_recovered(rec, ch, bad), invalid_input);
}

TEST_CASE("incompatibility costs match the closed forms") {
  SECTION("dephased phase-visibility pair is fully compatible") {
    for (double eta : {0.3, 0.6, 0.9}) {
      ParamChannel ch = zoo_build("phase_dephasing", {{"eta", eta}});
      CHECK(std::abs(incompat_single_use(ch).cost - 1.0) < 1e-6);
      CHECK(std::abs(incompat_asymptotic(ch).cost - 1.0) < 1e-6);
    }
  }

  SECTION("lossy phase-visibility pair: single-use cost and trivial sql cost") {
    double eta = 0.5;
    ParamChannel ch = zoo_build("phase_loss", {{"eta", eta}});
    double expected =
        2.0 * std::pow((1.0 - eta) / (eta + std::sqrt(eta) -
                                      std::sqrt(2.0 * (1.0 + std::sqrt(eta)))),
                       2.0);
    IncompatReport su = incompat_single_use(ch);
    CHECK(std::abs(su.cost - expected) < 1e-5);
    CHECK(std::abs(su.cost - 1.21822) < 1e-4);
    CHECK(std::abs(incompat_asymptotic(ch).cost - 1.0) < 1e-6);
  }

  SECTION("erasure tomography: d^3 / (2(d^2+d-2)), noise-independent") {
    for (int d : {2, 3}) {
      double expected = std::pow(d, 3) / (2.0 * (d * d + d - 2));
      double first = -1.0;
      for (double eta : {0.2, 0.5, 0.8}) {
        ParamChannel ch =
            zoo_build("erasure_tomography", {{"d", double(d)}, {"eta", eta}});
        IncompatReport rep = incompat_asymptotic(ch);
        CHECK(std::abs(rep.cost - expected) < 1e-5 * expected);
        if (first < 0)
          first = rep.cost;
        else
          CHECK(std::abs(rep.cost - first) < 1e-7);
      }
    }
  }

  SECTION("lossy multiphase: p^2 / (4(p-1))") {
    for (int p : {2, 3}) {
      ParamChannel ch =
          zoo_build("lossy_multiphase", {{"p", double(p)}, {"eta", 0.5}});
      double expected = p * p / (4.0 * (p - 1));
      CHECK(std::abs(incompat_asymptotic(ch).cost - expected) < 1e-5);
    }
  }

  SECTION("cost range and rescaling invariance") {
    std::vector<ParamChannel> chans;
    chans.push_back(zoo_build("gad", {{"nu", 0.25}, {"gamma", 0.5}}));
    chans.push_back(zoo_build("phase_loss", {{"eta", 0.7}}));
    chans.push_back(zoo_build("lossy_multiphase", {{"p", 2}, {"eta", 0.4}}));
    for (const ParamChannel& ch : chans) {
      IncompatReport rep = incompat_single_use(ch);
      CHECK(rep.cost >= 1.0 - 1e-7);
      CHECK(rep.cost <= ch.num_params + 1e-7);
      // rescale the first parameter's derivative list by c > 0
      ParamChannel scaled = ch;
      for (CMat& dk : scaled.dkraus[0]) dk *= 3.7;
      CHECK(std::abs(incompat_single_use(scaled).cost - rep.cost) < 1e-8 * rep.cost);
    }
  }

  SECTION("degenerate and undersized inputs are refused") {
    ParamChannel one = single_generator_qubit();
    CHECK_THROWS_AS(incompat_single_use(one), invalid_input);
    ParamChannel dead = zoo_build("phase_dephasing", {{"eta", 0.5}});
    for (CMat& dk : dead.dkraus[0]) dk.setZero();
    CHECK_THROWS_AS(incompat_single_use(dead), invalid_input);
  }
}

TEST_CASE("naturalness diagnostic flags rotated parametrizations") {
  ParamChannel pd = zoo_build("phase_dephasing", {{"eta", 0.6}});
  CHECK(naturalness_check(pd) < 1e-5);

  ParamChannel mp = zoo_build("lossy_multiphase", {{"p", 2}, {"eta", 0.4}});
  CHECK(naturalness_check(mp) < 1e-5);

  // rotate the two phase derivatives by 30 degrees: same span, unnatural axes
  ParamChannel rotated = mp;
  const double c = std::cos(M_PI / 6), s = std::sin(M_PI / 6);
  for (std::size_t j = 0; j < mp.dkraus[0].size(); ++j) {
    rotated.dkraus[0][j] = c * mp.dkraus[0][j] - s * mp.dkraus[1][j];
    rotated.dkraus[1][j] = s * mp.dkraus[0][j] + c * mp.dkraus[1][j];
  }
  CHECK(naturalness_check(rotated) > 0.1);
}
