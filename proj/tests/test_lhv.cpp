#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "seqbell/io.hpp"
#include "seqbell/lhv.hpp"
#include "seqbell/random_gen.hpp"
#include "seqbell/states.hpp"

using namespace seqbell;

TEST_CASE("sample_sphere is uniform") {
  Rng rng(1);
  const int n = 200000;
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  double zz = 0.0;
  for (int i = 0; i < n; ++i) {
    BlochVector v = sample_sphere(rng);
    CHECK(std::abs(v.norm() - 1.0) < 1e-12);
    mean += v;
    zz += v.z() * v.z();
  }
  mean /= n;
  CHECK(mean.norm() < 5e-3 * std::sqrt(3.0));
  CHECK(std::abs(zz / n - 1.0 / 3.0) < 0.005);
}

TEST_CASE("accepted lambdas have the cosine-weighted density") {
  // conditional on acceptance, u = x.lambda should follow density |u|
  Rng rng(6);
  const BlochVector x = sample_sphere(rng);
  const int kBins = 20;
  const int n = 300000;
  std::vector<long long> obs(kBins, 0);
  long long accepted = 0;
  for (int i = 0; i < n; ++i) {
    BlochVector lam = sample_sphere(rng);
    const double u = x.dot(lam);
    if (rng.bernoulli(std::abs(u))) {
      ++accepted;
      int bin = static_cast<int>((u + 1.0) / 2.0 * kBins);
      if (bin == kBins) bin = kBins - 1;
      ++obs[bin];
    }
  }
  double chi2 = 0.0;
  for (int b = 0; b < kBins; ++b) {
    const double lo = -1.0 + 2.0 * b / kBins, hi = lo + 2.0 / kBins;
    // integral of |u|/1 du over the bin, normalized over [-1,1]
    const double mass = (std::abs(hi) * hi - std::abs(lo) * lo) / 2.0;
    const double expect = accepted * mass;
    chi2 += (obs[b] - expect) * (obs[b] - expect) / expect;
  }
  const double dof = kBins - 1;
  CHECK((chi2 - dof) / std::sqrt(2.0 * dof) <= 5.0);
  // acceptance probability averages to 1/2
  CHECK(std::abs(static_cast<double>(accepted) / n - 0.5) < 5e-3);
}

TEST_CASE("protocol1 statistics at q = 1/2") {
  Rng rng(8);
  const int n = 200000;
  for (int s = 0; s < 4; ++s) {
    const BlochVector x = sample_sphere(rng), y = sample_sphere(rng);
    Rng run(substream(9, s));
    long long ab = 0, a_sum = 0, b_sum = 0, acc = 0;
    for (int i = 0; i < n; ++i) {
      Protocol1Outcome o = protocol1_round(x, y, 0.5, run);
      ab += o.a * o.b;
      a_sum += o.a;
      b_sum += o.b;
      if (o.accepted) ++acc;
    }
    const double band = 5.0 / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(ab / double(n) + 0.5 * x.dot(y)) < band);
    CHECK(std::abs(a_sum / double(n) - 0.5 * x.z()) < band);
    CHECK(std::abs(b_sum / double(n)) < band);
    CHECK(std::abs(acc / double(n) - 0.5) < band);
  }
}

TEST_CASE("protocol1 endpoints and domain") {
  Rng rng(10);
  const BlochVector x = sample_sphere(rng), y = sample_sphere(rng);
  long long ab = 0, a_sum = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    Protocol1Outcome o = protocol1_round(x, y, 0.0, rng);
    ab += o.a * o.b;
    a_sum += o.a;
  }
  const double band = 5.0 / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(ab / double(n)) < band);
  CHECK(std::abs(a_sum / double(n) - x.z()) < band);

  CHECK_THROWS_AS(protocol1_round(x, y, 0.7, rng), InvalidParameter);
}

TEST_CASE("sphere quadrature recovers the inner product") {
  CHECK(std::abs(sphere_quadrature_correlator(BlochVector::UnitZ(),
                                              BlochVector::UnitZ()) +
                 1.0) < 1e-6);
  CHECK(std::abs(sphere_quadrature_correlator(BlochVector::UnitZ(),
                                              BlochVector::UnitX())) < 1e-6);
  const BlochVector tilted(std::sin(std::numbers::pi / 3.0), 0.0,
                           std::cos(std::numbers::pi / 3.0));
  CHECK(std::abs(sphere_quadrature_correlator(BlochVector::UnitZ(), tilted) +
                 0.5) < 1e-6);

  Rng rng(12);
  for (int i = 0; i < 20; ++i) {
    const BlochVector x = sample_sphere(rng), y = sample_sphere(rng);
    CHECK(std::abs(sphere_quadrature_correlator(x, y) + x.dot(y)) < 1e-6);
  }
}

TEST_CASE("decompose_observable") {
  Matrix o = Matrix::Zero(3, 3);
  o.topLeftCorner(2, 2) = pauli_z();
  o(2, 2) = 1.0;
  ObservableDecomposition d = decompose_observable(o);
  CHECK(d.c0 == doctest::Approx(1.0));
  CHECK(d.c1 == doctest::Approx(0.0));
  CHECK(d.axis.isApprox(BlochVector::UnitZ()));
  CHECK(d.tr_r == doctest::Approx(1.0));

  ObservableDecomposition id3 = decompose_observable(identity(3));
  CHECK(id3.c0 == doctest::Approx(0.0));
  CHECK(id3.c1 == doctest::Approx(1.0));
  CHECK(id3.tr_r == doctest::Approx(1.0));

  Rng rng(18);
  for (int i = 0; i < 100; ++i) {
    Matrix obs = random_pm_observable(3, rng);
    ObservableDecomposition dec = decompose_observable(obs);
    // reconstruction of the qubit block
    Matrix block = dec.c0 * bloch_operator(dec.axis) +
                   dec.c1 * identity(2);
    CHECK(max_abs(obs.topLeftCorner(2, 2) - block) < 1e-10);
    CHECK(std::abs(dec.c1) + dec.c0 <= 1.0 + 1e-9);
    CHECK(std::abs(dec.tr_r) <= 1.0 + 1e-9);
  }

  // Pauli-coefficient oracle on a random rank-one +-1 observable
  for (int i = 0; i < 20; ++i) {
    Vector v = random_ginibre(3, 1, rng).col(0);
    v /= v.norm();
    Matrix obs = 2.0 * (v * v.adjoint()) - identity(3);
    ObservableDecomposition dec = decompose_observable(obs);
    Matrix block = obs.topLeftCorner(2, 2);
    const double vx = 0.5 * (block * pauli_x()).trace().real();
    const double vy = 0.5 * (block * pauli_y()).trace().real();
    const double vz = 0.5 * (block * pauli_z()).trace().real();
    CHECK(dec.c0 ==
          doctest::Approx(std::sqrt(vx * vx + vy * vy + vz * vz)).epsilon(1e-10));
    CHECK(dec.c1 == doctest::Approx(0.5 * block.trace().real()).epsilon(1e-10));
  }

  // c1 goes negative for valid +-1 observables, e.g. -I_2 on the qubit block
  ObservableDecomposition flag =
      decompose_observable(2.0 * basis_projector(2, 3) - identity(3));
  CHECK(flag.c1 == doctest::Approx(-1.0));
  CHECK(flag.c0 == doctest::Approx(0.0));
  CHECK(flag.tr_r == doctest::Approx(1.0));

  // strict mode rejects non-dichotomic observables, relaxed accepts them
  Matrix soft = 0.5 * identity(3);
  CHECK_THROWS_AS(decompose_observable(soft), NotDichotomic);
  CHECK_NOTHROW(decompose_observable(soft, DichotomicCheck::relaxed));
  Matrix wild = 3.0 * identity(3);
  CHECK_THROWS_AS(decompose_observable(wild, DichotomicCheck::relaxed),
                  NotDichotomic);
  Matrix nh = Matrix::Zero(3, 3);
  nh(0, 1) = 1.0;
  CHECK_THROWS_AS(decompose_observable(nh), NotHermitian);
}

TEST_CASE("erasure model statistics") {
  // Alice: sigma_z on the qubit block, +1 on the flag; Bob: z-axis qubit
  Matrix oa = Matrix::Zero(3, 3);
  oa.topLeftCorner(2, 2) = pauli_z();
  oa(2, 2) = 1.0;
  Matrix ob = Matrix::Zero(3, 3);
  ob.topLeftCorner(2, 2) = pauli_z();
  ob(2, 2) = 1.0;
  ObservableDecomposition da = decompose_observable(oa);
  ObservableDecomposition db = decompose_observable(ob, DichotomicCheck::relaxed);

  Rng rng(31);
  const int n = 300000;
  long long ab = 0, a_sum = 0, b_sum = 0;
  for (int i = 0; i < n; ++i) {
    ErasureOutcome o = erasure_round(da, db, 0.5, rng);
    ab += o.a * o.b;
    a_sum += o.a;
    b_sum += o.b;
  }
  const double band = 5.0 / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(ab / double(n) + 0.5) < band);     // -(x.y)/2, x = y = z
  CHECK(std::abs(a_sum / double(n) - 0.5) < band);  // (c1 + tr_r)/2
  CHECK(std::abs(b_sum / double(n)) < band);

  // degenerate observable: a = +1 always
  ObservableDecomposition did = decompose_observable(identity(3));
  for (int i = 0; i < 100; ++i)
    CHECK(erasure_round(did, db, 0.5, rng).a == 1);
}

TEST_CASE("refine_povm") {
  Povm z = projectors_from_bloch(BlochVector::UnitZ());
  auto refined = refine_povm(z);
  REQUIRE(refined.size() == 2);
  CHECK(refined[0].weight == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(refined[1].weight == doctest::Approx(1.0).epsilon(1e-12));

  // trine POVM: three rank-one elements with weight 2/3
  Povm trine;
  for (int k = 0; k < 3; ++k) {
    const double th = 2.0 * std::numbers::pi * k / 3.0;
    BlochVector dir(std::sin(th), 0.0, std::cos(th));
    trine.elements.push_back((2.0 / 3.0) * 0.5 *
                             (identity(2) + bloch_operator(dir)));
  }
  auto tr = refine_povm(trine);
  REQUIRE(tr.size() == 3);
  for (const auto& e : tr) {
    CHECK(e.weight == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(max_abs(e.projector * e.projector - e.projector) < 1e-12);
  }

  // coarse-graining the refinement reproduces the original probabilities
  Rng rng(77);
  Povm qutrit = random_povm(3, 4, rng);
  auto rf = refine_povm(qutrit);
  double total = 0.0;
  for (const auto& e : rf) total += e.weight;
  CHECK(total == doctest::Approx(3.0).epsilon(1e-9));
  for (int i = 0; i < 20; ++i) {
    Matrix rho = random_density(3, rng);
    for (std::size_t k = 0; k < qutrit.elements.size(); ++k) {
      double sum = 0.0;
      for (const auto& e : rf)
        if (e.parent == static_cast<int>(k))
          sum += e.weight * (e.projector * rho).trace().real();
      CHECK(sum == doctest::Approx((qutrit.elements[k] * rho).trace().real())
                       .epsilon(1e-10));
    }
  }

  // degenerate eigenvalues: any orthonormal eigenbasis must coarse-grain back
  Povm coin;
  coin.elements.push_back(0.5 * identity(2));
  coin.elements.push_back(0.5 * identity(2));
  auto cf = refine_povm(coin);
  REQUIRE(cf.size() == 4);
  for (const auto& e : cf) CHECK(e.weight == doctest::Approx(0.5));
  for (int i = 0; i < 5; ++i) {
    Matrix rho = random_density(2, rng);
    for (int k = 0; k < 2; ++k) {
      double sum = 0.0;
      for (const auto& e : cf)
        if (e.parent == k) sum += e.weight * (e.projector * rho).trace().real();
      CHECK(sum == doctest::Approx(0.5).epsilon(1e-10));
    }
  }

  Povm invalid;
  invalid.elements.push_back(identity(2));
  invalid.elements.push_back(0.5 * identity(2));
  CHECK_THROWS_AS(refine_povm(invalid), InvalidPovm);
}

TEST_CASE("protocol2 round structure") {
  Rng rng(41);
  Povm pa = random_rank_one_povm(2, 4, rng);
  Povm pb = random_rank_one_povm(2, 3, rng);
  Matrix sigma = basis_projector(0, 2);
  Protocol2Session session(pa, pb, BaseModel::state_q, 0.5, sigma, sigma);
  long long direct_a = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    Protocol2Outcome o = session.round(rng);
    CHECK(o.a >= 0);
    CHECK(o.a < 4);
    CHECK(o.b >= 0);
    CHECK(o.b < 3);
    if (o.alice_direct) ++direct_a;
  }
  // step-(iii) rate is 1/d for every POVM
  CHECK(std::abs(direct_a / double(n) - 0.5) <
        5.0 * std::sqrt(0.25 / n));
}

TEST_CASE("lhv harness matches Born statistics") {
  for (LhvModel m : {LhvModel::protocol1, LhvModel::erasure}) {
    auto settings = random_settings(m, 5, 1234);
    SimulationReport rep = run_lhv_experiment(m, 0.5, settings, 100000, 99, 2);
    CHECK(rep.max_z <= 5.0);
    CHECK(rep.rates.at("acceptance_z") <= 5.0);
  }
  for (LhvModel m : {LhvModel::protocol2_rho_G, LhvModel::protocol2_rho_GM}) {
    auto settings = random_settings(m, 3, 555);
    SimulationReport rep = run_lhv_experiment(m, 0.5, settings, 100000, 7, 2);
    CHECK(rep.max_z <= 5.0);
    CHECK(rep.rates.at("step_iii_z_alice") <= 5.0);
    CHECK(rep.rates.at("step_iii_z_bob") <= 5.0);
  }
}

TEST_CASE("lhv harness also covers q below one half") {
  auto settings = random_settings(LhvModel::protocol1, 5, 77);
  SimulationReport rep =
      run_lhv_experiment(LhvModel::protocol1, 0.3, settings, 100000, 3, 2);
  CHECK(rep.max_z <= 5.0);
  // core branch engages with probability 2q
  CHECK(rep.rates.at("core_z") <= 5.0);
  CHECK(std::abs(rep.rates.at("core_rate") - 0.6) < 0.01);
}

TEST_CASE("harness is deterministic and worker-count independent") {
  auto settings = random_settings(LhvModel::protocol2_rho_GM, 2, 11);
  SimulationReport r1 = run_lhv_experiment(LhvModel::protocol2_rho_GM, 0.5,
                                           settings, 50000, 13, 1);
  SimulationReport r3 = run_lhv_experiment(LhvModel::protocol2_rho_GM, 0.5,
                                           settings, 50000, 13, 3);
  CHECK(report_to_json_text(r1) == report_to_json_text(r3));

  SimulationReport again = run_lhv_experiment(LhvModel::protocol2_rho_GM, 0.5,
                                              settings, 50000, 13, 2);
  CHECK(report_to_json_text(r1) == report_to_json_text(again));
}

TEST_CASE("no signaling: Alice's marginal ignores Bob's setting") {
  Rng rng(61);
  const BlochVector x = sample_sphere(rng);
  std::vector<SettingPair> settings;
  settings.push_back(BlochPair{x, sample_sphere(rng)});
  settings.push_back(BlochPair{x, sample_sphere(rng)});
  SimulationReport rep =
      run_lhv_experiment(LhvModel::protocol1, 0.5, settings, 200000, 21, 2);
  const double m1 = rep.per_setting[0].emp_marginal_a;
  const double m2 = rep.per_setting[1].emp_marginal_a;
  CHECK(std::abs(m1 - m2) <= 5.0 * std::sqrt(2.0 / 200000.0));
}

TEST_CASE("harness input validation") {
  auto settings = random_settings(LhvModel::protocol1, 2, 5);
  CHECK_THROWS_AS(
      run_lhv_experiment(LhvModel::protocol1, 0.5, settings, 100, 1, 1),
      InvalidParameter);
  CHECK_THROWS_AS(
      run_lhv_experiment(LhvModel::protocol1, 0.9, settings, 100000, 1, 1),
      InvalidParameter);
  CHECK_THROWS_AS(run_lhv_experiment(LhvModel::protocol1, 0.5, {}, 100000, 1, 1),
                  InvalidParameter);
}
