// Acceptance suite: runs every quantitative claim end to end and prints one
// PASS/FAIL line per criterion. Exits with the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "seqbell/bell.hpp"
#include "seqbell/filtering.hpp"
#include "seqbell/io.hpp"
#include "seqbell/lhv.hpp"
#include "seqbell/random_gen.hpp"
#include "seqbell/states.hpp"

using namespace seqbell;

namespace {

const double kRoot2 = std::sqrt(2.0);
int failures = 0;

struct Checker {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
  void within(double got, double want, double tol, const std::string& what) {
    if (std::abs(got - want) > tol && ok) {
      ok = false;
      char buf[160];
      std::snprintf(buf, sizeof(buf), "%s: got %.12g want %.12g (tol %g)",
                    what.c_str(), got, want, tol);
      detail = buf;
    }
  }
};

void run_criterion(int number, const std::string& title, double budget_seconds,
                   const std::function<void(Checker&)>& body) {
  Checker c;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.ok = false;
    c.detail = std::string("exception: ") + e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  if (budget_seconds > 0.0 && secs > budget_seconds) {
    c.ok = false;
    c.detail = "runtime " + std::to_string(secs) + "s exceeds budget";
  }
  if (!c.ok) ++failures;
  std::printf("[%s] criterion %2d: %s (%.2fs)%s%s\n", c.ok ? "PASS" : "FAIL",
              number, title.c_str(), secs, c.ok ? "" : " -- ",
              c.ok ? "" : c.detail.c_str());
  std::fflush(stdout);
}

double closed_form_ppt(double q) {
  return ((1.0 - q) - std::sqrt((1.0 - q) * (1.0 - q) + 4.0 * q * q)) / 4.0;
}

}  // namespace

int main() {
  const int workers = 0;  // auto; results are worker-count independent

  run_criterion(1, "Horodecki/CHSH exactness on singlet and random states", 1.0,
                [&](Checker& c) {
    c.within(horodecki_S(singlet()), 2.0 * kRoot2, 1e-9, "S(singlet)");
    c.within(chsh_value(singlet(), optimal_chsh_settings(singlet())),
             horodecki_S(singlet()), 1e-9, "achieved vs bound on singlet");
    Rng rng(2024);
    for (int i = 0; i < 50; ++i) {
      BipartiteState s = random_two_qubit_state(rng);
      c.within(chsh_value(s, optimal_chsh_settings(s)), horodecki_S(s), 1e-9,
               "achieved vs bound on random state " + std::to_string(i));
    }
  });

  run_criterion(2, "hidden nonlocality of the q-family: S -> 2 sqrt(1+q)", 1.0,
                [&](Checker& c) {
    for (double q : {0.1, 0.25, 0.5}) {
      auto [fa, fb] = damping_filters(1e-4, q);
      const double s_filtered =
          horodecki_S(apply_filters(state_q(q), fa, fb).filtered);
      c.within(s_filtered, 2.0 * std::sqrt(1.0 + q), 1e-6,
               "filtered S at q=" + std::to_string(q));
      const double s_raw = horodecki_S(state_q(q));
      c.within(s_raw, 2.0 * kRoot2 * q, 1e-9,
               "unfiltered S at q=" + std::to_string(q));
      c.require(s_raw <= 2.0 + 1e-9, "no violation without filtering");
    }
  });

  run_criterion(3, "genuine hidden nonlocality of rho_G: S -> 2 sqrt(1+q/4)",
                1.0, [&](Checker& c) {
    for (double q : {0.1, 0.25, 0.5}) {
      auto [fa, fb] = damping_filters(1e-4, q);
      const double s =
          horodecki_S(apply_filters(state_rho_G(q), fa, fb).filtered);
      c.within(s, 2.0 * std::sqrt(1.0 + q / 4.0), 1e-6,
               "filtered rho_G at q=" + std::to_string(q));
    }
  });

  run_criterion(4, "maximal hidden nonlocality of rho_GM", 0.0, [&](Checker& c) {
    LocalFilter pi = qubit_subspace_filter(3);
    for (double q : {0.1, 0.5}) {
      FilterOutcome out = apply_filters(state_rho_GM(q), pi, pi);
      c.require(trace_distance(out.filtered.rho, singlet(3, 3).rho) <= 1e-12,
                "filtered state is the singlet at q=" + std::to_string(q));
      c.within(out.success_prob, q / 9.0, 1e-12,
               "success probability q/9 at q=" + std::to_string(q));
      c.within(horodecki_S(restrict_to_qubits(out.filtered)), 2.0 * kRoot2,
               1e-9, "S after filtering at q=" + std::to_string(q));
    }
  });

  run_criterion(5, "construction identities of the POVM-locality map", 0.0,
                [&](Checker& c) {
    for (double q : {0.1, 0.25, 0.5, 1.0}) {
      c.require(max_abs(protocol2_map(state_q(q), basis_projector(0, 2),
                                      basis_projector(0, 2)).rho -
                        state_rho_G(q).rho) <= 1e-12,
                "rho_G closed form at q=" + std::to_string(q));
      c.require(max_abs(protocol2_map(erasure_state(q), basis_projector(2, 3),
                                      basis_projector(2, 3)).rho -
                        state_rho_GM(q).rho) <= 1e-12,
                "rho_GM closed form at q=" + std::to_string(q));
    }
    c.require(max_abs(protocol2_map_one_sided(erasure_state(0.5),
                                              basis_projector(2, 3)).rho -
                      erasure_state(1.0 / 6.0).rho) <= 1e-12,
              "one-sided map sends erasure(1/2) to erasure(1/6)");
    Rng rng(31337);
    for (Eigen::Index d : {Eigen::Index(2), Eigen::Index(3)}) {
      for (int i = 0; i < 50; ++i) {
        BipartiteState rho0{d, d, random_density(d * d, rng)};
        Matrix sa = random_density(d, rng), sb = random_density(d, rng);
        BipartiteState out = protocol2_map(rho0, sa, sb);
        const double dd = static_cast<double>(d);
        c.require(max_abs(partial_trace(out, Party::A) -
                          (partial_trace(rho0, Party::A) / dd +
                           ((dd - 1.0) / dd) * sa)) <= 1e-10,
                  "marginal law (A side)");
        c.require(max_abs(partial_trace(out, Party::B) -
                          (partial_trace(rho0, Party::B) / dd +
                           ((dd - 1.0) / dd) * sb)) <= 1e-10,
                  "marginal law (B side)");
      }
    }
  });

  run_criterion(6, "entanglement certification via the partial transpose", 0.0,
                [&](Checker& c) {
    for (int k = 1; k <= 20; ++k) {
      const double q = 0.05 * k;
      c.require(min_eig_partial_transpose(state_q(q)) < 0.0,
                "NPT at q=" + std::to_string(q));
    }
    c.within(min_eig_partial_transpose(state_q(0.5)), closed_form_ppt(0.5),
             1e-9, "closed-form eigenvalue at q=1/2");
    c.within(closed_form_ppt(0.5), (1.0 - std::sqrt(5.0)) / 8.0, 1e-15,
             "oracle self-check");
  });

  run_criterion(7, "protocol1 statistical equivalence (10^6 rounds x 20 pairs)",
                30.0, [&](Checker& c) {
    for (double q : {0.5, 0.3}) {
      auto settings = random_settings(LhvModel::protocol1, 20, 424242);
      SimulationReport rep = run_lhv_experiment(LhvModel::protocol1, q,
                                                settings, 1000000, 7, workers);
      c.require(rep.max_z <= 5.0,
                "max z = " + std::to_string(rep.max_z) +
                    " at q=" + std::to_string(q));
      c.require(rep.rates.at("acceptance_z") <= 5.0, "acceptance rate");
    }
  });

  run_criterion(8, "erasure-model statistical equivalence (10^6 x 20)", 30.0,
                [&](Checker& c) {
    auto settings = random_settings(LhvModel::erasure, 20, 677889);
    SimulationReport rep = run_lhv_experiment(LhvModel::erasure, 0.5, settings,
                                              1000000, 11, workers);
    c.require(rep.max_z <= 5.0, "max z = " + std::to_string(rep.max_z));
    c.require(rep.rates.at("acceptance_z") <= 5.0, "acceptance rate");
  });

  run_criterion(9, "protocol2 POVM equivalence on rho_G and rho_GM", 120.0,
                [&](Checker& c) {
    {
      auto settings = random_settings(LhvModel::protocol2_rho_G, 10, 90001);
      SimulationReport rep = run_lhv_experiment(LhvModel::protocol2_rho_G, 0.5,
                                                settings, 1000000, 17, workers);
      c.require(rep.max_z <= 5.0, "rho_G max z = " + std::to_string(rep.max_z));
      c.require(rep.rates.at("step_iii_z_alice") <= 5.0, "rho_G step-iii rate A");
      c.require(rep.rates.at("step_iii_z_bob") <= 5.0, "rho_G step-iii rate B");
    }
    {
      auto settings = random_settings(LhvModel::protocol2_rho_GM, 10, 90002);
      SimulationReport rep = run_lhv_experiment(LhvModel::protocol2_rho_GM, 0.5,
                                                settings, 1000000, 19, workers);
      c.require(rep.max_z <= 5.0, "rho_GM max z = " + std::to_string(rep.max_z));
      c.require(rep.rates.at("step_iii_z_alice") <= 5.0, "rho_GM step-iii rate A");
      c.require(rep.rates.at("step_iii_z_bob") <= 5.0, "rho_GM step-iii rate B");
    }
  });

  run_criterion(10, "sphere quadrature reproduces -x.y", 0.0, [&](Checker& c) {
    Rng rng(5150);
    for (int i = 0; i < 20; ++i) {
      const BlochVector x = sample_sphere(rng), y = sample_sphere(rng);
      c.within(sphere_quadrature_correlator(x, y), -x.dot(y), 1e-6,
               "pair " + std::to_string(i));
    }
  });

  run_criterion(11, "sequential Monte Carlo on rho_GM (10^7 rounds)", 120.0,
                [&](Checker& c) {
    LocalFilter pi = qubit_subspace_filter(3);
    ChshSettings settings = optimal_chsh_settings(singlet());
    SequentialMcReport rep = sequential_mc(state_rho_GM(0.5), pi, pi, settings,
                                           10000000, 23, workers);
    c.within(rep.target_success_prob, 0.5 / 9.0, 1e-12, "target rate is q/9");
    c.require(rep.success_z <= 5.0,
              "success-rate z = " + std::to_string(rep.success_z));
    c.within(rep.target_S, 2.0 * kRoot2, 1e-9, "target S is 2 sqrt 2");
    c.require(rep.S_z <= 5.0, "S z = " + std::to_string(rep.S_z));
  });

  run_criterion(12, "seeded reports are byte-identical for any worker count",
                0.0, [&](Checker& c) {
    struct Config {
      LhvModel model;
      int nsettings;
      long long rounds;
    };
    for (const Config& cfg :
         {Config{LhvModel::protocol1, 3, 100000},
          Config{LhvModel::erasure, 3, 100000},
          Config{LhvModel::protocol2_rho_G, 2, 50000},
          Config{LhvModel::protocol2_rho_GM, 2, 50000}}) {
      auto settings = random_settings(cfg.model, cfg.nsettings, 808);
      std::string first;
      for (int w : {1, 2, 5}) {
        SimulationReport rep = run_lhv_experiment(cfg.model, 0.5, settings,
                                                  cfg.rounds, 313, w);
        const std::string text = report_to_json_text(rep);
        if (first.empty()) first = text;
        c.require(text == first,
                  lhv_model_to_string(cfg.model) + " differs at workers=" +
                      std::to_string(w));
      }
    }
    LocalFilter pi = qubit_subspace_filter(3);
    ChshSettings settings = optimal_chsh_settings(singlet());
    std::string first;
    for (int w : {1, 2, 5}) {
      SequentialMcReport rep =
          sequential_mc(state_rho_GM(0.5), pi, pi, settings, 200000, 99, w);
      const std::string text = sequential_report_to_json_text(rep);
      if (first.empty()) first = text;
      c.require(text == first,
                "sequential_mc differs at workers=" + std::to_string(w));
    }
  });

  if (failures == 0) {
    std::printf("all acceptance criteria passed\n");
  } else {
    std::printf("%d acceptance criteria FAILED\n", failures);
  }
  return failures;
}
