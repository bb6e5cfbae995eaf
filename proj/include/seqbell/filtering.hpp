#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "seqbell/bell.hpp"
#include "seqbell/states.hpp"

namespace seqbell {

/// Positive local operator with largest eigenvalue <= 1, so that
/// {F^dag F, I - F^dag F} is a valid two-outcome instrument.
struct LocalFilter {
  Matrix f;
};

/// Checked constructor (PSD within 1e-10, operator norm <= 1 + 1e-12).
LocalFilter make_filter(Matrix f);

struct FilterOutcome {
  BipartiteState filtered;
  double success_prob = 0.0;  // N = Tr[(F_A (x) F_B) rho (F_A (x) F_B)^dag]
};

/// rho -> (F_A (x) F_B) rho (F_A (x) F_B)^dag / N.
FilterOutcome apply_filters(const BipartiteState& s, const LocalFilter& fa,
                            const LocalFilter& fb);

/// F_A = eps|0><0| + |1><1|, F_B = (eps/sqrt(q))|0><0| + |1><1|.
/// These damp the |0> component and, as eps -> 0, expose the CHSH violation
/// hidden in the q-family states. Requires eps/sqrt(q) <= 1.
std::pair<LocalFilter, LocalFilter> damping_filters(double eps, double q);

/// Projector onto span{|0>, |1>} in dimension d >= 3.
LocalFilter qubit_subspace_filter(Eigen::Index d);

struct FilterScanRow {
  double eps = 0.0;
  double S = 0.0;               // horodecki_S of the filtered state
  double N = 0.0;               // filter success probability
  double S_extrapolated = 0.0;  // two-point Richardson in eps^2 (raw S on row 0)
};

/// Scans the damping filters over eps for state_q or rho_G at fixed q.
std::vector<FilterScanRow> filter_scan(StateFamilyTag family, double q,
                                       const std::vector<double>& eps_list);

/// Outcome counts and statistics of the simulated sequential experiment.
/// All raw tallies are integers so reports are identical for any worker count.
struct SequentialMcReport {
  std::uint64_t seed = 0;
  long long rounds = 0;
  long long success_count = 0;
  double success_rate = 0.0;
  double target_success_prob = 0.0;
  double success_z = 0.0;
  struct PairStats {
    long long n = 0;
    std::array<std::array<long long, 2>, 2> counts{};  // [a-index][b-index], 0 <-> +1
    double emp_correlator = 0.0;
    double target_correlator = 0.0;
    double z = 0.0;
  };
  std::array<PairStats, 4> pairs{};  // order (a1,b1), (a1,b2), (a2,b1), (a2,b2)
  double empirical_S = 0.0;
  double target_S = 0.0;
  double S_z = 0.0;
  double max_z = 0.0;
};

/// Simulates the full sequential run: per round each party applies the
/// two-outcome filter instrument (success effect F^dag F); rounds where either
/// filter fails are discarded; surviving rounds measure a uniformly chosen
/// CHSH setting pair on the filtered state via Born sampling.
SequentialMcReport sequential_mc(const BipartiteState& s, const LocalFilter& fa,
                                 const LocalFilter& fb, const ChshSettings& c,
                                 long long rounds, std::uint64_t seed,
                                 int workers = 1);

}  // namespace seqbell
