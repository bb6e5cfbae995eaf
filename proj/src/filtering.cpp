#include "seqbell/filtering.hpp"

#include <cmath>

#include "seqbell/chunked.hpp"

namespace seqbell {

LocalFilter make_filter(Matrix f) {
  if (f.rows() != f.cols())
    throw DimensionMismatch("make_filter: filter must be square");
  if (!is_hermitian(f, 1e-10))
    throw InvalidParameter("make_filter: filter must be positive (Hermitian)");
  Eigen::SelfAdjointEigenSolver<Matrix> es(f, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kPsdTol)
    throw InvalidParameter("make_filter: filter not positive semidefinite");
  if (es.eigenvalues().maxCoeff() > 1.0 + 1e-12)
    throw InvalidParameter("make_filter: operator norm exceeds 1");
  return LocalFilter{std::move(f)};
}

FilterOutcome apply_filters(const BipartiteState& s, const LocalFilter& fa,
                            const LocalFilter& fb) {
  if (fa.f.rows() != s.dim_a || fb.f.rows() != s.dim_b)
    throw DimensionMismatch("apply_filters: filter dimension mismatch");
  Matrix k = tensor(fa.f, fb.f);
  Matrix out = k * s.rho * k.adjoint();
  const double n = out.trace().real();
  if (n <= 1e-300)
    throw ZeroSuccessProbability("apply_filters: success probability vanishes");
  return FilterOutcome{BipartiteState{s.dim_a, s.dim_b, out / n}, n};
}

std::pair<LocalFilter, LocalFilter> damping_filters(double eps, double q) {
  if (!(eps > 0.0 && eps <= 1.0))
    throw InvalidParameter("damping_filters: eps must lie in (0,1]");
  if (!(q > 0.0 && q <= 1.0))
    throw InvalidParameter("damping_filters: q must lie in (0,1]");
  const double delta = eps / std::sqrt(q);
  if (delta > 1.0 + 1e-15)
    throw InvalidParameter("damping_filters: eps/sqrt(q) exceeds 1");
  Matrix fa = Matrix::Zero(2, 2);
  fa(0, 0) = eps;
  fa(1, 1) = 1.0;
  Matrix fb = Matrix::Zero(2, 2);
  fb(0, 0) = std::min(delta, 1.0);
  fb(1, 1) = 1.0;
  return {LocalFilter{std::move(fa)}, LocalFilter{std::move(fb)}};
}

LocalFilter qubit_subspace_filter(Eigen::Index d) {
  if (d < 3)
    throw InvalidParameter("qubit_subspace_filter: dimension must be >= 3");
  Matrix f = Matrix::Zero(d, d);
  f(0, 0) = 1.0;
  f(1, 1) = 1.0;
  return LocalFilter{std::move(f)};
}

std::vector<FilterScanRow> filter_scan(StateFamilyTag family, double q,
                                       const std::vector<double>& eps_list) {
  if (family != StateFamilyTag::state_q && family != StateFamilyTag::rho_G)
    throw InvalidParameter("filter_scan: family must be state_q or rho_G");
  BipartiteState s = family_state(StateFamily{family, q});
  std::vector<FilterScanRow> rows;
  rows.reserve(eps_list.size());
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    const double eps = eps_list[i];
    auto [fa, fb] = damping_filters(eps, q);
    FilterOutcome out = apply_filters(s, fa, fb);
    FilterScanRow row;
    row.eps = eps;
    row.S = horodecki_S(out.filtered);
    row.N = out.success_prob;
    if (i == 0) {
      row.S_extrapolated = row.S;
    } else {
      const double e1 = rows[i - 1].eps * rows[i - 1].eps;
      const double e2 = eps * eps;
      row.S_extrapolated = std::abs(e1 - e2) < 1e-300
                               ? row.S
                               : (row.S * e1 - rows[i - 1].S * e2) / (e1 - e2);
    }
    rows.push_back(row);
  }
  return rows;
}

namespace {

struct McCounts {
  long long ss = 0, sf = 0, fs = 0, ff = 0;
  // counts[pair][a-index][b-index], pair order (a1,b1),(a1,b2),(a2,b1),(a2,b2)
  long long counts[4][2][2] = {};

  McCounts& operator+=(const McCounts& o) {
    ss += o.ss;
    sf += o.sf;
    fs += o.fs;
    ff += o.ff;
    for (int k = 0; k < 4; ++k)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) counts[k][a][b] += o.counts[k][a][b];
    return *this;
  }
};

double binomial_z(double emp, double target, long long n) {
  if (n <= 0) return 0.0;
  const double var = std::max(target * (1.0 - target), 1e-12);
  return std::abs(emp - target) / std::sqrt(var / static_cast<double>(n));
}

double correlator_z(double emp, double target, long long n) {
  if (n <= 0) return 0.0;
  const double var = std::max(1.0 - target * target, 1e-12);
  return std::abs(emp - target) / std::sqrt(var / static_cast<double>(n));
}

}  // namespace

SequentialMcReport sequential_mc(const BipartiteState& s, const LocalFilter& fa,
                                 const LocalFilter& fb, const ChshSettings& c,
                                 long long rounds, std::uint64_t seed,
                                 int workers) {
  if (rounds < 1) throw InvalidParameter("sequential_mc: rounds must be >= 1");
  make_filter(fa.f);  // the instrument {F^dag F, I - F^dag F} needs ||F|| <= 1
  make_filter(fb.f);
  // Instrument success effects and the four filter-outcome probabilities.
  Matrix ea = fa.f.adjoint() * fa.f;
  Matrix eb = fb.f.adjoint() * fb.f;
  Matrix ia = identity(s.dim_a), ib = identity(s.dim_b);
  const double p_ss = (tensor(ea, eb) * s.rho).trace().real();
  const double p_sf = (tensor(ea, ib - eb) * s.rho).trace().real();
  const double p_fs = (tensor(ia - ea, eb) * s.rho).trace().real();

  FilterOutcome filtered = apply_filters(s, fa, fb);
  BipartiteState bell_state = filtered.filtered;
  if (bell_state.dim_a != 2 || bell_state.dim_b != 2) {
    // The CHSH stage needs an effective two-qubit state; only filters that
    // map into the |0>,|1> x |0>,|1> block qualify.
    BipartiteState restricted = restrict_to_qubits(bell_state);
    Matrix embedded = Matrix::Zero(bell_state.dim(), bell_state.dim());
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int ap = 0; ap < 2; ++ap)
          for (int bp = 0; bp < 2; ++bp)
            embedded(a * bell_state.dim_b + b, ap * bell_state.dim_b + bp) =
                restricted.rho(a * 2 + b, ap * 2 + bp);
    if (max_abs(bell_state.rho - embedded) > 1e-9)
      throw DimensionMismatch(
          "sequential_mc: filtered state leaves the qubit subspace");
    bell_state = std::move(restricted);
  }

  const BlochVector alice[2] = {c.a1, c.a2};
  const BlochVector bob[2] = {c.b1, c.b2};
  double table[4][2][2];
  double target_corr[4];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      JointDistribution d = born_joint(bell_state, projectors_from_bloch(alice[i]),
                                       projectors_from_bloch(bob[j]));
      const int k = i * 2 + j;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) table[k][a][b] = d.p(a, b);
      target_corr[k] = correlator_of(d);
    }

  McCounts total = run_chunked<McCounts>(
      rounds, seed, workers, [&](McCounts& acc, Rng& rng) {
        const double u = rng.uniform();
        if (u < p_ss) {
          const int k = static_cast<int>(rng.next_u64() & 3);
          const double v = rng.uniform();
          double cum = 0.0;
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
              cum += table[k][a][b];
              if (v < cum || (a == 1 && b == 1)) {
                ++acc.counts[k][a][b];
                ++acc.ss;
                return;
              }
            }
        } else if (u < p_ss + p_sf) {
          ++acc.sf;
        } else if (u < p_ss + p_sf + p_fs) {
          ++acc.fs;
        } else {
          ++acc.ff;
        }
      });

  if (total.ss == 0)
    throw ZeroSuccessProbability("sequential_mc: no round passed both filters");

  SequentialMcReport rep;
  rep.seed = seed;
  rep.rounds = rounds;
  rep.success_count = total.ss;
  rep.success_rate = static_cast<double>(total.ss) / static_cast<double>(rounds);
  rep.target_success_prob = filtered.success_prob;
  rep.success_z = binomial_z(rep.success_rate, rep.target_success_prob, rounds);
  rep.max_z = rep.success_z;

  double var_S = 0.0;
  for (int k = 0; k < 4; ++k) {
    auto& p = rep.pairs[k];
    p.counts[0][0] = total.counts[k][0][0];
    p.counts[0][1] = total.counts[k][0][1];
    p.counts[1][0] = total.counts[k][1][0];
    p.counts[1][1] = total.counts[k][1][1];
    p.n = p.counts[0][0] + p.counts[0][1] + p.counts[1][0] + p.counts[1][1];
    p.target_correlator = target_corr[k];
    if (p.n > 0) {
      p.emp_correlator =
          static_cast<double>(p.counts[0][0] - p.counts[0][1] - p.counts[1][0] +
                              p.counts[1][1]) /
          static_cast<double>(p.n);
      p.z = correlator_z(p.emp_correlator, p.target_correlator, p.n);
      var_S += std::max(1.0 - p.target_correlator * p.target_correlator, 1e-12) /
               static_cast<double>(p.n);
    }
    rep.max_z = std::max(rep.max_z, p.z);
  }
  rep.empirical_S = rep.pairs[0].emp_correlator + rep.pairs[1].emp_correlator +
                    rep.pairs[2].emp_correlator - rep.pairs[3].emp_correlator;
  rep.target_S = target_corr[0] + target_corr[1] + target_corr[2] - target_corr[3];
  rep.S_z = var_S > 0.0 ? std::abs(rep.empirical_S - rep.target_S) / std::sqrt(var_S)
                        : 0.0;
  rep.max_z = std::max(rep.max_z, rep.S_z);
  return rep;
}

}  // namespace seqbell
