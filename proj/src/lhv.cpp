#include "seqbell/lhv.hpp"

#include <cmath>
#include <numbers>

#include "seqbell/chunked.hpp"
#include "seqbell/states.hpp"

namespace seqbell {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_unit(const BlochVector& v, const char* who) {
  if (std::abs(v.norm() - 1.0) > 1e-12)
    throw NonUnitVector(std::string(who) + ": direction must be unit norm");
}

void check_model_q(double q) {
  if (!(q >= 0.0 && q <= 0.5 + 1e-12))
    throw InvalidParameter("local model: valid only for q <= 1/2");
}

// Box-Muller pair of standard normals.
void normal_pair(Rng& rng, double& z0, double& z1) {
  const double u1 = 1.0 - rng.uniform();  // (0, 1]
  const double u2 = rng.uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  z0 = r * std::cos(kTwoPi * u2);
  z1 = r * std::sin(kTwoPi * u2);
}

int sign_pm(double t) { return t >= 0.0 ? +1 : -1; }

struct AliceCoreResult {
  int a = 0;
  bool accepted = false;
};

AliceCoreResult protocol1_alice_impl(const BlochVector& x, const HiddenState& h,
                                     Rng& rng) {
  if (h.core) {
    const double t = x.dot(h.lambda);
    if (rng.bernoulli(std::abs(t))) return {-sign_pm(t), true};
  }
  // Rejection and product branch alike respond for |0>: bias <0|x.sigma|0>.
  return {rng.pm_one(x.z()), false};
}

AliceCoreResult erasure_alice_impl(const ObservableDecomposition& dec,
                                   const HiddenState& h, Rng& rng) {
  if (h.core) {
    const double t = dec.axis.dot(h.lambda);
    if (rng.bernoulli(std::abs(t))) {
      if (rng.bernoulli(dec.c0)) return {-sign_pm(t), true};
      const double mu =
          dec.c0 < 1.0 - 1e-15 ? dec.c1 / (1.0 - dec.c0) : 0.0;
      return {rng.pm_one(mu), true};
    }
    return {rng.pm_one(dec.tr_r), false};
  }
  // Product branch: response for the flag state |2>.
  return {rng.pm_one(dec.tr_r), false};
}

}  // namespace

BlochVector sample_sphere(Rng& rng) {
  for (;;) {
    double n0, n1, n2, n3;
    normal_pair(rng, n0, n1);
    normal_pair(rng, n2, n3);
    (void)n3;
    BlochVector v(n0, n1, n2);
    const double norm = v.norm();
    if (norm > 1e-12) return v / norm;  // zero vector has measure zero
  }
}

HiddenState sample_hidden(double q, Rng& rng) {
  check_model_q(q);
  HiddenState h;
  h.core = rng.bernoulli(2.0 * q);
  h.lambda = sample_sphere(rng);
  return h;
}

Protocol1Outcome protocol1_round(const BlochVector& x, const BlochVector& y,
                                 double q, Rng& rng) {
  require_unit(x, "protocol1_round");
  require_unit(y, "protocol1_round");
  HiddenState h = sample_hidden(q, rng);
  AliceCoreResult ar = protocol1_alice_impl(x, h, rng);
  return Protocol1Outcome{ar.a, protocol1_bob(y, h, rng), ar.accepted};
}

int protocol1_alice(const BlochVector& x, const HiddenState& h, Rng& rng) {
  return protocol1_alice_impl(x, h, rng).a;
}

int protocol1_bob(const BlochVector& y, const HiddenState& h, Rng& rng) {
  if (h.core) return sign_pm(y.dot(h.lambda));
  return rng.pm_one(0.0);
}

ObservableDecomposition decompose_observable(const Matrix& obs,
                                             DichotomicCheck mode) {
  if (obs.rows() != 3 || obs.cols() != 3)
    throw DimensionMismatch("decompose_observable: expects a 3x3 observable");
  if (!is_hermitian(obs, 1e-9))
    throw NotHermitian("decompose_observable: observable not Hermitian");
  if (mode == DichotomicCheck::strict) {
    if (max_abs(obs * obs - identity(3)) > 1e-9)
      throw NotDichotomic("decompose_observable: observable is not +-1 valued");
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> es(obs, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1.0 - 1e-9 ||
        es.eigenvalues().maxCoeff() > 1.0 + 1e-9)
      throw NotDichotomic("decompose_observable: spectrum leaves [-1, 1]");
  }
  ObservableDecomposition d;
  d.c1 = 0.5 * (obs(0, 0).real() + obs(1, 1).real());
  BlochVector v(obs(0, 1).real(), -obs(0, 1).imag(),
                0.5 * (obs(0, 0).real() - obs(1, 1).real()));
  d.c0 = v.norm();
  d.axis = d.c0 < 1e-12 ? BlochVector::UnitZ() : BlochVector(v / d.c0);
  d.tr_r = obs(2, 2).real();
  return d;
}

ErasureOutcome erasure_round(const ObservableDecomposition& dec_a,
                             const ObservableDecomposition& dec_b, double q,
                             Rng& rng) {
  HiddenState h = sample_hidden(q, rng);
  AliceCoreResult ar = erasure_alice_impl(dec_a, h, rng);
  return ErasureOutcome{ar.a, erasure_bob(dec_b, h, rng), ar.accepted};
}

int erasure_alice(const ObservableDecomposition& dec, const HiddenState& h,
                  Rng& rng) {
  return erasure_alice_impl(dec, h, rng).a;
}

int erasure_bob(const ObservableDecomposition& dec, const HiddenState& h,
                Rng& rng) {
  if (h.core) {
    if (rng.bernoulli(dec.c0)) return sign_pm(dec.axis.dot(h.lambda));
    const double mu = dec.c0 < 1.0 - 1e-15 ? dec.c1 / (1.0 - dec.c0) : 0.0;
    return rng.pm_one(mu);
  }
  // Product branch: response for the maximally mixed qubit marginal.
  return rng.pm_one(dec.c1);
}

// -- sphere quadrature ---------------------------------------------------------

namespace {

// 16-point Gauss-Legendre rule on [-1, 1] (positive nodes; rule is symmetric).
constexpr double kGlNode[8] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
    0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
    0.9445750230732326, 0.9894009349916499};
constexpr double kGlWeight[8] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
    0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
    0.0622535239386479, 0.0271524594117541};

template <class F>
double gl16(const F& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 8; ++i)
    s += kGlWeight[i] * (f(c - h * kGlNode[i]) + f(c + h * kGlNode[i]));
  return s * h;
}

// Composite rule with panels geometrically refined toward both endpoints;
// handles the sqrt-type derivative kinks the arc-measure integrand has there.
template <class F>
double integrate_graded(const F& f, double a, double b) {
  if (b - a < 1e-14) return 0.0;
  const double m = 0.5 * (a + b);
  constexpr int kLevels = 40;
  double total = 0.0;
  double prev = a + (m - a) * std::ldexp(1.0, -kLevels);
  total += gl16(f, a, prev);
  for (int k = kLevels; k >= 1; --k) {
    const double next = a + (m - a) * std::ldexp(1.0, -(k - 1));
    total += gl16(f, prev, next);
    prev = next;
  }
  prev = b - (b - m) * std::ldexp(1.0, -kLevels);
  total += gl16(f, prev, b);
  for (int k = kLevels; k >= 1; --k) {
    const double next = b - (b - m) * std::ldexp(1.0, -(k - 1));
    total += gl16(f, next, prev);
    prev = next;
  }
  return total;
}

}  // namespace

double sphere_quadrature_correlator(const BlochVector& x, const BlochVector& y) {
  require_unit(x, "sphere_quadrature_correlator");
  require_unit(y, "sphere_quadrature_correlator");
  // Work in the frame with x along +z and y in the xz-plane at angle alpha.
  const double cos_a = std::clamp(x.dot(y), -1.0, 1.0);
  const double alpha = std::acos(cos_a);
  const double sin_a = std::sin(alpha);

  // Signed phi-measure of sign(y.lambda) at fixed polar angle theta:
  // sign(A cos(phi) + B) integrated over phi in [0, 2pi).
  auto phi_measure = [&](double theta) {
    const double big_a = sin_a * std::sin(theta);
    const double big_b = cos_a * std::cos(theta);
    if (big_a < 1e-14) return big_b >= 0.0 ? kTwoPi : -kTwoPi;
    const double w = -big_b / big_a;
    if (w <= -1.0) return kTwoPi;
    if (w >= 1.0) return -kTwoPi;
    return 4.0 * std::acos(w) - kTwoPi;
  };
  auto integrand = [&](double theta) {
    return std::sin(theta) * std::cos(theta) * phi_measure(theta);
  };

  // The phi-measure has kinks where cos(theta +- alpha) = 0; split there.
  std::vector<double> cuts = {0.0};
  for (double t : {std::numbers::pi / 2 - alpha, 1.5 * std::numbers::pi - alpha,
                   std::numbers::pi / 2 + alpha, alpha - std::numbers::pi / 2}) {
    if (t > 1e-12 && t < std::numbers::pi - 1e-12) cuts.push_back(t);
  }
  cuts.push_back(std::numbers::pi);
  std::sort(cuts.begin(), cuts.end());

  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    integral += integrate_graded(integrand, cuts[i], cuts[i + 1]);
  return -integral / kTwoPi;
}

// -- POVM refinement and the POVM-locality protocol ----------------------------

std::vector<WeightedProjector> refine_povm(const Povm& p) {
  if (p.elements.empty()) throw InvalidPovm("refine_povm: empty POVM");
  const Eigen::Index d = p.elements[0].rows();
  std::string why;
  if (!is_valid_povm(p, d, &why)) throw InvalidPovm("refine_povm: " + why);
  std::vector<WeightedProjector> out;
  double total = 0.0;
  for (std::size_t k = 0; k < p.elements.size(); ++k) {
    SpectralDecomposition sd = hermitian_eigen(p.elements[k]);
    for (Eigen::Index i = 0; i < sd.eigenvalues.size(); ++i) {
      if (sd.eigenvalues(i) <= 1e-12) continue;
      Vector v = sd.eigenvectors.col(i);
      out.push_back(WeightedProjector{sd.eigenvalues(i), v * v.adjoint(),
                                      static_cast<int>(k)});
      total += sd.eigenvalues(i);
    }
  }
  if (out.empty()) throw InvalidPovm("refine_povm: all eigenvalues vanish");
  // Renormalize the (<= 1e-9) weight deficit from dropped tiny eigenvalues.
  const double scale = static_cast<double>(d) / total;
  for (auto& e : out) e.weight *= scale;
  return out;
}

namespace {

BlochVector bloch_of_qubit_projector(const Matrix& p) {
  BlochVector n((p * pauli_x()).trace().real(), (p * pauli_y()).trace().real(),
                (p * pauli_z()).trace().real());
  const double norm = n.norm();
  if (std::abs(norm - 1.0) > 1e-9)
    throw InvalidParameter("expected a rank-one qubit projector");
  return n / norm;
}

// Restriction of the dichotomic measurement {P, I-P} to the |0>,|1> block,
// as the (generally non-projective) observable 2 Pi P Pi - I.
Matrix restricted_observable(const Matrix& p) {
  Matrix pi = Matrix::Zero(3, 3);
  pi(0, 0) = 1.0;
  pi(1, 1) = 1.0;
  return 2.0 * (pi * p * pi) - identity(3);
}

std::vector<double> sigma_cumulative(const Povm& povm, const Matrix& sigma) {
  std::vector<double> cum;
  double c = 0.0;
  for (const Matrix& m : povm.elements) {
    c += (m * sigma).trace().real();
    cum.push_back(c);
  }
  return cum;
}

int sample_cumulative(const std::vector<double>& cum, Rng& rng) {
  const double u = rng.uniform();
  for (std::size_t i = 0; i < cum.size(); ++i)
    if (u < cum[i]) return static_cast<int>(i);
  return static_cast<int>(cum.size()) - 1;
}

}  // namespace

Protocol2Session::Protocol2Session(const Povm& povm_a, const Povm& povm_b,
                                   BaseModel base, double q,
                                   const Matrix& sigma_a, const Matrix& sigma_b)
    : base_(base), q_(q) {
  check_model_q(q);
  dim_ = base == BaseModel::state_q ? 2 : 3;
  std::string why;
  if (!is_valid_povm(povm_a, dim_, &why))
    throw InvalidPovm("protocol2: Alice POVM invalid: " + why);
  if (!is_valid_povm(povm_b, dim_, &why))
    throw InvalidPovm("protocol2: Bob POVM invalid: " + why);
  if (sigma_a.rows() != dim_ || sigma_b.rows() != dim_)
    throw DimensionMismatch("protocol2: sigma dimension mismatch");
  if (!is_valid_density(sigma_a, &why) || !is_valid_density(sigma_b, &why))
    throw InvalidParameter("protocol2: sigma invalid: " + why);
  n_a_ = static_cast<int>(povm_a.elements.size());
  n_b_ = static_cast<int>(povm_b.elements.size());

  auto build = [&](const Povm& povm, bool alice_side) {
    std::vector<Entry> entries;
    double cum = 0.0;
    for (const WeightedProjector& wp : refine_povm(povm)) {
      Entry e;
      cum += wp.weight / static_cast<double>(dim_);
      e.pick_cum = cum;
      e.parent = wp.parent;
      if (base_ == BaseModel::state_q) {
        e.bloch = bloch_of_qubit_projector(wp.projector);
      } else if (alice_side) {
        e.dec = decompose_observable(2.0 * wp.projector - identity(3),
                                     DichotomicCheck::strict);
      } else {
        e.dec = decompose_observable(restricted_observable(wp.projector),
                                     DichotomicCheck::relaxed);
      }
      entries.push_back(std::move(e));
    }
    return entries;
  };
  entries_a_ = build(povm_a, true);
  entries_b_ = build(povm_b, false);
  sigma_cum_a_ = sigma_cumulative(povm_a, sigma_a);
  sigma_cum_b_ = sigma_cumulative(povm_b, sigma_b);
}

int Protocol2Session::respond(const std::vector<Entry>& entries,
                              const std::vector<double>& sigma_cum,
                              bool alice_side, const HiddenState& h, Rng& rng,
                              bool* direct) const {
  // (i) pick a refined projector with probability weight/d
  const double u = rng.uniform();
  std::size_t pick = entries.size() - 1;
  for (std::size_t i = 0; i < entries.size(); ++i)
    if (u < entries[i].pick_cum) {
      pick = i;
      break;
    }
  const Entry& e = entries[pick];
  // (ii) simulate {P, I-P} with the shared lambda
  int oc;
  if (base_ == BaseModel::state_q)
    oc = alice_side ? protocol1_alice(e.bloch, h, rng)
                    : protocol1_bob(e.bloch, h, rng);
  else
    oc = alice_side ? erasure_alice(e.dec, h, rng) : erasure_bob(e.dec, h, rng);
  // (iii) P branch: announce the parent outcome
  if (oc == +1) {
    *direct = true;
    return e.parent;
  }
  // (iv) otherwise sample from Tr(M_k sigma)
  *direct = false;
  return sample_cumulative(sigma_cum, rng);
}

Protocol2Outcome Protocol2Session::round(Rng& rng) const {
  HiddenState h = sample_hidden(q_, rng);
  Protocol2Outcome out;
  out.a = respond(entries_a_, sigma_cum_a_, true, h, rng, &out.alice_direct);
  out.b = respond(entries_b_, sigma_cum_b_, false, h, rng, &out.bob_direct);
  return out;
}

Protocol2Outcome protocol2_round(const Povm& povm_a, const Povm& povm_b,
                                 BaseModel base, double q,
                                 const Matrix& sigma_a, const Matrix& sigma_b,
                                 Rng& rng) {
  Protocol2Session session(povm_a, povm_b, base, q, sigma_a, sigma_b);
  return session.round(rng);
}

// -- statistical harness --------------------------------------------------------

LhvModel lhv_model_from_string(const std::string& name) {
  if (name == "protocol1") return LhvModel::protocol1;
  if (name == "erasure") return LhvModel::erasure;
  if (name == "protocol2-rhoG") return LhvModel::protocol2_rho_G;
  if (name == "protocol2-rhoGM") return LhvModel::protocol2_rho_GM;
  throw InvalidParameter("unknown LHV model: " + name);
}

std::string lhv_model_to_string(LhvModel m) {
  switch (m) {
    case LhvModel::protocol1: return "protocol1";
    case LhvModel::erasure: return "erasure";
    case LhvModel::protocol2_rho_G: return "protocol2-rhoG";
    case LhvModel::protocol2_rho_GM: return "protocol2-rhoGM";
  }
  throw InvalidParameter("bad LHV model");
}

namespace {

double binomial_z(double emp, double target, long long n) {
  if (n <= 0) return 0.0;
  const double var = std::max(target * (1.0 - target), 1e-12);
  return std::abs(emp - target) / std::sqrt(var / static_cast<double>(n));
}

double mean_z(double emp, double target, long long n) {
  if (n <= 0) return 0.0;
  const double var = std::max(1.0 - target * target, 1e-12);
  return std::abs(emp - target) / std::sqrt(var / static_cast<double>(n));
}

struct DichotAcc {
  long long n[2][2] = {};  // index 0 <-> outcome +1
  long long accepted = 0;
  long long core = 0;

  DichotAcc& operator+=(const DichotAcc& o) {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) n[i][j] += o.n[i][j];
    accepted += o.accepted;
    core += o.core;
    return *this;
  }
};

struct P2Acc {
  std::vector<long long> n;  // row-major a * n_b + b
  long long direct_a = 0, direct_b = 0;

  P2Acc& operator+=(const P2Acc& o) {
    if (n.size() < o.n.size()) n.resize(o.n.size(), 0);
    for (std::size_t i = 0; i < o.n.size(); ++i) n[i] += o.n[i];
    direct_a += o.direct_a;
    direct_b += o.direct_b;
    return *this;
  }
};

void fill_dichotomic_stats(SettingStats& st, const JointDistribution& target,
                           const DichotAcc& acc, long long rounds) {
  st.dichotomic = true;
  st.target = target.p;
  st.empirical = Eigen::MatrixXd(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      st.empirical(i, j) =
          static_cast<double>(acc.n[i][j]) / static_cast<double>(rounds);
  st.target_correlator = correlator_of(target);
  st.target_marginal_a = marginal_a(target);
  st.target_marginal_b = marginal_b(target);
  st.emp_correlator = st.empirical(0, 0) - st.empirical(0, 1) -
                      st.empirical(1, 0) + st.empirical(1, 1);
  st.emp_marginal_a = st.empirical.row(0).sum() - st.empirical.row(1).sum();
  st.emp_marginal_b = st.empirical.col(0).sum() - st.empirical.col(1).sum();
  st.max_abs_dev = (st.empirical - st.target).cwiseAbs().maxCoeff();
  st.max_z = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      st.max_z = std::max(
          st.max_z, binomial_z(st.empirical(i, j), st.target(i, j), rounds));
  st.max_z = std::max(
      st.max_z, mean_z(st.emp_correlator, st.target_correlator, rounds));
  st.max_z = std::max(
      st.max_z, mean_z(st.emp_marginal_a, st.target_marginal_a, rounds));
  st.max_z = std::max(
      st.max_z, mean_z(st.emp_marginal_b, st.target_marginal_b, rounds));
}

}  // namespace

SimulationReport run_lhv_experiment(LhvModel model, double q,
                                    const std::vector<SettingPair>& settings,
                                    long long rounds, std::uint64_t seed,
                                    int workers) {
  if (rounds < 10000)
    throw InvalidParameter("run_lhv_experiment: rounds must be >= 10^4");
  if (settings.empty())
    throw InvalidParameter("run_lhv_experiment: no settings");
  check_model_q(q);

  SimulationReport rep;
  rep.model = lhv_model_to_string(model);
  rep.q = q;
  rep.seed = seed;
  rep.rounds = rounds;
  rep.settings = settings;

  long long accepted_total = 0, core_total = 0;
  long long direct_a_total = 0, direct_b_total = 0;

  const bool dichotomic =
      model == LhvModel::protocol1 || model == LhvModel::erasure;
  const bool rho_g = model == LhvModel::protocol2_rho_G;

  BipartiteState target_state =
      model == LhvModel::protocol1
          ? state_q(q)
          : (model == LhvModel::erasure
                 ? erasure_state(q)
                 : (rho_g ? protocol2_map(state_q(q), basis_projector(0, 2),
                                          basis_projector(0, 2))
                          : protocol2_map(erasure_state(q), basis_projector(2, 3),
                                          basis_projector(2, 3))));

  for (std::size_t si = 0; si < settings.size(); ++si) {
    const std::uint64_t setting_seed = substream(seed, 1000003ULL + si);
    SettingStats st;
    if (dichotomic) {
      Povm pa, pb;
      BlochVector x, y;
      ObservableDecomposition dec_a, dec_b;
      if (model == LhvModel::protocol1) {
        const auto& bp = std::get<BlochPair>(settings[si]);
        x = bp.x;
        y = bp.y;
        require_unit(x, "run_lhv_experiment");
        require_unit(y, "run_lhv_experiment");
        pa = projectors_from_bloch(x);
        pb = projectors_from_bloch(y);
      } else {
        const auto& op = std::get<ObservablePair>(settings[si]);
        dec_a = decompose_observable(op.a, DichotomicCheck::strict);
        dec_b = decompose_observable(op.b, DichotomicCheck::relaxed);
        pa = povm_from_observable(op.a);
        pb = povm_from_observable(op.b);
      }
      JointDistribution target = born_joint(target_state, pa, pb);
      DichotAcc acc = run_chunked<DichotAcc>(
          rounds, setting_seed, workers, [&](DichotAcc& a, Rng& rng) {
            int oa, ob;
            bool was_accepted, was_core;
            HiddenState h = sample_hidden(q, rng);
            was_core = h.core;
            if (model == LhvModel::protocol1) {
              AliceCoreResult ar = protocol1_alice_impl(x, h, rng);
              oa = ar.a;
              was_accepted = ar.accepted;
              ob = protocol1_bob(y, h, rng);
            } else {
              AliceCoreResult ar = erasure_alice_impl(dec_a, h, rng);
              oa = ar.a;
              was_accepted = ar.accepted && h.core;
              ob = erasure_bob(dec_b, h, rng);
            }
            ++a.n[oa == +1 ? 0 : 1][ob == +1 ? 0 : 1];
            if (was_core) ++a.core;
            if (was_accepted && was_core) ++a.accepted;
          });
      accepted_total += acc.accepted;
      core_total += acc.core;
      fill_dichotomic_stats(st, target, acc, rounds);
    } else {
      const auto& pp = std::get<PovmPair>(settings[si]);
      const Matrix sigma = rho_g ? basis_projector(0, 2) : basis_projector(2, 3);
      Protocol2Session session(pp.a, pp.b,
                               rho_g ? BaseModel::state_q : BaseModel::erasure,
                               q, sigma, sigma);
      JointDistribution target = born_joint(target_state, pp.a, pp.b);
      const int na = session.outcomes_a(), nb = session.outcomes_b();
      P2Acc acc = run_chunked<P2Acc>(
          rounds, setting_seed, workers, [&](P2Acc& a, Rng& rng) {
            if (a.n.empty()) a.n.assign(static_cast<std::size_t>(na * nb), 0);
            Protocol2Outcome out = session.round(rng);
            ++a.n[static_cast<std::size_t>(out.a * nb + out.b)];
            if (out.alice_direct) ++a.direct_a;
            if (out.bob_direct) ++a.direct_b;
          });
      if (acc.n.empty()) acc.n.assign(static_cast<std::size_t>(na * nb), 0);
      direct_a_total += acc.direct_a;
      direct_b_total += acc.direct_b;
      st.dichotomic = false;
      st.target = target.p;
      st.empirical = Eigen::MatrixXd(na, nb);
      for (int i = 0; i < na; ++i)
        for (int j = 0; j < nb; ++j)
          st.empirical(i, j) =
              static_cast<double>(acc.n[static_cast<std::size_t>(i * nb + j)]) /
              static_cast<double>(rounds);
      st.max_abs_dev = (st.empirical - st.target).cwiseAbs().maxCoeff();
      st.max_z = 0.0;
      for (int i = 0; i < na; ++i)
        for (int j = 0; j < nb; ++j)
          st.max_z = std::max(st.max_z, binomial_z(st.empirical(i, j),
                                                   st.target(i, j), rounds));
    }
    rep.per_setting.push_back(std::move(st));
  }

  for (const SettingStats& st : rep.per_setting) {
    rep.max_abs_dev = std::max(rep.max_abs_dev, st.max_abs_dev);
    rep.max_z = std::max(rep.max_z, st.max_z);
  }
  const long long total_rounds =
      rounds * static_cast<long long>(settings.size());
  if (dichotomic) {
    const double acc_rate =
        core_total > 0
            ? static_cast<double>(accepted_total) / static_cast<double>(core_total)
            : 0.0;
    rep.rates["acceptance_rate"] = acc_rate;
    rep.rates["acceptance_z"] = binomial_z(acc_rate, 0.5, core_total);
    rep.rates["core_rate"] =
        static_cast<double>(core_total) / static_cast<double>(total_rounds);
    rep.rates["core_z"] =
        binomial_z(rep.rates["core_rate"], std::min(2.0 * q, 1.0), total_rounds);
    rep.max_z = std::max(rep.max_z, rep.rates["acceptance_z"]);
    rep.max_z = std::max(rep.max_z, rep.rates["core_z"]);
  } else {
    const double d = rho_g ? 2.0 : 3.0;
    rep.rates["step_iii_rate_alice"] =
        static_cast<double>(direct_a_total) / static_cast<double>(total_rounds);
    rep.rates["step_iii_rate_bob"] =
        static_cast<double>(direct_b_total) / static_cast<double>(total_rounds);
    rep.rates["step_iii_z_alice"] =
        binomial_z(rep.rates["step_iii_rate_alice"], 1.0 / d, total_rounds);
    rep.rates["step_iii_z_bob"] =
        binomial_z(rep.rates["step_iii_rate_bob"], 1.0 / d, total_rounds);
    rep.max_z = std::max(rep.max_z, rep.rates["step_iii_z_alice"]);
    rep.max_z = std::max(rep.max_z, rep.rates["step_iii_z_bob"]);
  }
  return rep;
}

}  // namespace seqbell
