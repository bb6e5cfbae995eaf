#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "seqbell/bell.hpp"
#include "seqbell/rng.hpp"

namespace seqbell {

// -- hidden variable ----------------------------------------------------------

/// Shared per-round hidden state: the mixture branch and the unit vector
/// lambda. Both parties read the same value; everything else a round consumes
/// is private randomness.
struct HiddenState {
  bool core = true;  // singlet-like branch (probability 2q); else product branch
  BlochVector lambda = BlochVector::UnitZ();
};

/// Uniform point on the unit sphere (three standard normals, normalized).
BlochVector sample_sphere(Rng& rng);

/// Branch with probability 2q into the core model, else the product remainder.
/// Requires q <= 1/2.
HiddenState sample_hidden(double q, Rng& rng);

// -- dichotomic models --------------------------------------------------------

struct Protocol1Outcome {
  int a = 0;  // +-1
  int b = 0;  // +-1
  bool accepted = false;  // Alice accepted lambda (core branch only)
};

/// One round of the projective-measurement model for the q-family state:
/// Alice accepts lambda with probability |x.lambda| and outputs
/// -sign(x.lambda); on rejection (and in the product branch) she responds for
/// |0>. Bob outputs sign(y.lambda) in the core branch, a fair coin otherwise.
Protocol1Outcome protocol1_round(const BlochVector& x, const BlochVector& y,
                                 double q, Rng& rng);

// Split response functions (one shared HiddenState, local private randomness);
// protocol2_round composes these.
int protocol1_alice(const BlochVector& x, const HiddenState& h, Rng& rng);
int protocol1_bob(const BlochVector& y, const HiddenState& h, Rng& rng);

/// Deterministic quadrature of -(1/2pi) integral over the sphere of
/// |x.lambda| sign(x.lambda) sign(y.lambda); equals -x.y within 1e-6.
double sphere_quadrature_correlator(const BlochVector& x, const BlochVector& y);

// -- qutrit observable decomposition -----------------------------------------

/// (c0, c1, axis, tr_r) data of a 3x3 Hermitian observable: the |0>,|1> block
/// equals c0 * axis.sigma + c1 * I_2 and tr_r = <2|O|2>. Valid +-1 observables
/// satisfy |c1| + c0 <= 1.
struct ObservableDecomposition {
  double c0 = 0.0;
  double c1 = 0.0;
  BlochVector axis = BlochVector::UnitZ();
  double tr_r = 0.0;
};

enum class DichotomicCheck {
  strict,   // requires O^2 = I within 1e-9
  relaxed,  // any Hermitian O with spectrum in [-1, 1]
};

ObservableDecomposition decompose_observable(
    const Matrix& obs, DichotomicCheck mode = DichotomicCheck::strict);

struct ErasureOutcome {
  int a = 0;
  int b = 0;
  bool accepted = false;
};

/// One round of the dichotomic model for the erasure state. Alice: accept
/// lambda with probability |axis_A.lambda|; on acceptance output
/// -sign(axis_A.lambda) with probability c0_A, else a bit with bias
/// c1_A/(1-c0_A); on rejection (and in the product branch) a bit with bias
/// tr_r_A. Bob: sign(axis_B.lambda) with probability c0_B, else bias
/// c1_B/(1-c0_B); product branch: bias c1_B.
ErasureOutcome erasure_round(const ObservableDecomposition& dec_a,
                             const ObservableDecomposition& dec_b, double q,
                             Rng& rng);

int erasure_alice(const ObservableDecomposition& dec, const HiddenState& h,
                  Rng& rng);
int erasure_bob(const ObservableDecomposition& dec, const HiddenState& h,
                Rng& rng);

// -- POVM refinement and the POVM-locality protocol ---------------------------

/// Weighted rank-one refinement entry: parent element k of the original POVM
/// contributed weight * projector with eigenvalue weight > 1e-12.
struct WeightedProjector {
  double weight = 0.0;
  Matrix projector;
  int parent = 0;
};

/// Eigendecomposes each POVM element into weighted rank-one projectors;
/// weights sum to the dimension (deficit from dropped tiny eigenvalues is
/// renormalized away).
std::vector<WeightedProjector> refine_povm(const Povm& p);

/// Which dichotomic base model simulates the pre-map state rho0.
enum class BaseModel {
  state_q,  // d = 2, rho0 = state_q(q)
  erasure,  // d = 3, rho0 = erasure_state(q)
};

struct Protocol2Outcome {
  int a = 0;  // outcome label of Alice's original POVM
  int b = 0;
  bool alice_direct = false;  // output in step (iii), i.e. from the simulation
  bool bob_direct = false;
};

/// Precomputed tables for running the POVM-locality protocol round by round:
/// refined projectors with their pick probabilities weight/d, per-entry
/// response data for the base model, and the sigma fallback distributions.
class Protocol2Session {
 public:
  Protocol2Session(const Povm& povm_a, const Povm& povm_b, BaseModel base,
                   double q, const Matrix& sigma_a, const Matrix& sigma_b);

  Protocol2Outcome round(Rng& rng) const;

  Eigen::Index dim() const { return dim_; }
  int outcomes_a() const { return n_a_; }
  int outcomes_b() const { return n_b_; }

 private:
  struct Entry {
    double pick_cum = 0.0;        // cumulative weight/d
    int parent = 0;
    BlochVector bloch;            // state_q base
    ObservableDecomposition dec;  // erasure base
  };
  int respond(const std::vector<Entry>& entries,
              const std::vector<double>& sigma_cum, bool alice_side,
              const HiddenState& h, Rng& rng, bool* direct) const;

  BaseModel base_;
  double q_ = 0.5;
  Eigen::Index dim_ = 2;
  int n_a_ = 0, n_b_ = 0;
  std::vector<Entry> entries_a_, entries_b_;
  std::vector<double> sigma_cum_a_, sigma_cum_b_;
};

/// Single round of the POVM-locality protocol. Per party: (i) pick a refined
/// projector with probability weight/d; (ii) run the shared-lambda dichotomic
/// base model for {P, I-P}; (iii) on the P branch output the parent label;
/// (iv) otherwise output label k with probability Tr(M_k sigma).
Protocol2Outcome protocol2_round(const Povm& povm_a, const Povm& povm_b,
                                 BaseModel base, double q,
                                 const Matrix& sigma_a, const Matrix& sigma_b,
                                 Rng& rng);

// -- statistical harness ------------------------------------------------------

enum class LhvModel { protocol1, erasure, protocol2_rho_G, protocol2_rho_GM };

LhvModel lhv_model_from_string(const std::string& name);
std::string lhv_model_to_string(LhvModel m);

struct BlochPair {
  BlochVector x, y;
};
struct ObservablePair {
  Matrix a, b;
};
struct PovmPair {
  Povm a, b;
};
using SettingPair = std::variant<BlochPair, ObservablePair, PovmPair>;

/// Empirical-vs-Born comparison for one measurement setting pair.
struct SettingStats {
  Eigen::MatrixXd empirical;
  Eigen::MatrixXd target;
  bool dichotomic = false;
  double emp_correlator = 0.0, target_correlator = 0.0;
  double emp_marginal_a = 0.0, target_marginal_a = 0.0;
  double emp_marginal_b = 0.0, target_marginal_b = 0.0;
  double max_abs_dev = 0.0;
  double max_z = 0.0;
};

struct SimulationReport {
  std::string model;
  double q = 0.5;
  std::uint64_t seed = 0;
  long long rounds = 0;  // per setting pair
  std::vector<SettingPair> settings;
  std::vector<SettingStats> per_setting;
  double max_abs_dev = 0.0;
  double max_z = 0.0;
  std::map<std::string, double> rates;
};

/// Runs `rounds` rounds of the chosen model for every setting pair, tabulates
/// empirical joint distributions, and scores them against born_joint targets.
/// Locality is structural: each party's response sees only its own setting,
/// the shared hidden state and private randomness. Deterministic for fixed
/// (seed, rounds) independent of `workers`.
SimulationReport run_lhv_experiment(LhvModel model, double q,
                                    const std::vector<SettingPair>& settings,
                                    long long rounds, std::uint64_t seed,
                                    int workers = 1);

/// Settings generators for harness runs and the CLI `random:K` syntax.
std::vector<SettingPair> random_settings(LhvModel model, int count,
                                         std::uint64_t seed);

}  // namespace seqbell
