#pragma once

#include <vector>

#include "seqbell/qcore.hpp"

namespace seqbell {

using BlochVector = Eigen::Vector3d;
using CorrelationMatrix = Eigen::Matrix3d;  // T_ij = Tr(rho sigma_i (x) sigma_j)

/// Positive effects summing to the identity; outcome k is element k.
struct Povm {
  std::vector<Matrix> elements;
};

/// Two measurement directions per party for a CHSH test, all unit vectors.
struct ChshSettings {
  BlochVector a1, a2, b1, b2;
};

/// Joint outcome table p(i,j) with explicit outcome labels per party
/// (labels are +1/-1 for dichotomic measurements, 0..n-1 for general POVMs).
struct JointDistribution {
  std::vector<int> labels_a;
  std::vector<int> labels_b;
  Eigen::MatrixXd p;  // rows: Alice outcomes, cols: Bob outcomes
};

bool is_valid_povm(const Povm& m, Eigen::Index dim, std::string* why = nullptr);

/// {(I + x.sigma)/2, (I - x.sigma)/2} with labels {+1, -1}.
Povm projectors_from_bloch(const BlochVector& x);

/// Dichotomic POVM {(I + obs)/2, (I - obs)/2} of a +-1-bounded observable,
/// labels {+1, -1}.
Povm povm_from_observable(const Matrix& obs);

/// Born rule: p(a,b) = Tr(M_a (x) M_b rho).
JointDistribution born_joint(const BipartiteState& s, const Povm& povm_a,
                             const Povm& povm_b);

double correlator_of(const JointDistribution& d);
double marginal_a(const JointDistribution& d);
double marginal_b(const JointDistribution& d);

/// E(x,y) = Tr((x.sigma (x) y.sigma) rho) via Born sampling tables.
double correlator(const BipartiteState& s, const BlochVector& x,
                  const BlochVector& y);

CorrelationMatrix correlation_matrix(const BipartiteState& s);

/// Maximal CHSH value over projective settings: 2*sqrt(t1 + t2) with t1 >= t2
/// the two largest eigenvalues of T^T T.
double horodecki_S(const BipartiteState& s);

/// Settings achieving the Horodecki maximum, built from the principal
/// directions of T; falls back to canonical axes when T is degenerate.
ChshSettings optimal_chsh_settings(const BipartiteState& s);

/// E(a1,b1) + E(a1,b2) + E(a2,b1) - E(a2,b2).
double chsh_value(const BipartiteState& s, const ChshSettings& c);

/// Restriction of a state supported (after filtering) on the |0>,|1> x |0>,|1>
/// block to an explicit 2x2 system, renormalized by the block weight.
BipartiteState restrict_to_qubits(const BipartiteState& s);

}  // namespace seqbell
