#pragma once

#include <string>

#include "seqbell/qcore.hpp"

namespace seqbell {

enum class StateFamilyTag { singlet, state_q, rho_G, erasure, rho_GM };

/// Named state family with its mixing parameter q in [0,1].
struct StateFamily {
  StateFamilyTag tag = StateFamilyTag::singlet;
  double q = 1.0;
};

StateFamilyTag family_tag_from_string(const std::string& name);
std::string family_tag_to_string(StateFamilyTag tag);

/// Projector onto (|0,1> - |1,0>)/sqrt(2), embedded in the top-left
/// qubit x qubit block of a dim_a x dim_b system.
BipartiteState singlet(Eigen::Index dim_a = 2, Eigen::Index dim_b = 2);

/// q * singlet + (1-q) |0><0| (x) I/2 on 2x2.
BipartiteState state_q(double q);

/// q * singlet + (1-q) |2><2| (x) I_2/2, built on 3x3 so the d=3 POVM-local
/// map applies directly; Bob's |2> level carries no population.
BipartiteState erasure_state(double q);

/// (1/4)[q singlet + (2-q)|0><0| (x) I/2 + q I/2 (x) |0><0| + (2-q)|00><00|],
/// built from the closed form (independent of protocol2_map by design).
BipartiteState state_rho_G(double q);

/// (1/9)[q singlet + (3-q)|2><2| (x) I_2/2 + 2q I_2/2 (x) |2><2|
///       + (6-2q)|22><22|] on 3x3, built from the closed form.
BipartiteState state_rho_GM(double q);

/// The POVM-locality construction: for rho0 with dim_a = dim_b = d and local
/// states sigma_a, sigma_b,
///   (1/d^2)[rho0 + (d-1)(rhoA (x) sigmaB + sigmaA (x) rhoB)
///           + (d-1)^2 sigmaA (x) sigmaB]
/// where rhoA, rhoB are the marginals of rho0.
BipartiteState protocol2_map(const BipartiteState& rho0, const Matrix& sigma_a,
                             const Matrix& sigma_b);

/// One-sided variant acting on Alice only: (1/d)[rho0 + (d-1) sigmaA (x) rhoB].
BipartiteState protocol2_map_one_sided(const BipartiteState& rho0,
                                       const Matrix& sigma_a);

/// Dispatch by family tag (q ignored for the singlet).
BipartiteState family_state(const StateFamily& f);

}  // namespace seqbell
