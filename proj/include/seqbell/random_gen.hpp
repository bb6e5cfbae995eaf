#pragma once

#include "seqbell/lhv.hpp"

namespace seqbell {

// Deterministic generators for random test inputs; all draw exclusively from
// the given Rng so results are reproducible from the seed alone.

Matrix random_ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng);
Matrix random_hermitian(Eigen::Index d, Rng& rng);   // entries O(1)
Matrix random_density(Eigen::Index d, Rng& rng);     // G G^dag / Tr
Matrix random_unitary(Eigen::Index d, Rng& rng);     // Haar via QR phase fix
BipartiteState random_two_qubit_state(Rng& rng);

/// Random +-1 observable on dimension d: V diag(+-1,...) V^dag.
Matrix random_pm_observable(Eigen::Index d, Rng& rng);

/// Rank-one POVM with `outcomes` elements (outcomes >= d for invertibility of
/// the normalization).
Povm random_rank_one_povm(Eigen::Index d, int outcomes, Rng& rng);

/// Full-rank POVM with `outcomes` elements.
Povm random_povm(Eigen::Index d, int outcomes, Rng& rng);

}  // namespace seqbell
