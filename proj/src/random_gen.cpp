#include "seqbell/random_gen.hpp"

#include <cmath>
#include <numbers>

namespace seqbell {

namespace {

Complex random_normal_complex(Rng& rng) {
  const double u1 = 1.0 - rng.uniform();
  const double u2 = rng.uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  return Complex(r * std::cos(a), r * std::sin(a));
}

}  // namespace

Matrix random_ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix g(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) g(i, j) = random_normal_complex(rng);
  return g;
}

Matrix random_hermitian(Eigen::Index d, Rng& rng) {
  Matrix g = random_ginibre(d, d, rng);
  return 0.5 * (g + g.adjoint());
}

Matrix random_density(Eigen::Index d, Rng& rng) {
  Matrix g = random_ginibre(d, d, rng);
  Matrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

Matrix random_unitary(Eigen::Index d, Rng& rng) {
  Matrix g = random_ginibre(d, d, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < d; ++i) {
    const Complex rii = r(i, i);
    const double mag = std::abs(rii);
    q.col(i) *= mag > 1e-300 ? rii / mag : Complex(1.0, 0.0);
  }
  return q;
}

BipartiteState random_two_qubit_state(Rng& rng) {
  return BipartiteState{2, 2, random_density(4, rng)};
}

Matrix random_pm_observable(Eigen::Index d, Rng& rng) {
  Matrix v = random_unitary(d, rng);
  Eigen::VectorXd signs(d);
  for (Eigen::Index i = 0; i < d; ++i) signs(i) = rng.bernoulli(0.5) ? 1.0 : -1.0;
  return v * signs.asDiagonal() * v.adjoint();
}

namespace {

Povm normalize_effects(std::vector<Matrix> effects, Eigen::Index d) {
  Matrix sum = Matrix::Zero(d, d);
  for (const Matrix& e : effects) sum += e;
  SpectralDecomposition sd = hermitian_eigen(sum);
  if (sd.eigenvalues.minCoeff() < 1e-8)
    throw InvalidParameter("random POVM: singular normalization");
  Eigen::VectorXd inv_sqrt = sd.eigenvalues.cwiseSqrt().cwiseInverse();
  Matrix s = sd.eigenvectors * inv_sqrt.asDiagonal() * sd.eigenvectors.adjoint();
  Povm out;
  for (Matrix& e : effects) {
    Matrix m = s * e * s;
    out.elements.push_back(0.5 * (m + m.adjoint()));
  }
  return out;
}

}  // namespace

Povm random_rank_one_povm(Eigen::Index d, int outcomes, Rng& rng) {
  if (outcomes < d)
    throw InvalidParameter("random_rank_one_povm: outcomes must be >= dim");
  for (;;) {
    std::vector<Matrix> effects;
    for (int k = 0; k < outcomes; ++k) {
      Vector g = random_ginibre(d, 1, rng).col(0);
      effects.push_back(g * g.adjoint());
    }
    try {
      return normalize_effects(std::move(effects), d);
    } catch (const InvalidParameter&) {
      // near-singular draw; try again from the same stream
    }
  }
}

Povm random_povm(Eigen::Index d, int outcomes, Rng& rng) {
  if (outcomes < 2) throw InvalidParameter("random_povm: outcomes must be >= 2");
  for (;;) {
    std::vector<Matrix> effects;
    for (int k = 0; k < outcomes; ++k) {
      Matrix g = random_ginibre(d, d, rng);
      effects.push_back(g * g.adjoint());
    }
    try {
      return normalize_effects(std::move(effects), d);
    } catch (const InvalidParameter&) {
    }
  }
}

std::vector<SettingPair> random_settings(LhvModel model, int count,
                                         std::uint64_t seed) {
  if (count < 1) throw InvalidParameter("random_settings: count must be >= 1");
  std::vector<SettingPair> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    Rng rng(substream(seed, 777000ULL + static_cast<std::uint64_t>(k)));
    switch (model) {
      case LhvModel::protocol1:
        out.push_back(BlochPair{sample_sphere(rng), sample_sphere(rng)});
        break;
      case LhvModel::erasure: {
        ObservablePair op;
        op.a = random_pm_observable(3, rng);
        if (k % 2 == 0) {
          // genuine qubit observable, embedded with +1 on the flag level
          Matrix obs = Matrix::Zero(3, 3);
          obs.topLeftCorner(2, 2) = bloch_operator(sample_sphere(rng));
          obs(2, 2) = 1.0;
          op.b = obs;
        } else {
          // dichotomic effect from a projector restricted to the qubit block
          Vector g = random_ginibre(3, 1, rng).col(0);
          Matrix p = g * g.adjoint() / g.squaredNorm();
          Matrix pi = Matrix::Zero(3, 3);
          pi(0, 0) = 1.0;
          pi(1, 1) = 1.0;
          op.b = 2.0 * (pi * p * pi) - identity(3);
        }
        out.push_back(std::move(op));
        break;
      }
      case LhvModel::protocol2_rho_G: {
        PovmPair pp;
        pp.a = random_rank_one_povm(2, 2 + k % 3, rng);
        pp.b = random_rank_one_povm(2, 2 + (k + 1) % 3, rng);
        out.push_back(std::move(pp));
        break;
      }
      case LhvModel::protocol2_rho_GM: {
        PovmPair pp;
        pp.a = k % 2 == 0 ? random_rank_one_povm(3, 3 + k % 3, rng)
                          : random_povm(3, 3 + k % 2, rng);
        pp.b = k % 2 == 0 ? random_povm(3, 4, rng)
                          : random_rank_one_povm(3, 4, rng);
        out.push_back(std::move(pp));
        break;
      }
    }
  }
  return out;
}

}  // namespace seqbell
