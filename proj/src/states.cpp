#include "seqbell/states.hpp"

#include <cmath>

namespace seqbell {

namespace {

void check_q(double q) {
  if (!(q >= 0.0 && q <= 1.0))
    throw InvalidParameter("state constructor: q must lie in [0,1]");
}

}  // namespace

StateFamilyTag family_tag_from_string(const std::string& name) {
  if (name == "singlet") return StateFamilyTag::singlet;
  if (name == "state_q") return StateFamilyTag::state_q;
  if (name == "rho_G") return StateFamilyTag::rho_G;
  if (name == "erasure") return StateFamilyTag::erasure;
  if (name == "rho_GM") return StateFamilyTag::rho_GM;
  throw InvalidParameter("unknown state family: " + name);
}

std::string family_tag_to_string(StateFamilyTag tag) {
  switch (tag) {
    case StateFamilyTag::singlet: return "singlet";
    case StateFamilyTag::state_q: return "state_q";
    case StateFamilyTag::rho_G: return "rho_G";
    case StateFamilyTag::erasure: return "erasure";
    case StateFamilyTag::rho_GM: return "rho_GM";
  }
  throw InvalidParameter("bad family tag");
}

BipartiteState singlet(Eigen::Index dim_a, Eigen::Index dim_b) {
  if (dim_a < 2 || dim_b < 2)
    throw DimensionMismatch("singlet: local dimensions must be >= 2");
  Vector psi = Vector::Zero(dim_a * dim_b);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  psi(0 * dim_b + 1) = inv_sqrt2;
  psi(1 * dim_b + 0) = -inv_sqrt2;
  return BipartiteState{dim_a, dim_b, psi * psi.adjoint()};
}

BipartiteState state_q(double q) {
  check_q(q);
  Matrix noise = tensor(basis_projector(0, 2), 0.5 * identity(2));
  return BipartiteState{2, 2, q * singlet().rho + (1.0 - q) * noise};
}

BipartiteState erasure_state(double q) {
  check_q(q);
  // I_2 denotes the identity on Bob's |0>,|1> subspace.
  Matrix half_qubit = 0.5 * (basis_projector(0, 3) + basis_projector(1, 3));
  Matrix noise = tensor(basis_projector(2, 3), half_qubit);
  return BipartiteState{3, 3, q * singlet(3, 3).rho + (1.0 - q) * noise};
}

BipartiteState state_rho_G(double q) {
  check_q(q);
  Matrix p0 = basis_projector(0, 2);
  Matrix half = 0.5 * identity(2);
  Matrix rho = 0.25 * (q * singlet().rho + (2.0 - q) * tensor(p0, half) +
                       q * tensor(half, p0) + (2.0 - q) * tensor(p0, p0));
  return BipartiteState{2, 2, std::move(rho)};
}

BipartiteState state_rho_GM(double q) {
  check_q(q);
  Matrix p2 = basis_projector(2, 3);
  Matrix half_qubit = 0.5 * (basis_projector(0, 3) + basis_projector(1, 3));
  Matrix rho =
      (1.0 / 9.0) * (q * singlet(3, 3).rho + (3.0 - q) * tensor(p2, half_qubit) +
                     2.0 * q * tensor(half_qubit, p2) +
                     (6.0 - 2.0 * q) * tensor(p2, p2));
  return BipartiteState{3, 3, std::move(rho)};
}

BipartiteState protocol2_map(const BipartiteState& rho0, const Matrix& sigma_a,
                             const Matrix& sigma_b) {
  const Eigen::Index d = rho0.dim_a;
  if (rho0.dim_b != d)
    throw DimensionMismatch("protocol2_map: requires dim_a = dim_b");
  if (sigma_a.rows() != d || sigma_a.cols() != d || sigma_b.rows() != d ||
      sigma_b.cols() != d)
    throw DimensionMismatch("protocol2_map: sigma dimension mismatch");
  std::string why;
  if (!is_valid_density(sigma_a, &why))
    throw InvalidParameter("protocol2_map: sigma_a invalid: " + why);
  if (!is_valid_density(sigma_b, &why))
    throw InvalidParameter("protocol2_map: sigma_b invalid: " + why);
  Matrix rho_a = partial_trace(rho0, Party::A);
  Matrix rho_b = partial_trace(rho0, Party::B);
  const double dd = static_cast<double>(d);
  Matrix out = (rho0.rho + (dd - 1.0) * (tensor(rho_a, sigma_b) + tensor(sigma_a, rho_b)) +
                (dd - 1.0) * (dd - 1.0) * tensor(sigma_a, sigma_b)) /
               (dd * dd);
  return BipartiteState{d, d, std::move(out)};
}

BipartiteState protocol2_map_one_sided(const BipartiteState& rho0,
                                       const Matrix& sigma_a) {
  const Eigen::Index d = rho0.dim_a;
  if (rho0.dim_b != d)
    throw DimensionMismatch("protocol2_map_one_sided: requires dim_a = dim_b");
  if (sigma_a.rows() != d || sigma_a.cols() != d)
    throw DimensionMismatch("protocol2_map_one_sided: sigma dimension mismatch");
  std::string why;
  if (!is_valid_density(sigma_a, &why))
    throw InvalidParameter("protocol2_map_one_sided: sigma invalid: " + why);
  Matrix rho_b = partial_trace(rho0, Party::B);
  const double dd = static_cast<double>(d);
  Matrix out = (rho0.rho + (dd - 1.0) * tensor(sigma_a, rho_b)) / dd;
  return BipartiteState{d, d, std::move(out)};
}

BipartiteState family_state(const StateFamily& f) {
  switch (f.tag) {
    case StateFamilyTag::singlet: return singlet();
    case StateFamilyTag::state_q: return state_q(f.q);
    case StateFamilyTag::rho_G: return state_rho_G(f.q);
    case StateFamilyTag::erasure: return erasure_state(f.q);
    case StateFamilyTag::rho_GM: return state_rho_GM(f.q);
  }
  throw InvalidParameter("bad family tag");
}

}  // namespace seqbell
