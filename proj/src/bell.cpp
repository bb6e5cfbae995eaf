#include "seqbell/bell.hpp"

#include <cmath>

namespace seqbell {

namespace {

void require_two_qubit(const BipartiteState& s, const char* who) {
  if (s.dim_a != 2 || s.dim_b != 2)
    throw DimensionMismatch(std::string(who) +
                            ": requires a 2x2 state (filter/project first)");
}

void require_unit(const BlochVector& v, const char* who) {
  if (std::abs(v.norm() - 1.0) > 1e-12)
    throw NonUnitVector(std::string(who) + ": direction must be unit norm");
}

const Matrix& sigma(int i) {
  switch (i) {
    case 0: return pauli_x();
    case 1: return pauli_y();
    default: return pauli_z();
  }
}

}  // namespace

bool is_valid_povm(const Povm& m, Eigen::Index dim, std::string* why) {
  auto fail = [&](const char* msg) {
    if (why) *why = msg;
    return false;
  };
  if (m.elements.empty()) return fail("no elements");
  Matrix sum = Matrix::Zero(dim, dim);
  for (const Matrix& e : m.elements) {
    if (e.rows() != dim || e.cols() != dim) return fail("element size mismatch");
    if (!is_hermitian(e, 1e-10)) return fail("element not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> es(e, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kPsdTol)
      return fail("element not positive semidefinite");
    sum += e;
  }
  if (max_abs(sum - identity(dim)) > 1e-9)
    return fail("elements do not sum to the identity");
  return true;
}

Povm projectors_from_bloch(const BlochVector& x) {
  require_unit(x, "projectors_from_bloch");
  Matrix op = bloch_operator(x);
  Povm p;
  p.elements.push_back(0.5 * (identity(2) + op));
  p.elements.push_back(0.5 * (identity(2) - op));
  return p;
}

Povm povm_from_observable(const Matrix& obs) {
  if (!is_hermitian(obs, 1e-9))
    throw NotHermitian("povm_from_observable: observable not Hermitian");
  const Eigen::Index d = obs.rows();
  Povm p;
  p.elements.push_back(0.5 * (identity(d) + obs));
  p.elements.push_back(0.5 * (identity(d) - obs));
  std::string why;
  if (!is_valid_povm(p, d, &why))
    throw InvalidPovm("povm_from_observable: " + why);
  return p;
}

JointDistribution born_joint(const BipartiteState& s, const Povm& povm_a,
                             const Povm& povm_b) {
  std::string why;
  if (!is_valid_povm(povm_a, s.dim_a, &why))
    throw InvalidPovm("born_joint: Alice POVM invalid: " + why);
  if (!is_valid_povm(povm_b, s.dim_b, &why))
    throw InvalidPovm("born_joint: Bob POVM invalid: " + why);
  const auto na = static_cast<Eigen::Index>(povm_a.elements.size());
  const auto nb = static_cast<Eigen::Index>(povm_b.elements.size());
  JointDistribution out;
  out.p = Eigen::MatrixXd(na, nb);
  for (Eigen::Index i = 0; i < na; ++i)
    for (Eigen::Index j = 0; j < nb; ++j) {
      Complex tr = (tensor(povm_a.elements[i], povm_b.elements[j]) * s.rho).trace();
      out.p(i, j) = tr.real();
    }
  for (Eigen::Index i = 0; i < na; ++i) out.labels_a.push_back(static_cast<int>(i));
  for (Eigen::Index j = 0; j < nb; ++j) out.labels_b.push_back(static_cast<int>(j));
  return out;
}

// Dichotomic tables use outcome index 0 <-> value +1, index 1 <-> value -1
// (matching the element order of projectors_from_bloch / povm_from_observable).

double correlator_of(const JointDistribution& d) {
  if (d.p.rows() != 2 || d.p.cols() != 2)
    throw InvalidParameter("correlator_of: not a dichotomic table");
  return d.p(0, 0) - d.p(0, 1) - d.p(1, 0) + d.p(1, 1);
}

double marginal_a(const JointDistribution& d) {
  if (d.p.rows() != 2)
    throw InvalidParameter("marginal_a: not a dichotomic table");
  return d.p.row(0).sum() - d.p.row(1).sum();
}

double marginal_b(const JointDistribution& d) {
  if (d.p.cols() != 2)
    throw InvalidParameter("marginal_b: not a dichotomic table");
  return d.p.col(0).sum() - d.p.col(1).sum();
}

double correlator(const BipartiteState& s, const BlochVector& x,
                  const BlochVector& y) {
  require_two_qubit(s, "correlator");
  return correlator_of(
      born_joint(s, projectors_from_bloch(x), projectors_from_bloch(y)));
}

CorrelationMatrix correlation_matrix(const BipartiteState& s) {
  require_two_qubit(s, "correlation_matrix");
  CorrelationMatrix t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      t(i, j) = (tensor(sigma(i), sigma(j)) * s.rho).trace().real();
  return t;
}

double horodecki_S(const BipartiteState& s) {
  CorrelationMatrix t = correlation_matrix(s);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(t.transpose() * t,
                                                    Eigen::EigenvaluesOnly);
  // eigenvalues ascending: keep the two largest (clamp rounding negatives)
  return 2.0 * std::sqrt(std::max(es.eigenvalues()(1) + es.eigenvalues()(2), 0.0));
}

ChshSettings optimal_chsh_settings(const BipartiteState& s) {
  CorrelationMatrix t = correlation_matrix(s);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(t.transpose() * t);
  // descending order of T^T T eigenvalues (squared singular values of T)
  const double t1 = es.eigenvalues()(2);
  const double t2 = es.eigenvalues()(1);
  ChshSettings c;
  if (t1 < 1e-12) {
    // Degenerate (vanishing correlations): canonical axes.
    c.a1 = BlochVector::UnitZ();
    c.a2 = BlochVector::UnitX();
    c.b1 = (BlochVector::UnitZ() + BlochVector::UnitX()).normalized();
    c.b2 = (BlochVector::UnitZ() - BlochVector::UnitX()).normalized();
    return c;
  }
  const BlochVector v1 = es.eigenvectors().col(2);
  const BlochVector v2 = es.eigenvectors().col(1);
  const double s1 = std::sqrt(t1);
  const double s2 = std::sqrt(std::max(t2, 0.0));
  // Left principal directions; u1^T T = s1 v1^T fixes the signs so that each
  // correlator in S comes out nonnegative.
  const BlochVector u1 = (t * v1) / s1;
  BlochVector u2;
  if (s2 > 1e-12) {
    u2 = (t * v2) / s2;
  } else {
    u2 = u1.unitOrthogonal();  // contribution cancels between the two terms
  }
  c.a1 = u1;
  c.a2 = u2;
  c.b1 = (s1 * v1 + s2 * v2).normalized();
  c.b2 = (s1 * v1 - s2 * v2).normalized();
  return c;
}

double chsh_value(const BipartiteState& s, const ChshSettings& c) {
  require_two_qubit(s, "chsh_value");
  return correlator(s, c.a1, c.b1) + correlator(s, c.a1, c.b2) +
         correlator(s, c.a2, c.b1) - correlator(s, c.a2, c.b2);
}

BipartiteState restrict_to_qubits(const BipartiteState& s) {
  if (s.dim_a < 2 || s.dim_b < 2)
    throw DimensionMismatch("restrict_to_qubits: local dimensions must be >= 2");
  Matrix block(4, 4);
  const Eigen::Index idx[2] = {0, 1};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int ap = 0; ap < 2; ++ap)
        for (int bp = 0; bp < 2; ++bp)
          block(a * 2 + b, ap * 2 + bp) =
              s.rho(idx[a] * s.dim_b + idx[b], idx[ap] * s.dim_b + idx[bp]);
  const double weight = block.trace().real();
  if (weight <= 1e-300)
    throw ZeroSuccessProbability("restrict_to_qubits: no qubit-block weight");
  return BipartiteState{2, 2, block / weight};
}

}  // namespace seqbell
