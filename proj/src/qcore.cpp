#include "seqbell/qcore.hpp"

#include <cmath>

namespace seqbell {

Matrix identity(Eigen::Index d) { return Matrix::Identity(d, d); }

Vector basis_ket(Eigen::Index i, Eigen::Index d) {
  if (i < 0 || i >= d) throw InvalidParameter("basis_ket: index out of range");
  Vector v = Vector::Zero(d);
  v(i) = Complex(1.0, 0.0);
  return v;
}

Matrix projector(const Vector& v) {
  double n2 = v.squaredNorm();
  if (n2 <= 0.0) throw InvalidParameter("projector: zero vector");
  return (v * v.adjoint()) / n2;
}

Matrix basis_projector(Eigen::Index i, Eigen::Index d) {
  Matrix p = Matrix::Zero(d, d);
  p(i, i) = Complex(1.0, 0.0);
  return p;
}

const Matrix& pauli_x() {
  static const Matrix m = [] {
    Matrix x(2, 2);
    x << 0, 1, 1, 0;
    return x;
  }();
  return m;
}

const Matrix& pauli_y() {
  static const Matrix m = [] {
    Matrix y(2, 2);
    y << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return y;
  }();
  return m;
}

const Matrix& pauli_z() {
  static const Matrix m = [] {
    Matrix z(2, 2);
    z << 1, 0, 0, -1;
    return z;
  }();
  return m;
}

Matrix bloch_operator(const Eigen::Vector3d& n) {
  return n.x() * pauli_x() + n.y() * pauli_y() + n.z() * pauli_z();
}

double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool is_hermitian(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return max_abs(m - m.adjoint()) <= tol;
}

bool is_valid_state(const BipartiteState& s, std::string* why) {
  auto fail = [&](const char* msg) {
    if (why) *why = msg;
    return false;
  };
  if (s.dim_a < 1 || s.dim_b < 1) return fail("nonpositive local dimension");
  if (s.rho.rows() != s.dim() || s.rho.cols() != s.dim())
    return fail("matrix size does not match dim_a*dim_b");
  if (!s.rho.allFinite()) return fail("non-finite entry");
  if (!is_hermitian(s.rho)) return fail("not Hermitian");
  if (std::abs(s.rho.trace().real() - 1.0) > kTraceTol ||
      std::abs(s.rho.trace().imag()) > kTraceTol)
    return fail("trace differs from 1");
  Eigen::SelfAdjointEigenSolver<Matrix> es(s.rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kPsdTol)
    return fail("negative eigenvalue beyond PSD slack");
  return true;
}

BipartiteState make_state(Eigen::Index dim_a, Eigen::Index dim_b, Matrix rho) {
  BipartiteState s{dim_a, dim_b, std::move(rho)};
  std::string why;
  if (!is_valid_state(s, &why))
    throw InvalidParameter("make_state: " + why);
  return s;
}

bool is_valid_density(const Matrix& m, std::string* why) {
  auto fail = [&](const char* msg) {
    if (why) *why = msg;
    return false;
  };
  if (m.rows() != m.cols() || m.rows() < 1) return fail("not square");
  if (!m.allFinite()) return fail("non-finite entry");
  if (!is_hermitian(m)) return fail("not Hermitian");
  if (std::abs(m.trace().real() - 1.0) > kTraceTol ||
      std::abs(m.trace().imag()) > kTraceTol)
    return fail("trace differs from 1");
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kPsdTol)
    return fail("negative eigenvalue beyond PSD slack");
  return true;
}

double trace_distance(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch("trace_distance: size mismatch");
  Matrix d = a - b;
  if (!is_hermitian(d, 1e-9))
    throw NotHermitian("trace_distance: difference not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(d, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

Matrix tensor(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols())
    throw DimensionMismatch("tensor: operands must be square");
  if (a.rows() * b.rows() > kMaxTotalDim)
    throw DimensionMismatch("tensor: total dimension exceeds 64");
  const Eigen::Index da = a.rows(), db = b.rows();
  Matrix out(da * db, da * db);
  for (Eigen::Index i = 0; i < da; ++i)
    for (Eigen::Index j = 0; j < da; ++j)
      out.block(i * db, j * db, db, db) = a(i, j) * b;
  return out;
}

Matrix partial_trace(const BipartiteState& s, Party keep) {
  const Eigen::Index da = s.dim_a, db = s.dim_b;
  if (s.rho.rows() != da * db || s.rho.cols() != da * db)
    throw DimensionMismatch("partial_trace: matrix size mismatch");
  if (keep == Party::A) {
    Matrix out = Matrix::Zero(da, da);
    for (Eigen::Index a = 0; a < da; ++a)
      for (Eigen::Index ap = 0; ap < da; ++ap)
        for (Eigen::Index b = 0; b < db; ++b)
          out(a, ap) += s.rho(a * db + b, ap * db + b);
    return out;
  }
  Matrix out = Matrix::Zero(db, db);
  for (Eigen::Index b = 0; b < db; ++b)
    for (Eigen::Index bp = 0; bp < db; ++bp)
      for (Eigen::Index a = 0; a < da; ++a)
        out(b, bp) += s.rho(a * db + b, a * db + bp);
  return out;
}

Matrix partial_transpose(const BipartiteState& s) {
  const Eigen::Index da = s.dim_a, db = s.dim_b;
  if (s.rho.rows() != da * db || s.rho.cols() != da * db)
    throw DimensionMismatch("partial_transpose: matrix size mismatch");
  Matrix out(da * db, da * db);
  for (Eigen::Index a = 0; a < da; ++a)
    for (Eigen::Index ap = 0; ap < da; ++ap)
      for (Eigen::Index b = 0; b < db; ++b)
        for (Eigen::Index bp = 0; bp < db; ++bp)
          out(a * db + b, ap * db + bp) = s.rho(a * db + bp, ap * db + b);
  return out;
}

SpectralDecomposition hermitian_eigen(const Matrix& m) {
  if (m.rows() != m.cols())
    throw DimensionMismatch("hermitian_eigen: not square");
  if (!is_hermitian(m, 1e-9))
    throw NotHermitian("hermitian_eigen: matrix not Hermitian within 1e-9");
  // Symmetrize to kill the sub-tolerance asymmetry before solving.
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()));
  const Eigen::Index n = m.rows();
  SpectralDecomposition out;
  out.eigenvalues = es.eigenvalues().reverse();
  out.eigenvectors = Matrix(n, n);
  for (Eigen::Index k = 0; k < n; ++k)
    out.eigenvectors.col(k) = es.eigenvectors().col(n - 1 - k);
  return out;
}

double min_eig_partial_transpose(const BipartiteState& s) {
  Matrix pt = partial_transpose(s);
  Eigen::SelfAdjointEigenSolver<Matrix> es(pt, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace seqbell
