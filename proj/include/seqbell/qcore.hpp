#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace seqbell {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Validity tolerances for operators and states (double precision leaves huge
// margin at dimensions <= 9).
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;
inline constexpr Eigen::Index kMaxTotalDim = 64;

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NotHermitian : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NotDichotomic : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct InvalidPovm : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct InvalidParameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NonUnitVector : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct InvalidStateFile : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ZeroSuccessProbability : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bipartite density matrix with explicit local dimensions.
/// Composite basis index convention: |a,b> -> a*dim_b + b, row-major over A
/// then B. Every tensor/trace/transpose routine below uses this convention.
struct BipartiteState {
  Eigen::Index dim_a = 0;
  Eigen::Index dim_b = 0;
  Matrix rho;

  Eigen::Index dim() const { return dim_a * dim_b; }
};

/// Real spectrum in descending order with matching orthonormal eigenvectors
/// as columns.
struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;
  Matrix eigenvectors;
};

enum class Party { A, B };

// -- small constructors ------------------------------------------------------

Matrix identity(Eigen::Index d);
Vector basis_ket(Eigen::Index i, Eigen::Index d);
Matrix projector(const Vector& v);  // |v><v| / <v|v>
Matrix basis_projector(Eigen::Index i, Eigen::Index d);

const Matrix& pauli_x();
const Matrix& pauli_y();
const Matrix& pauli_z();
Matrix bloch_operator(const Eigen::Vector3d& n);  // n . sigma, any real n

// -- predicates and metrics --------------------------------------------------

double max_abs(const Matrix& m);
bool is_hermitian(const Matrix& m, double tol = kHermitianTol);

/// Validates Hermiticity, unit trace, positivity and dimension consistency.
/// Returns false and fills `why` (when non-null) instead of throwing.
bool is_valid_state(const BipartiteState& s, std::string* why = nullptr);

/// Checked constructor; throws on any violated state invariant.
BipartiteState make_state(Eigen::Index dim_a, Eigen::Index dim_b, Matrix rho);

/// Validates a local density operator (Hermitian, unit trace, PSD).
bool is_valid_density(const Matrix& m, std::string* why = nullptr);

/// 0.5 * trace norm of (a - b); both must be Hermitian of equal size.
double trace_distance(const Matrix& a, const Matrix& b);

// -- operations --------------------------------------------------------------

/// Kronecker product of square matrices; rejects total dimension > 64.
Matrix tensor(const Matrix& a, const Matrix& b);

/// Trace over the discarded subsystem; `keep` names the surviving one.
Matrix partial_trace(const BipartiteState& s, Party keep);

/// Transpose of the B-subsystem blocks (trace and Hermiticity preserved).
Matrix partial_transpose(const BipartiteState& s);

/// Full spectrum of a Hermitian matrix, eigenvalues descending.
/// Throws NotHermitian when ||m - m^dag||_max > 1e-9.
SpectralDecomposition hermitian_eigen(const Matrix& m);

/// Smallest eigenvalue of the partial transpose. Negative certifies
/// entanglement (NPT); for 2x2 and 2x3 systems, nonnegative certifies
/// separability.
double min_eig_partial_transpose(const BipartiteState& s);

}  // namespace seqbell
