#pragma once

#include <complex>

#include <Eigen/Dense>

namespace rpspin {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

Matrix kron(const Matrix& a, const Matrix& b);

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

/// Largest entrywise modulus; the norm every tolerance in this library refers to.
inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline double real_trace(const Matrix& m) { return m.trace().real(); }

/// Tr{a b} without forming the product.
inline Complex trace_of_product(const Matrix& a, const Matrix& b) {
  return a.cwiseProduct(b.transpose()).sum();
}

inline Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

double hermiticity_defect(const Matrix& m);

/// Smallest eigenvalue of the Hermitian part of m.
double min_eigenvalue(const Matrix& m);

/// Throws DomainError unless m is a density matrix within the given tolerances:
/// Hermitian, eigenvalues >= -eig_tol, 0 < trace <= 1 + trace_tol.
void check_density_matrix(const Matrix& m, double herm_tol = 1e-10, double eig_tol = 1e-9,
                          double trace_tol = 1e-10);

}  // namespace rpspin
