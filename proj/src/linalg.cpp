#include "rpspin/linalg.hpp"

#include <cmath>
#include <sstream>

#include "rpspin/errors.hpp"

namespace rpspin {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

double hermiticity_defect(const Matrix& m) { return max_abs(m - m.adjoint()); }

double min_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(m), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigenvalue computation failed");
  }
  return solver.eigenvalues().minCoeff();
}

void check_density_matrix(const Matrix& m, double herm_tol, double eig_tol, double trace_tol) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DomainError("density matrix must be square and non-empty");
  }
  if (!m.allFinite()) {
    throw DomainError("density matrix has non-finite entries");
  }
  const double defect = hermiticity_defect(m);
  if (defect > herm_tol) {
    std::ostringstream os;
    os << "density matrix not Hermitian (defect " << defect << ")";
    throw DomainError(os.str());
  }
  const double tr = real_trace(m);
  if (!(tr > 0.0) || tr > 1.0 + trace_tol) {
    std::ostringstream os;
    os << "density matrix trace " << tr << " outside (0, 1]";
    throw DomainError(os.str());
  }
  const double lo = min_eigenvalue(m);
  if (lo < -eig_tol) {
    std::ostringstream os;
    os << "density matrix has negative eigenvalue " << lo;
    throw DomainError(os.str());
  }
}

}  // namespace rpspin
