#include "rpspin/propagator.hpp"

#include <cmath>

#include "rpspin/errors.hpp"

namespace rpspin {

Matrix unitary_propagator(const Matrix& hamiltonian, double dt) {
  if (hamiltonian.rows() != hamiltonian.cols()) throw DomainError("Hamiltonian must be square");
  if (!(dt > 0.0)) throw DomainError("propagator time step must be positive");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(hamiltonian));
  if (solver.info() != Eigen::Success) {
    throw NumericalError("Hamiltonian eigendecomposition failed");
  }
  const auto& energies = solver.eigenvalues();
  Vector phases(energies.size());
  for (Eigen::Index k = 0; k < energies.size(); ++k) {
    phases(k) = std::polar(1.0, -energies(k) * dt);
  }
  const Matrix& v = solver.eigenvectors();
  return v * phases.asDiagonal() * v.adjoint();
}

}  // namespace rpspin
