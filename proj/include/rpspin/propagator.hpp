#pragma once

#include "rpspin/linalg.hpp"

namespace rpspin {

/// exp(-i H dt) for Hermitian H, via eigendecomposition.
Matrix unitary_propagator(const Matrix& hamiltonian, double dt);

}  // namespace rpspin
