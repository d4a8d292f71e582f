#pragma once

#include <cmath>
#include <random>

#include "rpspin/linalg.hpp"
#include "rpspin/spin_core.hpp"

namespace rpspin::testing {

/// Random density matrix: G G^dagger / Tr with complex Gaussian G.
inline Matrix random_density(int d, std::mt19937_64& gen, double trace = 1.0) {
  std::normal_distribution<double> n;
  Matrix g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = Complex(n(gen), n(gen));
  Matrix rho = g * g.adjoint();
  return rho * (trace / rho.trace().real());
}

inline Vector random_unit_vector(int d, std::mt19937_64& gen) {
  std::normal_distribution<double> n;
  Vector v(d);
  for (int i = 0; i < d; ++i) v(i) = Complex(n(gen), n(gen));
  return v / v.norm();
}

/// exp(m) by scaling and squaring of a truncated Taylor series. Independent of
/// the eigendecomposition used by the library.
inline Matrix taylor_expm(const Matrix& m) {
  double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = norm > 0.5 ? static_cast<int>(std::ceil(std::log2(norm / 0.5))) : 0;
  Matrix a = m / std::ldexp(1.0, squarings);
  Matrix term = Matrix::Identity(m.rows(), m.cols());
  Matrix sum = term;
  for (int k = 1; k <= 20; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

/// One donor-coupled spin-1/2 nucleus, A = 1, omega = 0.1.
inline SpinSystem one_nucleus_system() { return SpinSystem({NuclearSpinSpec{}}); }

inline Matrix reference_hamiltonian(const SpinSystem& system) {
  return build_hamiltonian(system, HamiltonianSpec{0.1, 0.0});
}

}  // namespace rpspin::testing
