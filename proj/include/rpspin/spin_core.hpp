#pragma once

#include <cstddef>
#include <vector>

#include "rpspin/linalg.hpp"

namespace rpspin {

enum class Electron { Donor, Acceptor };

enum class Axis { X, Y, Z };

/// A magnetic nucleus hyperfine-coupled to one of the two radical electrons.
/// `hyperfine` is an angular frequency; the whole library works in units of
/// the reference hyperfine constant A.
struct NuclearSpinSpec {
  double spin = 0.5;
  Electron coupled_to = Electron::Donor;
  double hyperfine = 1.0;
};

/// Two electrons plus M nuclei. Tensor factors are ordered
/// (donor electron, acceptor electron, nucleus 1, ..., nucleus M).
class SpinSystem {
 public:
  SpinSystem() = default;
  explicit SpinSystem(std::vector<NuclearSpinSpec> nuclei);

  const std::vector<NuclearSpinSpec>& nuclei() const { return nuclei_; }
  std::size_t nucleus_count() const { return nuclei_.size(); }
  /// Hilbert-space dimension d = 4 * prod(2 I_j + 1).
  int dimension() const { return dimension_; }
  /// prod(2 I_j + 1): the dimension of the nuclear factor.
  int nuclear_dimension() const { return dimension_ / 4; }
  /// Dimension of each tensor factor in order.
  std::vector<int> factor_dimensions() const;

 private:
  std::vector<NuclearSpinSpec> nuclei_;
  int dimension_ = 4;
};

/// One tensor factor of a SpinSystem.
struct Site {
  enum class Kind { Donor, Acceptor, Nucleus };
  Kind kind = Kind::Donor;
  std::size_t nucleus = 0;

  static Site donor() { return {Kind::Donor, 0}; }
  static Site acceptor() { return {Kind::Acceptor, 0}; }
  static Site nucleus_at(std::size_t k) { return {Kind::Nucleus, k}; }
};

/// Spin matrix of a single spin-`spin` particle in the |m = spin>, ..., |m = -spin> basis.
Matrix spin_matrix(double spin, Axis axis);

/// Single-site spin component embedded in the full d-dimensional space.
Matrix embed_spin_component(const SpinSystem& system, Site site, Axis axis);

/// s_D . s_A
Matrix electron_spin_product(const SpinSystem& system);

Matrix singlet_projector(const SpinSystem& system);
Matrix triplet_projector(const SpinSystem& system);

/// |T_j><T_j| (x) 1_nuclear for the three triplet states.
struct TripletStateProjectors {
  Matrix t0;
  Matrix t_plus;
  Matrix t_minus;
};

TripletStateProjectors triplet_state_projectors(const SpinSystem& system);

struct HamiltonianSpec {
  double larmor = 0.0;    // omega, multiplies s_Dz + s_Az
  double exchange = 0.0;  // J, multiplies s_D . s_A
};

/// H = omega (s_Dz + s_Az) + sum_j A_j s_e(j) . I_j + J s_D . s_A
Matrix build_hamiltonian(const SpinSystem& system, const HamiltonianSpec& spec);

/// rho0 = Q_S / Tr{Q_S}: electron singlet, unpolarized nuclei.
Matrix singlet_initial_density(const SpinSystem& system);

/// Precomputed projectors shared by the coherence, dynamics and trajectory code.
struct Projectors {
  int dimension = 0;
  Matrix singlet;
  Matrix triplet;
  TripletStateProjectors triplets;

  static Projectors of(const SpinSystem& system);
};

/// Electron-pair basis states in the |uu>, |ud>, |du>, |dd> ordering.
Vector singlet_electron_state();
Vector triplet_electron_state(int m);  // m in {+1, 0, -1}

/// |electron> (x) |nuclear basis state `index`>.
Vector product_state(const SpinSystem& system, const Vector& electron_state, int nuclear_index);

}  // namespace rpspin
