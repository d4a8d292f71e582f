#include "rpspin/spin_core.hpp"

#include <cmath>
#include <sstream>

#include "rpspin/errors.hpp"

namespace rpspin {

namespace {

int multiplicity(double spin) { return static_cast<int>(std::lround(2.0 * spin)) + 1; }

void check_nucleus(const NuclearSpinSpec& n, std::size_t index) {
  const double twice = 2.0 * n.spin;
  if (!(n.spin >= 0.5) || std::abs(twice - std::round(twice)) > 1e-12) {
    std::ostringstream os;
    os << "nucleus " << index << ": spin quantum number " << n.spin
       << " is not a positive multiple of 1/2";
    throw DomainError(os.str());
  }
  if (!std::isfinite(n.hyperfine)) {
    std::ostringstream os;
    os << "nucleus " << index << ": hyperfine constant is not finite";
    throw DomainError(os.str());
  }
}

Matrix identity(int n) { return Matrix::Identity(n, n); }

// Electron-pair (4x4) operator tensored with the nuclear identity.
Matrix embed_electron_pair(const SpinSystem& system, const Matrix& pair_op) {
  return kron(pair_op, identity(system.nuclear_dimension()));
}

}  // namespace

SpinSystem::SpinSystem(std::vector<NuclearSpinSpec> nuclei) : nuclei_(std::move(nuclei)) {
  dimension_ = 4;
  for (std::size_t k = 0; k < nuclei_.size(); ++k) {
    check_nucleus(nuclei_[k], k);
    dimension_ *= multiplicity(nuclei_[k].spin);
  }
}

std::vector<int> SpinSystem::factor_dimensions() const {
  std::vector<int> dims{2, 2};
  for (const auto& n : nuclei_) dims.push_back(multiplicity(n.spin));
  return dims;
}

Matrix spin_matrix(double spin, Axis axis) {
  const int n = multiplicity(spin);
  Matrix out = Matrix::Zero(n, n);
  // Basis index k carries m = spin - k.
  if (axis == Axis::Z) {
    for (int k = 0; k < n; ++k) out(k, k) = spin - k;
    return out;
  }
  Matrix raise = Matrix::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double m = spin - k;
    raise(k - 1, k) = std::sqrt(spin * (spin + 1.0) - m * (m + 1.0));
  }
  const Matrix lower = raise.adjoint();
  if (axis == Axis::X) return 0.5 * (raise + lower);
  return (raise - lower) / Complex(0.0, 2.0);
}

Matrix embed_spin_component(const SpinSystem& system, Site site, Axis axis) {
  const auto dims = system.factor_dimensions();
  std::size_t target = 0;
  double spin = 0.5;
  switch (site.kind) {
    case Site::Kind::Donor:
      target = 0;
      break;
    case Site::Kind::Acceptor:
      target = 1;
      break;
    case Site::Kind::Nucleus:
      if (site.nucleus >= system.nucleus_count()) {
        std::ostringstream os;
        os << "nucleus index " << site.nucleus << " out of range (system has "
           << system.nucleus_count() << " nuclei)";
        throw DomainError(os.str());
      }
      target = 2 + site.nucleus;
      spin = system.nuclei()[site.nucleus].spin;
      break;
  }
  Matrix out = Matrix::Identity(1, 1);
  for (std::size_t f = 0; f < dims.size(); ++f) {
    out = kron(out, f == target ? spin_matrix(spin, axis) : identity(dims[f]));
  }
  return out;
}

Matrix electron_spin_product(const SpinSystem& system) {
  Matrix out = Matrix::Zero(system.dimension(), system.dimension());
  for (Axis a : {Axis::X, Axis::Y, Axis::Z}) {
    out += embed_spin_component(system, Site::donor(), a) *
           embed_spin_component(system, Site::acceptor(), a);
  }
  return out;
}

Matrix singlet_projector(const SpinSystem& system) {
  return 0.25 * identity(system.dimension()) - electron_spin_product(system);
}

Matrix triplet_projector(const SpinSystem& system) {
  return 0.75 * identity(system.dimension()) + electron_spin_product(system);
}

Vector singlet_electron_state() {
  Vector v = Vector::Zero(4);
  v(1) = 1.0 / std::sqrt(2.0);
  v(2) = -1.0 / std::sqrt(2.0);
  return v;
}

Vector triplet_electron_state(int m) {
  Vector v = Vector::Zero(4);
  switch (m) {
    case 1:
      v(0) = 1.0;
      break;
    case 0:
      v(1) = 1.0 / std::sqrt(2.0);
      v(2) = 1.0 / std::sqrt(2.0);
      break;
    case -1:
      v(3) = 1.0;
      break;
    default:
      throw DomainError("triplet magnetic quantum number must be -1, 0 or +1");
  }
  return v;
}

TripletStateProjectors triplet_state_projectors(const SpinSystem& system) {
  auto proj = [&](int m) {
    const Vector t = triplet_electron_state(m);
    return embed_electron_pair(system, t * t.adjoint());
  };
  return {proj(0), proj(1), proj(-1)};
}

Matrix build_hamiltonian(const SpinSystem& system, const HamiltonianSpec& spec) {
  if (!std::isfinite(spec.larmor) || !std::isfinite(spec.exchange)) {
    throw DomainError("Hamiltonian parameters must be finite");
  }
  const int d = system.dimension();
  Matrix h = Matrix::Zero(d, d);
  if (spec.larmor != 0.0) {
    h += spec.larmor * (embed_spin_component(system, Site::donor(), Axis::Z) +
                        embed_spin_component(system, Site::acceptor(), Axis::Z));
  }
  for (std::size_t k = 0; k < system.nucleus_count(); ++k) {
    const auto& n = system.nuclei()[k];
    if (n.hyperfine == 0.0) continue;
    const Site electron = n.coupled_to == Electron::Donor ? Site::donor() : Site::acceptor();
    for (Axis a : {Axis::X, Axis::Y, Axis::Z}) {
      h += n.hyperfine * embed_spin_component(system, electron, a) *
           embed_spin_component(system, Site::nucleus_at(k), a);
    }
  }
  if (spec.exchange != 0.0) h += spec.exchange * electron_spin_product(system);
  return h;
}

Matrix singlet_initial_density(const SpinSystem& system) {
  const Matrix qs = singlet_projector(system);
  return qs / real_trace(qs);
}

Projectors Projectors::of(const SpinSystem& system) {
  return {system.dimension(), singlet_projector(system), triplet_projector(system),
          triplet_state_projectors(system)};
}

Vector product_state(const SpinSystem& system, const Vector& electron_state, int nuclear_index) {
  const int nd = system.nuclear_dimension();
  if (electron_state.size() != 4) throw DomainError("electron state must have dimension 4");
  if (nuclear_index < 0 || nuclear_index >= nd) {
    std::ostringstream os;
    os << "nuclear basis index " << nuclear_index << " out of range [0, " << nd << ")";
    throw DomainError(os.str());
  }
  Vector nuclear = Vector::Zero(nd);
  nuclear(nuclear_index) = 1.0;
  return kron(electron_state, nuclear);
}

}  // namespace rpspin
