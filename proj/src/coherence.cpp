#include "rpspin/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rpspin/errors.hpp"
#include "rpspin/propagator.hpp"

namespace rpspin {

namespace {

void check_shape(const Matrix& rho, const Projectors& proj) {
  if (rho.rows() != proj.dimension || rho.cols() != proj.dimension) {
    std::ostringstream os;
    os << "matrix is " << rho.rows() << "x" << rho.cols() << ", spin system has dimension "
       << proj.dimension;
    throw DomainError(os.str());
  }
}

double clamped_sqrt(double radicand) {
  if (radicand < 0.0) {
    if (radicand < -kRadicandTolerance) {
      std::ostringstream os;
      os << "negative coherence radicand " << radicand;
      throw NumericalError(os.str());
    }
    return 0.0;
  }
  return std::sqrt(radicand);
}

}  // namespace

Partition partition(const Matrix& rho, const Projectors& proj) {
  check_shape(rho, proj);
  const Matrix s_rho = proj.singlet * rho;
  const Matrix t_rho = proj.triplet * rho;
  return {s_rho * proj.singlet, t_rho * proj.triplet, s_rho * proj.triplet, t_rho * proj.singlet};
}

double coherence_C(const Matrix& rho, const Projectors& proj) {
  check_shape(rho, proj);
  const Matrix st = proj.singlet * rho * proj.triplet;
  const Matrix ts = proj.triplet * rho * proj.singlet;
  double total = 0.0;
  for (const Matrix* p : {&proj.triplets.t0, &proj.triplets.t_plus, &proj.triplets.t_minus}) {
    total += clamped_sqrt(trace_of_product(st * *p, ts).real());
  }
  return total;
}

double pcoh_old(const Matrix& rho, const Projectors& proj) {
  const Partition parts = partition(rho, proj);
  const double s = real_trace(parts.ss);
  const double t = real_trace(parts.tt);
  if (!(s > 0.0) || !(t > 0.0)) {
    throw UndefinedMeasureError("old coherence measure needs Tr{rho_SS} > 0 and Tr{rho_TT} > 0");
  }
  return trace_of_product(parts.st, parts.ts).real() / (s * t);
}

CoherenceContext max_unitary_coherence(const Matrix& hamiltonian, const Matrix& rho0, double t_end,
                                       double dt, const Projectors& proj) {
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  if (!(t_end >= dt)) throw DomainError("t_end must be at least dt");
  check_shape(rho0, proj);
  const auto steps = static_cast<long>(std::llround(t_end / dt));
  const Matrix u = unitary_propagator(hamiltonian, dt);
  const Matrix u_dag = u.adjoint();
  Matrix rho = rho0;
  CoherenceContext ctx;
  ctx.c_max = coherence_C(rho, proj);
  for (long k = 0; k < steps; ++k) {
    rho = u * rho * u_dag;
    ctx.c_max = std::max(ctx.c_max, coherence_C(rho, proj));
  }
  return ctx;
}

double pcoh_new_unclamped(const Matrix& rho, const CoherenceContext& ctx,
                          const Projectors& proj) {
  const double tr = real_trace(rho);
  if (!(tr > 0.0)) throw DomainError("p_coh needs Tr{rho} > 0");
  if (ctx.c_max < ctx.epsilon_cmax) return 0.0;
  return coherence_C(rho, proj) / (tr * ctx.c_max);
}

double pcoh_new(const Matrix& rho, const CoherenceContext& ctx, const Projectors& proj) {
  return std::clamp(pcoh_new_unclamped(rho, ctx, proj), 0.0, 1.0);
}

Matrix rho_coh(const Matrix& rho, double p, const Projectors& proj) {
  if (!(p > kPcohEpsilon)) {
    std::ostringstream os;
    os << "cannot distill coherence at p_coh = " << p;
    throw SingularDecompositionError(os.str());
  }
  const Partition parts = partition(rho, proj);
  return parts.incoherent() + parts.coherent() / p;
}

Matrix rho_incoh(const Matrix& rho, const Projectors& proj) {
  return partition(rho, proj).incoherent();
}

Matrix kraus_dephase(const Matrix& rho, double lambda, const Projectors& proj) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    std::ostringstream os;
    os << "dephasing factor " << lambda << " outside [0, 1]";
    throw DomainError(os.str());
  }
  check_shape(rho, proj);
  const Matrix k1 = std::sqrt(1.0 - lambda) * proj.singlet;
  const Matrix k2 = std::sqrt(1.0 - lambda) * proj.triplet;
  const double k3 = std::sqrt(lambda);
  return k1 * rho * k1.adjoint() + k2 * rho * k2.adjoint() + (k3 * k3) * rho;
}

}  // namespace rpspin
