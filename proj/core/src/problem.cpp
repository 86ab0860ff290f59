#include "convhom/problem.hpp"

namespace convhom {

Problem::Problem(const KernelSpec& kernel, const MuSpec& mu, const ProblemOptions& options)
    : options_(options),
      grid_(kernel.dim(), options.n),
      plan_(select_truncation(kernel, options.tau, options.radius_cap)) {
  if (mu.dim() != kernel.dim()) raise(ErrorKind::configuration, "problem", "kernel and mu dimensions differ");
  assembler_ = std::make_shared<const FibreAssembler>(grid_, kernel, mu, plan_, options.assembly);
  moments_ = convhom::moments(kernel);
  A0_ = assembler_->fibre(Coord::Zero(grid_.dim())).A.real();
  A0_norm_ = operator_norm(A0_);
  stationary_ = compute_stationary(*assembler_, options.stationary);
  projectors_ = build_projectors(grid_, stationary_.q0);
  derivatives_ = assembler_->derivatives();
  coercivity_ = coercivity_constant(kernel);
  correctors_ = compute_correctors(*assembler_, A0_, stationary_.q0);
  const double lower = mu.bounds().first * stationary_.q_minus * coercivity_.C;
  model_ = assemble_g0(grid_, correctors_, stationary_.q0, lower);
  fourier_ = dft_basis(grid_);
}

void Problem::replace_q0(const RVector& q0) {
  stationary_.q0 = q0;
  stationary_.q_minus = q0.minCoeff();
  stationary_.q_plus = q0.maxCoeff();
  model_.q0 = q0;
  projectors_.P = grid_.weight() * RVector::Ones(q0.size()) * q0.transpose();
  projectors_.Q = RMatrix::Identity(q0.size(), q0.size()) - projectors_.P;
}

}  // namespace convhom
