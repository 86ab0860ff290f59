#pragma once

// One discretized problem: kernel, coefficient, grid, and everything the
// effective model needs (q0, projectors, derivatives, correctors, g0).

#include "convhom/effective_model.hpp"
#include "convhom/fibre_operator.hpp"
#include "convhom/kernel_model.hpp"
#include "convhom/stationary_state.hpp"

#include <array>
#include <memory>

namespace convhom {

struct ProblemOptions {
  int n = 64;
  double tau = 1e-12;
  int radius_cap = 64;
  AssemblyTolerances assembly;
  StationaryTolerances stationary;
};

class Problem {
 public:
  Problem(const KernelSpec& kernel, const MuSpec& mu, const ProblemOptions& options);

  const CellGrid& grid() const noexcept { return grid_; }
  const KernelSpec& kernel() const noexcept { return assembler_->kernel(); }
  const MuSpec& mu() const noexcept { return assembler_->mu(); }
  const TruncationPlan& plan() const noexcept { return plan_; }
  const FibreAssembler& assembler() const noexcept { return *assembler_; }
  const std::array<double, 4>& moments() const noexcept { return moments_; }
  std::pair<double, double> mu_bounds() const noexcept { return assembler_->mu().bounds(); }
  const RMatrix& A0() const noexcept { return A0_; }
  double A0_norm() const noexcept { return A0_norm_; }
  const StationaryDensity& stationary() const noexcept { return stationary_; }
  const RVector& q0() const noexcept { return stationary_.q0; }
  const ProjectorSet& projectors() const noexcept { return projectors_; }
  const DerivativeStack& derivatives() const noexcept { return derivatives_; }
  const CoercivityEstimate& coercivity() const noexcept { return coercivity_; }
  const CorrectorSet& correctors() const noexcept { return correctors_; }
  const EffectiveModel& model() const noexcept { return model_; }
  const FourierBasis& fourier() const noexcept { return fourier_; }
  const ProblemOptions& options() const noexcept { return options_; }

  /// Test hook: overwrite q0 everywhere it is cached, without re-solving.
  void replace_q0(const RVector& q0);

 private:
  ProblemOptions options_;
  CellGrid grid_;
  TruncationPlan plan_;
  std::shared_ptr<const FibreAssembler> assembler_;
  std::array<double, 4> moments_{};
  RMatrix A0_;
  double A0_norm_ = 0.0;
  StationaryDensity stationary_;
  ProjectorSet projectors_;
  DerivativeStack derivatives_;
  CoercivityEstimate coercivity_;
  CorrectorSet correctors_;
  EffectiveModel model_;
  FourierBasis fourier_;
};

}  // namespace convhom
