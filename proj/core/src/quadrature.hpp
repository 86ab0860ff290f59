#pragma once

// Adaptive Gauss-Kronrod integration of weighted kernel pieces over
// axis-aligned boxes (internal).

#include "convhom/kernel_model.hpp"

#include <functional>
#include <limits>
#include <vector>

namespace convhom::detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Axis-aligned box; infinite bounds allowed, clipped to the effective support.
struct Box {
  double lo[2] = {-kInf, -kInf};
  double hi[2] = {kInf, kInf};
};

using Weight = std::function<double(const double* z)>;

/// int_[a, b] f, split at the interior breakpoints, relative tolerance tol.
double integrate_1d(const std::function<double(double)>& f, double a, double b,
                    std::vector<double> breaks, double tol);

/// int_box weight(z) a_c(z) dz for one component, d in {1, 2}.
double integrate_component(const KernelComponent& c, int dim, const Weight& weight, const Box& box,
                           double tol);

/// Sum of integrate_component over all components of the spec.
double integrate_kernel(const KernelSpec& spec, const Weight& weight, const Box& box, double tol);

/// Per-axis interval outside which the component density is negligible
/// (below exp(-100) relative) or exactly zero.
void effective_support(const KernelComponent& c, int axis, double& lo, double& hi);

/// Density of one component at z.
double component_density(const KernelComponent& c, int dim, const double* z);

}  // namespace convhom::detail
