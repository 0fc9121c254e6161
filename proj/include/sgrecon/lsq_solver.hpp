#pragma once

#include <vector>

#include "sgrecon/grid_domain.hpp"
#include "sgrecon/sparse_ops.hpp"

namespace sgrecon {

/// Equality constraint z[index] = value, appended to the system as a row
/// weighted by the operator's infinity norm.
struct PinConstraint {
  int index = 0;
  double value = 1.0;
};

struct SolverOptions {
  double tol_rel = 1e-10;  // convergence on the relative normal-equation residual
  int max_iters = 0;       // 0 means 10 * columns
  std::vector<PinConstraint> pins;
};

struct LsqProblem {
  SparseOperator a;
  std::vector<double> b;
  SolverOptions options;
};

struct LsqSolution {
  std::vector<double> z;
  double residual_norm = 0.0;  // ||Az - b|| over the pin-augmented system
  int iterations = 0;
  bool converged = false;
  /// Best normal-equation residual ||A^T r|| seen up to each iteration;
  /// non-increasing by construction.
  std::vector<double> normal_residual_history;
};

/// Minimizes ||Az - b||^2 by conjugate gradients on the normal equations,
/// started from zero, which selects the minimum-norm minimizer on
/// rank-deficient systems. Pins are appended as weighted rows before
/// solving. On non-convergence the best iterate is returned with
/// converged = false. Fully deterministic for identical inputs.
LsqSolution solve(const LsqProblem& problem);

enum class GaugeMode { offset_zero_mean, scale_pin };

/// offset_zero_mean subtracts each connected component's mean.
/// scale_pin divides each component by its entry at the component's pin
/// index and negates the component if the resulting median is negative;
/// pin_indices must then hold one foreground index per component (any
/// order). Throws "degenerate pin pixel" when a pivot is below 1e-12.
std::vector<double> fix_gauge(std::vector<double> z, const PixelDomain& domain, GaugeMode mode,
                              const std::vector<int>& pin_indices = {});

/// Deterministic pin choice: the component's foreground pixel nearest its
/// centroid, ties broken by (v, u) ascending. Returns a linear index.
int pin_pixel_for_component(const PixelDomain& domain, int component);

}  // namespace sgrecon
