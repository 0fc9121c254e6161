#pragma once

#include <cstdint>
#include <vector>

#include "sgrecon/grid_domain.hpp"
#include "sgrecon/lsq_solver.hpp"
#include "sgrecon/sparse_ops.hpp"

namespace sgrecon {

enum class Projection { orthographic, perspective };

/// Per-pixel unit normals over a domain's foreground ordering. Pixels whose
/// tangents were degenerate carry (0, 0, 1) and valid = 0; metrics and
/// systems should skip them.
struct NormalField {
  const PixelDomain* domain = nullptr;
  std::vector<double> nx, ny, nz;
  std::vector<std::uint8_t> valid;

  int invalid_count() const {
    int c = 0;
    for (std::uint8_t v : valid) c += v == 0;
    return c;
  }
};

/// Depth (or height) per foreground pixel. Orthographic: world units along
/// the viewing axis with p = (u, v, z). Perspective: distance along the
/// optical axis with p = ((u - c_u) z / f, (v - c_v) z / f, z).
struct DepthField {
  const PixelDomain* domain = nullptr;
  std::vector<double> z;
};

/// Optional depth prior omega * w_i * z_i = omega * w_i * z_prior_i. An empty
/// weight vector means weight one everywhere; zero-weight pixels contribute
/// no row. omega > 0 anchors the gauge, so no offset/scale fixing (nor pin
/// rows under perspective) is applied on top of it.
struct PriorOptions {
  double omega = 0.0;
  std::vector<double> z_prior;
  std::vector<double> weights;
};

struct ReconstructionOptions {
  Projection projection = Projection::orthographic;
  double lambda = 0.1;       // weight of the smoothness rows (S - I) z = 0
  OperatorConfig kernel;     // derivative/smoothing operator configuration
  SolverOptions solver;
  PriorOptions prior;
  double pin_value = 1.0;    // perspective scale anchor; must stay positive
  bool positive_nz = true;   // flip computed normals toward the camera
};

/// Differentiates the depth with the configured operators, forms projection
/// tangent vectors, and returns normalized cross products. Degenerate
/// tangents (zero cross product) mark the pixel invalid. Intrinsics are
/// required for perspective tangents and for 3D neighbor searches.
NormalField normals_from_depth(const DepthField& depth, const ReconstructionOptions& opts,
                               const CameraIntrinsics* intrinsics = nullptr);

/// Stacks diag(nz) Du z = -nx, diag(nz) Dv z = -ny, then lambda (S - I) z = 0
/// and the weighted prior rows, each block present only when its weight is
/// positive.
LsqProblem build_ortho_system(const NormalField& normals, const OperatorBundle& bundle,
                              const ReconstructionOptions& opts);

/// Homogeneous perspective tangency rows
///   (((u - c_u) nx + (v - c_v) ny) / f + nz) Du_i + (nx / f) e_i^T, and the
/// same with Dv and ny, followed by the smoothness and prior blocks. Without
/// a prior, one pin row per connected component anchors the scale through the
/// solver options.
LsqProblem build_persp_system(const NormalField& normals, const OperatorBundle& bundle,
                              const CameraIntrinsics& intrinsics,
                              const ReconstructionOptions& opts);

/// Builds the projection's system, solves it, and fixes the gauge: zero mean
/// per component (orthographic) or per-component scaling to the pin value
/// with a median sign fix (perspective); both skipped when a prior is active.
/// Pass solution to inspect convergence; non-convergence still returns the
/// best iterate.
DepthField height_from_normals(const NormalField& normals, const ReconstructionOptions& opts,
                               const CameraIntrinsics* intrinsics = nullptr,
                               LsqSolution* solution = nullptr);

}  // namespace sgrecon
