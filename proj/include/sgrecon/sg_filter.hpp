#pragma once

#include <vector>

#include "sgrecon/grid_domain.hpp"

namespace sgrecon {

enum class KernelKind { sg, fw, bw, c, sc };
enum class KernelTarget { smooth, deriv_u, deriv_v };
enum class Axis { u, v };

/// A pixel-offset stencil. Smoothing kernels sum to 1, derivative kernels
/// sum to 0 and reproduce exact partial derivatives of polynomials up to
/// total degree `order` at the center.
struct SgKernel {
  std::vector<PixelOffset> offsets;
  std::vector<double> weights;
  KernelTarget target = KernelTarget::smooth;
  int order = 0;  // effective polynomial order of exactness
};

/// Vandermonde-style matrix of the local polynomial fit: row i holds the
/// monomials du_i^a dv_i^b of member i, columns ordered lexicographically
/// by (a,b): (0,0),(0,1),...,(0,k),(1,0),...,(k,0).
struct DesignMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> entries;  // row-major
  double at(int i, int j) const { return entries[static_cast<std::size_t>(i) * cols + j]; }
};

/// Number of bivariate monomials of total degree <= k.
constexpr int monomial_count(int k) { return (k + 1) * (k + 2) / 2; }

/// Builds the design matrix for a neighborhood at polynomial order k.
/// Throws "order too high for neighborhood" when the neighborhood has
/// fewer members than coefficients.
DesignMatrix design_matrix(const Neighborhood& neighborhood, int k);

/// Least-squares kernel for the requested target (polynomial coefficient
/// a00, a10 or a01) as the matching row of the design matrix pseudoinverse,
/// computed by singular value decomposition with truncation threshold
/// max(m,c)*eps*sigma_max. Orders where the target coefficient is not
/// identifiable from the neighborhood (its unit vector falls outside the
/// design matrix row space) are retried at k-1; the effective order is
/// recorded on the kernel. Throws "degenerate neighborhood" when a
/// derivative target stays unidentifiable down to k=1.
SgKernel sg_kernel(const Neighborhood& neighborhood, int k, KernelTarget target);

/// Fixed finite-difference stencils: forward, backward, central, and the
/// 3x3 smoothed-central kernel (1/12)[[-1,0,1],[-4,0,4],[-1,0,1]] with u
/// horizontal. kind must not be KernelKind::sg.
SgKernel classic_kernel(KernelKind kind, Axis direction);

}  // namespace sgrecon
