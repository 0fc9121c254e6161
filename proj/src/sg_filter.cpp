#include "sgrecon/sg_filter.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sgrecon {

namespace {

Eigen::MatrixXd design_matrix_eigen(const Neighborhood& nb, int k) {
  const int m = static_cast<int>(nb.offsets.size());
  const int c = monomial_count(k);
  Eigen::MatrixXd mat(m, c);
  for (int i = 0; i < m; ++i) {
    const double du = nb.offsets[static_cast<std::size_t>(i)].du;
    const double dv = nb.offsets[static_cast<std::size_t>(i)].dv;
    int col = 0;
    double upow = 1.0;
    for (int a = 0; a <= k; ++a) {
      double vpow = 1.0;
      for (int b = 0; b + a <= k; ++b) {
        mat(i, col++) = upow * vpow;
        vpow *= dv;
      }
      upow *= du;
    }
  }
  return mat;
}

// Column index of the target coefficient under the lexicographic (a,b)
// ordering: a00 -> 0, a01 -> 1, a10 -> k+1.
int target_column(KernelTarget target, int k) {
  switch (target) {
    case KernelTarget::smooth:
      return 0;
    case KernelTarget::deriv_v:
      return 1;
    case KernelTarget::deriv_u:
      return k + 1;
  }
  return 0;
}

}  // namespace

DesignMatrix design_matrix(const Neighborhood& neighborhood, int k) {
  if (k < 0) throw std::invalid_argument("order too high for neighborhood");
  const int m = static_cast<int>(neighborhood.offsets.size());
  const int c = monomial_count(k);
  if (m < c) throw std::invalid_argument("order too high for neighborhood");
  const Eigen::MatrixXd mat = design_matrix_eigen(neighborhood, k);
  DesignMatrix out;
  out.rows = m;
  out.cols = c;
  out.entries.resize(static_cast<std::size_t>(m) * c);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < c; ++j) out.entries[static_cast<std::size_t>(i) * c + j] = mat(i, j);
  return out;
}

SgKernel sg_kernel(const Neighborhood& neighborhood, int k, KernelTarget target) {
  const int m = static_cast<int>(neighborhood.offsets.size());
  if (m < 1) throw std::invalid_argument("degenerate neighborhood");
  const int k_floor = target == KernelTarget::smooth ? 0 : 1;
  if (k < k_floor) throw std::invalid_argument("degenerate neighborhood");

  for (int k_eff = k; k_eff >= k_floor; --k_eff) {
    const int c = monomial_count(k_eff);
    const Eigen::MatrixXd mat = design_matrix_eigen(neighborhood, k_eff);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(mat, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double sigma_max = svd.singularValues()(0);
    const double tau =
        std::max(m, c) * std::numeric_limits<double>::epsilon() * sigma_max;
    const int r0 = static_cast<int>(svd.singularValues().size());
    const int t = target_column(target, k_eff);

    // The coefficient is identifiable iff e_t lies in the row space of the
    // design matrix (the span of the kept right singular vectors).
    Eigen::VectorXd proj = Eigen::VectorXd::Zero(c);
    for (int j = 0; j < r0; ++j) {
      if (svd.singularValues()(j) <= tau) continue;
      proj += svd.matrixV()(t, j) * svd.matrixV().col(j);
    }
    proj(t) -= 1.0;
    if (proj.norm() > 1e-8) continue;

    Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
    for (int j = 0; j < r0; ++j) {
      const double sigma = svd.singularValues()(j);
      if (sigma <= tau) continue;
      w += (svd.matrixV()(t, j) / sigma) * svd.matrixU().col(j);
    }

    SgKernel kernel;
    kernel.offsets = neighborhood.offsets;
    kernel.weights.assign(w.data(), w.data() + m);
    kernel.target = target;
    kernel.order = k_eff;
    return kernel;
  }
  throw std::invalid_argument("degenerate neighborhood");
}

SgKernel classic_kernel(KernelKind kind, Axis direction) {
  auto off = [&](int along, int across) {
    return direction == Axis::u ? PixelOffset{along, across} : PixelOffset{across, along};
  };
  SgKernel kernel;
  kernel.target = direction == Axis::u ? KernelTarget::deriv_u : KernelTarget::deriv_v;
  kernel.order = 1;
  switch (kind) {
    case KernelKind::fw:
      kernel.offsets = {off(0, 0), off(1, 0)};
      kernel.weights = {-1.0, 1.0};
      return kernel;
    case KernelKind::bw:
      kernel.offsets = {off(-1, 0), off(0, 0)};
      kernel.weights = {-1.0, 1.0};
      return kernel;
    case KernelKind::c:
      kernel.offsets = {off(-1, 0), off(1, 0)};
      kernel.weights = {-0.5, 0.5};
      return kernel;
    case KernelKind::sc:
      for (int across = -1; across <= 1; ++across) {
        const double scale = across == 0 ? 4.0 / 12.0 : 1.0 / 12.0;
        for (int along = -1; along <= 1; ++along) {
          kernel.offsets.push_back(off(along, across));
          kernel.weights.push_back(along * scale);
        }
      }
      return kernel;
    case KernelKind::sg:
      break;
  }
  throw std::invalid_argument("classic_kernel requires a finite-difference kind");
}

}  // namespace sgrecon
