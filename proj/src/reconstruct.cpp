#include "sgrecon/reconstruct.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sgrecon/parallel.hpp"

namespace sgrecon {

namespace {

void check_field_sizes(const PixelDomain* domain, std::size_t n, const char* what) {
  if (domain == nullptr) throw std::invalid_argument(std::string(what) + " has no domain");
  if (n != static_cast<std::size_t>(domain->size())) {
    throw std::invalid_argument(std::string(what) + " length does not match its domain");
  }
}

void check_normals(const NormalField& normals) {
  check_field_sizes(normals.domain, normals.nx.size(), "normal field");
  if (normals.ny.size() != normals.nx.size() || normals.nz.size() != normals.nx.size()) {
    throw std::invalid_argument("normal field channels differ in length");
  }
  for (std::size_t i = 0; i < normals.nx.size(); ++i) {
    const double norm = std::sqrt(normals.nx[i] * normals.nx[i] + normals.ny[i] * normals.ny[i] +
                                  normals.nz[i] * normals.nz[i]);
    if (!(std::fabs(norm - 1.0) <= 1e-6)) throw std::invalid_argument("normals not unit length");
  }
}

void check_prior(const PriorOptions& prior, int n) {
  if (prior.omega < 0.0) throw std::invalid_argument("negative prior weight");
  if (prior.omega == 0.0) return;
  if (prior.z_prior.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("prior field length does not match the domain");
  }
  if (!prior.weights.empty() && prior.weights.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("prior weight length does not match the domain");
  }
  for (double w : prior.weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("prior weights must be finite and nonnegative");
  }
}

/// Rows omega * w_i * z_i = omega * w_i * z_prior_i for pixels with w_i > 0.
/// Appends to the block list and right-hand side; returns the operator by
/// value so the caller keeps it alive through the vstack.
SparseOperator prior_rows(const PriorOptions& prior, int n, std::vector<double>& b) {
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) {
    const double w = prior.weights.empty() ? 1.0 : prior.weights[static_cast<std::size_t>(i)];
    if (w <= 0.0) continue;
    t.push_back(Triplet{static_cast<int>(t.size()), i, w});
    b.push_back(prior.omega * w * prior.z_prior[static_cast<std::size_t>(i)]);
  }
  const int rows = static_cast<int>(t.size());
  return SparseOperator::from_triplets(rows, n, std::move(t));
}

}  // namespace

NormalField normals_from_depth(const DepthField& depth, const ReconstructionOptions& opts,
                               const CameraIntrinsics* intrinsics) {
  check_field_sizes(depth.domain, depth.z.size(), "depth field");
  for (double z : depth.z) {
    if (!std::isfinite(z)) throw std::invalid_argument("non-finite depth");
  }
  const bool perspective = opts.projection == Projection::perspective;
  if (perspective && intrinsics == nullptr) {
    throw std::invalid_argument("perspective projection requires intrinsics");
  }
  const PixelDomain& domain = *depth.domain;
  const OperatorBundle ops = assemble_operators(domain, opts.kernel, &depth.z, intrinsics);
  const std::vector<double> zu = matvec(ops.du, depth.z);
  const std::vector<double> zv = matvec(ops.dv, depth.z);

  NormalField out;
  out.domain = depth.domain;
  const std::size_t n = depth.z.size();
  out.nx.assign(n, 0.0);
  out.ny.assign(n, 0.0);
  out.nz.assign(n, 1.0);
  out.valid.assign(n, 1);

  const double f = perspective ? intrinsics->f : 1.0;
  const double cu = perspective ? intrinsics->cu : 0.0;
  const double cv = perspective ? intrinsics->cv : 0.0;
  parallel_for(0, static_cast<int>(n), [&](int i) {
    const std::size_t s = static_cast<std::size_t>(i);
    double cx, cy, cz;
    if (perspective) {
      // Cross product of the perspective tangents; both share a factor z/f.
      const Pixel p = domain.pixel_of(i);
      const double z = depth.z[s];
      cx = -(z / f) * zu[s];
      cy = -(z / f) * zv[s];
      cz = (z / (f * f)) * ((p.u - cu) * zu[s] + (p.v - cv) * zv[s] + z);
    } else {
      cx = -zu[s];
      cy = -zv[s];
      cz = 1.0;
    }
    const double norm = std::sqrt(cx * cx + cy * cy + cz * cz);
    if (!(norm > 1e-14)) {
      out.valid[s] = 0;
      return;
    }
    double sign = 1.0;
    if (opts.positive_nz && cz < 0.0) sign = -1.0;
    out.nx[s] = sign * cx / norm;
    out.ny[s] = sign * cy / norm;
    out.nz[s] = sign * cz / norm;
  });
  return out;
}

LsqProblem build_ortho_system(const NormalField& normals, const OperatorBundle& bundle,
                              const ReconstructionOptions& opts) {
  check_normals(normals);
  const int n = normals.domain->size();
  check_prior(opts.prior, n);
  if (opts.lambda < 0.0) throw std::invalid_argument("negative smoothness weight");

  const SparseOperator du = bundle.du.row_scaled(normals.nz);
  const SparseOperator dv = bundle.dv.row_scaled(normals.nz);

  LsqProblem problem;
  problem.options = opts.solver;
  problem.b.reserve(static_cast<std::size_t>(3 * n));
  for (int i = 0; i < n; ++i) problem.b.push_back(-normals.nx[static_cast<std::size_t>(i)]);
  for (int i = 0; i < n; ++i) problem.b.push_back(-normals.ny[static_cast<std::size_t>(i)]);

  std::vector<std::pair<double, const SparseOperator*>> blocks = {{1.0, &du}, {1.0, &dv}};
  SparseOperator smooth;
  if (opts.lambda > 0.0) {
    smooth = bundle.smooth.plus_diagonal(std::vector<double>(static_cast<std::size_t>(n), -1.0));
    blocks.push_back({opts.lambda, &smooth});
    problem.b.insert(problem.b.end(), static_cast<std::size_t>(n), 0.0);
  }
  SparseOperator prior;
  if (opts.prior.omega > 0.0) {
    prior = prior_rows(opts.prior, n, problem.b);
    blocks.push_back({opts.prior.omega, &prior});
  }
  problem.a = vstack(blocks);
  return problem;
}

LsqProblem build_persp_system(const NormalField& normals, const OperatorBundle& bundle,
                              const CameraIntrinsics& intrinsics,
                              const ReconstructionOptions& opts) {
  check_normals(normals);
  const int n = normals.domain->size();
  check_prior(opts.prior, n);
  if (opts.lambda < 0.0) throw std::invalid_argument("negative smoothness weight");
  if (!(intrinsics.f > 0.0)) throw std::invalid_argument("focal length must be positive");
  if (!(opts.pin_value > 0.0)) throw std::invalid_argument("pin value must be positive");

  const PixelDomain& domain = *normals.domain;
  std::vector<double> scale(static_cast<std::size_t>(n));
  std::vector<double> diag_u(static_cast<std::size_t>(n));
  std::vector<double> diag_v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const std::size_t s = static_cast<std::size_t>(i);
    const Pixel p = domain.pixel_of(i);
    scale[s] = ((p.u - intrinsics.cu) * normals.nx[s] + (p.v - intrinsics.cv) * normals.ny[s]) /
                   intrinsics.f +
               normals.nz[s];
    diag_u[s] = normals.nx[s] / intrinsics.f;
    diag_v[s] = normals.ny[s] / intrinsics.f;
  }
  const SparseOperator tx = bundle.du.row_scaled(scale).plus_diagonal(diag_u);
  const SparseOperator ty = bundle.dv.row_scaled(scale).plus_diagonal(diag_v);

  LsqProblem problem;
  problem.options = opts.solver;
  problem.b.assign(static_cast<std::size_t>(2 * n), 0.0);

  std::vector<std::pair<double, const SparseOperator*>> blocks = {{1.0, &tx}, {1.0, &ty}};
  SparseOperator smooth;
  if (opts.lambda > 0.0) {
    smooth = bundle.smooth.plus_diagonal(std::vector<double>(static_cast<std::size_t>(n), -1.0));
    blocks.push_back({opts.lambda, &smooth});
    problem.b.insert(problem.b.end(), static_cast<std::size_t>(n), 0.0);
  }
  SparseOperator prior;
  if (opts.prior.omega > 0.0) {
    prior = prior_rows(opts.prior, n, problem.b);
    blocks.push_back({opts.prior.omega, &prior});
  } else {
    // Homogeneous system: anchor each component's scale at its pin pixel.
    for (int c = 0; c < domain.component_count(); ++c) {
      problem.options.pins.push_back(PinConstraint{pin_pixel_for_component(domain, c), opts.pin_value});
    }
  }
  problem.a = vstack(blocks);
  return problem;
}

DepthField height_from_normals(const NormalField& normals, const ReconstructionOptions& opts,
                               const CameraIntrinsics* intrinsics, LsqSolution* solution) {
  check_normals(normals);
  const PixelDomain& domain = *normals.domain;
  const bool perspective = opts.projection == Projection::perspective;
  if (perspective && intrinsics == nullptr) {
    throw std::invalid_argument("perspective projection requires intrinsics");
  }
  const OperatorBundle bundle = assemble_operators(domain, opts.kernel);

  LsqProblem problem = perspective ? build_persp_system(normals, bundle, *intrinsics, opts)
                                   : build_ortho_system(normals, bundle, opts);
  LsqSolution sol = solve(problem);

  DepthField out;
  out.domain = normals.domain;
  if (opts.prior.omega > 0.0) {
    out.z = std::move(sol.z);  // the prior anchors offset and scale
  } else if (perspective) {
    std::vector<int> pin_indices;
    pin_indices.reserve(problem.options.pins.size());
    for (const PinConstraint& pin : problem.options.pins) pin_indices.push_back(pin.index);
    out.z = fix_gauge(std::move(sol.z), domain, GaugeMode::scale_pin, pin_indices);
    for (double& z : out.z) z *= opts.pin_value;
  } else {
    out.z = fix_gauge(std::move(sol.z), domain, GaugeMode::offset_zero_mean);
  }
  if (solution != nullptr) {
    sol.z = out.z;
    *solution = std::move(sol);
  }
  return out;
}

}  // namespace sgrecon
