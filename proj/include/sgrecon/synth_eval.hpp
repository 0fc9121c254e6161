#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sgrecon/grid_domain.hpp"
#include "sgrecon/reconstruct.hpp"

namespace sgrecon {

/// Analytic test surface: depth plus exact per-pixel gradients, chain-ruled
/// into pixel units. Fields returned by depth() and the gradient vectors
/// reference the embedded domain, so keep the surface alive while using them.
struct SyntheticSurface {
  PixelDomain domain;
  std::vector<double> z, gx, gy;
  std::string name;

  DepthField depth() const { return DepthField{&domain, z}; }
};

/// The classic three-term peaks function sampled on (x, y) in [-3, 3]^2.
SyntheticSurface peaks_surface(int w, int h, double amplitude = 1.0);

/// Smooth sum of four fixed Gaussian bumps on [-3, 3]^2.
SyntheticSurface gaussian_bumps_surface(int w, int h, double amplitude = 1.0);

/// Spherical cap over a disc-masked domain on (x, y) in [-1, 1]^2; the mask
/// keeps x^2 + y^2 <= 1 and the cap radius 1.2 keeps gradients bounded.
SyntheticSurface hemisphere_surface(int w, int h, double amplitude = 1.0);

/// n = (-gx, -gy, 1) normalized per pixel.
NormalField gradients_to_normals(const PixelDomain& domain, const std::vector<double>& gx,
                                 const std::vector<double>& gy);

struct NoiseSpec {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

/// Adds i.i.d. Gaussian noise to both gradient channels; the draw for a
/// sample depends only on (seed, pixel index, channel), never on iteration
/// order.
void add_gradient_noise(const SyntheticSurface& surface, const NoiseSpec& spec,
                        std::vector<double>& gx_out, std::vector<double>& gy_out);

enum class AlignMode { offset, scale };

/// RMSE after removing the gauge freedom: offset subtracts mean(z - z_gt);
/// scale multiplies z by the least-squares factor (z . z_gt) / (z . z).
double rmse_aligned(const DepthField& z, const DepthField& z_gt, AlignMode mode);

/// Median (lower median for even counts) of per-pixel angles in degrees,
/// skipping pixels invalid in either field.
double median_angular_error_deg(const NormalField& n, const NormalField& n_gt);

struct SweepMethod {
  std::string name;
  OperatorConfig kernel;
};

struct SweepRow {
  double sigma = 0.0;
  std::string method;
  int trial = 0;
  double rmse = 0.0;
};

struct SweepReport {
  std::vector<SweepRow> rows;
};

/// For each sigma and trial, perturbs the surface gradients once (stream
/// derived from seed, trial, and sigma index) and integrates with every
/// method on the same noisy input, reporting offset-aligned RMSE. Rows are
/// ordered by sigma, then method, then trial.
SweepReport noise_sweep(const SyntheticSurface& surface, const std::vector<double>& sigmas,
                        const std::vector<SweepMethod>& methods, int trials, std::uint64_t seed,
                        const ReconstructionOptions& base);

/// CSV with header "sigma,method,trial,rmse" and 17-significant-digit values.
void write_sweep_csv(std::ostream& out, const SweepReport& report);

}  // namespace sgrecon
