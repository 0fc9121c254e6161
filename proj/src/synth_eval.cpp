#include "sgrecon/synth_eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "sgrecon/rng.hpp"

namespace sgrecon {

namespace {

struct Sample {
  double z = 0.0, dx = 0.0, dy = 0.0;  // value and partials in (x, y) units
};

Sample peaks_at(double x, double y) {
  const double e1 = std::exp(-x * x - (y + 1.0) * (y + 1.0));
  const double e2 = std::exp(-x * x - y * y);
  const double e3 = std::exp(-(x + 1.0) * (x + 1.0) - y * y);
  const double q1 = 1.0 - x;
  const double q2 = x / 5.0 - x * x * x - std::pow(y, 5);

  Sample s;
  s.z = 3.0 * q1 * q1 * e1 - 10.0 * q2 * e2 - e3 / 3.0;
  s.dx = (-6.0 * q1 - 6.0 * x * q1 * q1) * e1 -
         10.0 * ((0.2 - 3.0 * x * x) - 2.0 * x * q2) * e2 + (2.0 / 3.0) * (x + 1.0) * e3;
  s.dy = -6.0 * (y + 1.0) * q1 * q1 * e1 -
         10.0 * ((-5.0 * std::pow(y, 4)) - 2.0 * y * q2) * e2 + (2.0 / 3.0) * y * e3;
  return s;
}

struct Bump {
  double a, px, py, s;
};

constexpr Bump kBumps[] = {
    {2.0, -1.2, -0.8, 0.9},
    {-1.5, 1.0, 0.4, 1.1},
    {1.0, 0.3, 1.6, 0.7},
    {0.6, -0.5, 1.0, 1.4},
};

Sample bumps_at(double x, double y) {
  Sample s;
  for (const Bump& b : kBumps) {
    const double dx = x - b.px;
    const double dy = y - b.py;
    const double g = b.a * std::exp(-(dx * dx + dy * dy) / (2.0 * b.s * b.s));
    s.z += g;
    s.dx += -dx / (b.s * b.s) * g;
    s.dy += -dy / (b.s * b.s) * g;
  }
  return s;
}

template <typename F>
SyntheticSurface sample_surface(int w, int h, double amplitude, double half_range, F&& at,
                                const std::vector<std::uint8_t>& mask, std::string name) {
  SyntheticSurface out{PixelDomain(w, h, mask), {}, {}, {}, std::move(name)};
  const int n = out.domain.size();
  out.z.resize(static_cast<std::size_t>(n));
  out.gx.resize(static_cast<std::size_t>(n));
  out.gy.resize(static_cast<std::size_t>(n));
  const double du_to_dx = 2.0 * half_range / (w - 1);
  const double dv_to_dy = 2.0 * half_range / (h - 1);
  for (int i = 0; i < n; ++i) {
    const Pixel p = out.domain.pixel_of(i);
    const Sample s = at(-half_range + p.u * du_to_dx, -half_range + p.v * dv_to_dy);
    out.z[static_cast<std::size_t>(i)] = amplitude * s.z;
    out.gx[static_cast<std::size_t>(i)] = amplitude * s.dx * du_to_dx;
    out.gy[static_cast<std::size_t>(i)] = amplitude * s.dy * dv_to_dy;
  }
  return out;
}

std::vector<std::uint8_t> all_on(int w, int h) {
  return std::vector<std::uint8_t>(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 1);
}

}  // namespace

SyntheticSurface peaks_surface(int w, int h, double amplitude) {
  if (w < 8 || h < 8) throw std::invalid_argument("surface needs at least 8x8 pixels");
  return sample_surface(w, h, amplitude, 3.0, peaks_at, all_on(w, h), "peaks");
}

SyntheticSurface gaussian_bumps_surface(int w, int h, double amplitude) {
  if (w < 8 || h < 8) throw std::invalid_argument("surface needs at least 8x8 pixels");
  return sample_surface(w, h, amplitude, 3.0, bumps_at, all_on(w, h), "bumps");
}

SyntheticSurface hemisphere_surface(int w, int h, double amplitude) {
  if (w < 8 || h < 8) throw std::invalid_argument("surface needs at least 8x8 pixels");
  constexpr double kCap = 1.2;  // cap radius; > 1 keeps the rim slope finite
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const double x = -1.0 + 2.0 * u / (w - 1);
      const double y = -1.0 + 2.0 * v / (h - 1);
      if (x * x + y * y <= 1.0) mask[static_cast<std::size_t>(v) * w + u] = 1;
    }
  }
  const auto cap = [](double x, double y) {
    Sample s;
    const double root = std::sqrt(kCap * kCap - x * x - y * y);
    s.z = root;
    s.dx = -x / root;
    s.dy = -y / root;
    return s;
  };
  return sample_surface(w, h, amplitude, 1.0, cap, mask, "hemisphere");
}

NormalField gradients_to_normals(const PixelDomain& domain, const std::vector<double>& gx,
                                 const std::vector<double>& gy) {
  const std::size_t n = static_cast<std::size_t>(domain.size());
  if (gx.size() != n || gy.size() != n) {
    throw std::invalid_argument("gradient length does not match the domain");
  }
  NormalField out;
  out.domain = &domain;
  out.nx.resize(n);
  out.ny.resize(n);
  out.nz.resize(n);
  out.valid.assign(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(gx[i]) || !std::isfinite(gy[i])) {
      throw std::invalid_argument("non-finite gradient");
    }
    const double norm = std::sqrt(gx[i] * gx[i] + gy[i] * gy[i] + 1.0);
    out.nx[i] = -gx[i] / norm;
    out.ny[i] = -gy[i] / norm;
    out.nz[i] = 1.0 / norm;
  }
  return out;
}

void add_gradient_noise(const SyntheticSurface& surface, const NoiseSpec& spec,
                        std::vector<double>& gx_out, std::vector<double>& gy_out) {
  if (spec.sigma < 0.0) throw std::invalid_argument("negative noise level");
  const std::size_t n = surface.gx.size();
  gx_out.resize(n);
  gy_out.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    gx_out[i] = surface.gx[i] + spec.sigma * gaussian_sample(spec.seed, i, 0);
    gy_out[i] = surface.gy[i] + spec.sigma * gaussian_sample(spec.seed, i, 1);
  }
}

double rmse_aligned(const DepthField& z, const DepthField& z_gt, AlignMode mode) {
  const std::size_t n = z.z.size();
  if (z_gt.z.size() != n || n == 0) throw std::invalid_argument("depth fields differ in length");

  double sq = 0.0;
  if (mode == AlignMode::offset) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += z.z[i] - z_gt.z[i];
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double e = z.z[i] - z_gt.z[i] - mean;
      sq += e * e;
    }
  } else {
    double zz = 0.0, zg = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      zz += z.z[i] * z.z[i];
      zg += z.z[i] * z_gt.z[i];
    }
    if (zz == 0.0) throw std::invalid_argument("zero field in scale alignment");
    const double s = zg / zz;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = s * z.z[i] - z_gt.z[i];
      sq += e * e;
    }
  }
  return std::sqrt(sq / static_cast<double>(n));
}

double median_angular_error_deg(const NormalField& n, const NormalField& n_gt) {
  const std::size_t count = n.nx.size();
  if (n_gt.nx.size() != count) throw std::invalid_argument("normal fields differ in length");
  std::vector<double> angles;
  angles.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (!n.valid.empty() && n.valid[i] == 0) continue;
    if (!n_gt.valid.empty() && n_gt.valid[i] == 0) continue;
    const double dot = n.nx[i] * n_gt.nx[i] + n.ny[i] * n_gt.ny[i] + n.nz[i] * n_gt.nz[i];
    angles.push_back(std::acos(std::clamp(dot, -1.0, 1.0)) * 180.0 / std::numbers::pi);
  }
  if (angles.empty()) throw std::invalid_argument("no valid pixels to compare");
  const std::size_t mid = (angles.size() - 1) / 2;  // lower median for even counts
  std::nth_element(angles.begin(), angles.begin() + static_cast<std::ptrdiff_t>(mid), angles.end());
  return angles[mid];
}

SweepReport noise_sweep(const SyntheticSurface& surface, const std::vector<double>& sigmas,
                        const std::vector<SweepMethod>& methods, int trials, std::uint64_t seed,
                        const ReconstructionOptions& base) {
  if (trials < 1) throw std::invalid_argument("at least one trial required");
  SweepReport report;
  const DepthField gt = surface.depth();
  std::vector<double> gx, gy;
  for (std::size_t si = 0; si < sigmas.size(); ++si) {
    // rmse[method][trial], filled trial-major so each trial's noise is drawn
    // once and shared by every method.
    std::vector<std::vector<double>> rmse(methods.size(), std::vector<double>(static_cast<std::size_t>(trials)));
    for (int trial = 0; trial < trials; ++trial) {
      NoiseSpec spec;
      spec.sigma = sigmas[si];
      spec.seed = counter_mix(seed, static_cast<std::uint64_t>(trial), si);
      add_gradient_noise(surface, spec, gx, gy);
      const NormalField normals = gradients_to_normals(surface.domain, gx, gy);
      for (std::size_t m = 0; m < methods.size(); ++m) {
        ReconstructionOptions opts = base;
        opts.projection = Projection::orthographic;
        opts.kernel = methods[m].kernel;
        const DepthField rec = height_from_normals(normals, opts);
        rmse[m][static_cast<std::size_t>(trial)] = rmse_aligned(rec, gt, AlignMode::offset);
      }
    }
    for (std::size_t m = 0; m < methods.size(); ++m) {
      for (int trial = 0; trial < trials; ++trial) {
        report.rows.push_back(SweepRow{sigmas[si], methods[m].name, trial,
                                       rmse[m][static_cast<std::size_t>(trial)]});
      }
    }
  }
  return report;
}

void write_sweep_csv(std::ostream& out, const SweepReport& report) {
  out << "sigma,method,trial,rmse\n";
  char buf[64];
  for (const SweepRow& row : report.rows) {
    std::snprintf(buf, sizeof(buf), "%.17g", row.sigma);
    out << buf << ',' << row.method << ',' << row.trial << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", row.rmse);
    out << buf << '\n';
  }
}

}  // namespace sgrecon
