#include "sgrecon/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgrecon/grid_domain.hpp"
#include "sgrecon/image_io.hpp"
#include "sgrecon/lsq_solver.hpp"
#include "sgrecon/reconstruct.hpp"
#include "sgrecon/sg_filter.hpp"
#include "sgrecon/sparse_ops.hpp"
#include "sgrecon/synth_eval.hpp"

namespace sgrecon::cli {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitSolver = 3;

/// Flag combinations CLI11 cannot express; mapped to exit code 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Solver ran but did not reach tolerance; mapped to exit code 3.
struct SolverFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

KernelKind parse_kind(const std::string& name) {
  if (name == "sg") return KernelKind::sg;
  if (name == "fw") return KernelKind::fw;
  if (name == "bw") return KernelKind::bw;
  if (name == "c") return KernelKind::c;
  if (name == "sc") return KernelKind::sc;
  throw UsageError("unknown derivative scheme: " + name);
}

void check_kernel_flags(int ksize, int order) {
  if (ksize < 3 || ksize % 2 == 0) throw UsageError("--ksize must be an odd number >= 3");
  if (order < 1) throw UsageError("--order must be >= 1");
}

std::pair<int, int> parse_size(const std::string& text) {
  const auto split = text.find('x');
  int w = 0, h = 0;
  try {
    std::size_t used_w = 0, used_h = 0;
    if (split == std::string::npos) throw std::invalid_argument("no separator");
    w = std::stoi(text.substr(0, split), &used_w);
    h = std::stoi(text.substr(split + 1), &used_h);
    if (used_w != split || used_h != text.size() - split - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw UsageError("malformed --size (expected WxH, e.g. 64x64): " + text);
  }
  if (w <= 0 || h <= 0) throw UsageError("--size dimensions must be positive: " + text);
  return {w, h};
}

void check_dims(int w, int h, const std::string& name, const MaskImage& mask,
                const std::string& mask_name) {
  if (w != mask.width || h != mask.height) {
    throw std::runtime_error("dimension mismatch: " + name + " is " + std::to_string(w) + "x" +
                             std::to_string(h) + " but " + mask_name + " is " +
                             std::to_string(mask.width) + "x" + std::to_string(mask.height));
  }
}

void check_channels(const FloatMap& map, int channels, const std::string& name) {
  if (map.channels != channels) {
    throw std::runtime_error(name + ": expected a " + std::to_string(channels) +
                             "-channel map, got " + std::to_string(map.channels) + " channels");
  }
}

std::vector<double> extract_field(const FloatMap& map, const PixelDomain& domain) {
  std::vector<double> z(static_cast<std::size_t>(domain.size()));
  for (int i = 0; i < domain.size(); ++i) {
    const Pixel p = domain.pixel_of(i);
    z[static_cast<std::size_t>(i)] = map.at(p.u, p.v);
  }
  return z;
}

/// Foreground normals are renormalized against float32 quantization; a
/// zero-length foreground normal has no direction and is a data error.
NormalField extract_normals(const FloatMap& map, const PixelDomain& domain,
                            const std::string& name) {
  check_channels(map, 3, name);
  NormalField field;
  field.domain = &domain;
  const auto n = static_cast<std::size_t>(domain.size());
  field.nx.resize(n);
  field.ny.resize(n);
  field.nz.resize(n);
  field.valid.assign(n, 1);
  for (int i = 0; i < domain.size(); ++i) {
    const Pixel p = domain.pixel_of(i);
    const double x = map.at(p.u, p.v, 0);
    const double y = map.at(p.u, p.v, 1);
    const double z = map.at(p.u, p.v, 2);
    const double norm = std::sqrt(x * x + y * y + z * z);
    if (!(norm > 1e-12)) {
      throw std::runtime_error(name + ": zero-length normal at foreground pixel (" +
                               std::to_string(p.u) + ", " + std::to_string(p.v) + ")");
    }
    const auto s = static_cast<std::size_t>(i);
    field.nx[s] = x / norm;
    field.ny[s] = y / norm;
    field.nz[s] = z / norm;
  }
  return field;
}

FloatMap pack_field(const PixelDomain& domain, const std::vector<double>& z) {
  FloatMap map;
  map.width = domain.width();
  map.height = domain.height();
  map.channels = 1;
  map.data.assign(static_cast<std::size_t>(map.width) * map.height, 0.0f);
  for (int i = 0; i < domain.size(); ++i) {
    const Pixel p = domain.pixel_of(i);
    map.at(p.u, p.v) = static_cast<float>(z[static_cast<std::size_t>(i)]);
  }
  return map;
}

FloatMap pack_normals(const NormalField& field) {
  const PixelDomain& domain = *field.domain;
  FloatMap map;
  map.width = domain.width();
  map.height = domain.height();
  map.channels = 3;
  map.data.assign(static_cast<std::size_t>(map.width) * map.height * 3, 0.0f);
  for (int i = 0; i < domain.size(); ++i) {
    const Pixel p = domain.pixel_of(i);
    const auto s = static_cast<std::size_t>(i);
    map.at(p.u, p.v, 0) = static_cast<float>(field.nx[s]);
    map.at(p.u, p.v, 1) = static_cast<float>(field.ny[s]);
    map.at(p.u, p.v, 2) = static_cast<float>(field.nz[s]);
  }
  return map;
}

MaskImage mask_of_domain(const PixelDomain& domain) {
  MaskImage mask;
  mask.width = domain.width();
  mask.height = domain.height();
  mask.mask.assign(static_cast<std::size_t>(mask.width) * mask.height, 0);
  for (int v = 0; v < mask.height; ++v) {
    for (int u = 0; u < mask.width; ++u) {
      if (domain.contains(u, v)) mask.mask[static_cast<std::size_t>(v) * mask.width + u] = 1;
    }
  }
  return mask;
}

SyntheticSurface make_surface(const std::string& name, int w, int h) {
  if (name == "peaks") return peaks_surface(w, h);
  if (name == "bumps") return gaussian_bumps_surface(w, h);
  if (name == "hemisphere") return hemisphere_surface(w, h);
  throw UsageError("unknown --surface: " + name);
}

struct HfnArgs {
  std::string normals, mask, projection, intrinsics, prior, out, export_obj;
  std::string deriv = "sg";
  int order = 3;
  int ksize = 5;
  double lambda = 0.1;
  double omega = 0.0;
  double tol = 1e-10;
  int max_iters = 0;
};

struct NfdArgs {
  std::string depth, mask, intrinsics, out;
  std::string projection = "ortho";
  std::string deriv = "sg";
  bool knn3d = false;
  int window = 15;
  int order = 3;
  int ksize = 5;
};

struct KernelsArgs {
  int ksize = 5;
  int order = 3;
  std::string target, neighborhood;
};

struct SynthArgs {
  std::string surface = "peaks";
  std::string size, out_dir;
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

struct SweepArgs {
  std::string surface = "peaks";
  std::string size = "128x128";
  std::string out;
  std::vector<double> sigmas;
  std::vector<std::string> methods;
  int trials = 1;
  std::uint64_t seed = 0;
  double lambda = 1.0;
  int order = 3;
  int ksize = 5;
};

struct EvalArgs {
  std::string pred, gt, mask, metric;
};

int run_hfn(const HfnArgs& a, std::ostream& out) {
  const bool persp = a.projection == "persp";
  if (persp && a.intrinsics.empty()) {
    throw UsageError("--projection persp requires --intrinsics");
  }
  if (!a.prior.empty() && a.omega <= 0.0) throw UsageError("--prior requires --omega > 0");
  if (a.omega > 0.0 && a.prior.empty()) throw UsageError("--omega requires --prior");
  if (a.lambda < 0.0) throw UsageError("--lambda must be >= 0");
  if (a.tol <= 0.0) throw UsageError("--tol must be > 0");
  if (a.max_iters < 0) throw UsageError("--max-iters must be >= 0");
  check_kernel_flags(a.ksize, a.order);

  const MaskImage mask = read_pgm_mask_file(a.mask);
  const FloatMap nmap = read_pfm_file(a.normals);
  check_dims(nmap.width, nmap.height, a.normals, mask, a.mask);
  CameraIntrinsics k;
  if (!a.intrinsics.empty()) k = read_intrinsics_file(a.intrinsics);

  const PixelDomain domain = build_domain(mask.width, mask.height, mask.mask);
  const NormalField normals = extract_normals(nmap, domain, a.normals);

  ReconstructionOptions opts;
  opts.projection = persp ? Projection::perspective : Projection::orthographic;
  opts.lambda = a.lambda;
  opts.kernel.kind = parse_kind(a.deriv);
  opts.kernel.d = a.ksize;
  opts.kernel.k = a.order;
  opts.solver.tol_rel = a.tol;
  opts.solver.max_iters = a.max_iters;
  if (!a.prior.empty()) {
    const FloatMap pmap = read_pfm_file(a.prior);
    check_dims(pmap.width, pmap.height, a.prior, mask, a.mask);
    check_channels(pmap, 1, a.prior);
    opts.prior.omega = a.omega;
    opts.prior.z_prior = extract_field(pmap, domain);
  }

  LsqSolution solution;
  const DepthField z = height_from_normals(normals, opts, a.intrinsics.empty() ? nullptr : &k,
                                           &solution);
  if (!solution.converged) {
    throw SolverFailure("solver did not converge within " + std::to_string(solution.iterations) +
                        " iterations (residual " + fmt17(solution.residual_norm) + ")");
  }
  write_pfm_file(a.out, pack_field(domain, z.z));
  if (!a.export_obj.empty()) {
    std::ofstream obj(a.export_obj);
    if (!obj) throw std::runtime_error(a.export_obj + ": cannot create file");
    write_obj_mesh(obj, domain, z.z, persp, a.intrinsics.empty() ? nullptr : &k);
  }
  out << "wrote " << a.out << "\n";
  return kExitOk;
}

int run_nfd(const NfdArgs& a, std::ostream& out) {
  const bool persp = a.projection == "persp";
  if (persp && a.intrinsics.empty()) {
    throw UsageError("--projection persp requires --intrinsics");
  }
  if (a.knn3d && a.intrinsics.empty()) throw UsageError("--knn3d requires --intrinsics");
  check_kernel_flags(a.ksize, a.order);
  if (a.window < 3) throw UsageError("--window must be >= 3");

  const MaskImage mask = read_pgm_mask_file(a.mask);
  const FloatMap zmap = read_pfm_file(a.depth);
  check_dims(zmap.width, zmap.height, a.depth, mask, a.mask);
  check_channels(zmap, 1, a.depth);
  CameraIntrinsics k;
  if (!a.intrinsics.empty()) k = read_intrinsics_file(a.intrinsics);

  const PixelDomain domain = build_domain(mask.width, mask.height, mask.mask);
  const DepthField depth{&domain, extract_field(zmap, domain)};

  ReconstructionOptions opts;
  opts.projection = persp ? Projection::perspective : Projection::orthographic;
  opts.kernel.kind = parse_kind(a.deriv);
  opts.kernel.d = a.ksize;
  opts.kernel.k = a.order;
  opts.kernel.mode = a.knn3d ? NeighborhoodMode::knn3d : NeighborhoodMode::knn2d;
  opts.kernel.window = a.window;

  const NormalField normals =
      normals_from_depth(depth, opts, a.intrinsics.empty() ? nullptr : &k);
  write_pfm_file(a.out, pack_normals(normals));
  out << "wrote " << a.out << "\n";
  return kExitOk;
}

Neighborhood neighborhood_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  Neighborhood neigh;
  neigh.center = Pixel{0, 0};
  std::string line;
  int line_no = 0;
  bool has_center = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream row(line);
    int du = 0, dv = 0;
    if (!(row >> du)) continue;  // blank line
    std::string extra;
    if (!(row >> dv) || (row >> extra)) {
      throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                               ": expected two integers \"du dv\"");
    }
    neigh.offsets.push_back(PixelOffset{du, dv});
    neigh.members.push_back(Pixel{du, dv});
    has_center = has_center || (du == 0 && dv == 0);
  }
  if (neigh.offsets.empty()) throw std::runtime_error(path + ": empty neighborhood");
  if (!has_center) throw std::runtime_error(path + ": neighborhood must contain the center 0 0");
  return neigh;
}

int run_kernels(const KernelsArgs& a, std::ostream& out) {
  check_kernel_flags(a.ksize, a.order);
  Neighborhood neigh;
  if (!a.neighborhood.empty()) {
    neigh = neighborhood_from_file(a.neighborhood);
  } else {
    neigh.center = Pixel{0, 0};
    const int r = a.ksize / 2;
    for (int dv = -r; dv <= r; ++dv) {
      for (int du = -r; du <= r; ++du) {
        neigh.offsets.push_back(PixelOffset{du, dv});
        neigh.members.push_back(Pixel{du, dv});
      }
    }
  }
  KernelTarget target = KernelTarget::smooth;
  if (a.target == "du") target = KernelTarget::deriv_u;
  if (a.target == "dv") target = KernelTarget::deriv_v;
  const SgKernel kernel = sg_kernel(neigh, a.order, target);
  for (std::size_t i = 0; i < kernel.offsets.size(); ++i) {
    out << kernel.offsets[i].du << " " << kernel.offsets[i].dv << " " << fmt17(kernel.weights[i])
        << "\n";
  }
  return kExitOk;
}

int run_synth(const SynthArgs& a, std::ostream& out) {
  if (a.sigma < 0.0) throw UsageError("--sigma must be >= 0");
  const auto [w, h] = parse_size(a.size);
  const SyntheticSurface surface = make_surface(a.surface, w, h);

  std::vector<double> gx, gy;
  add_gradient_noise(surface, NoiseSpec{a.sigma, a.seed}, gx, gy);
  const NormalField normals = gradients_to_normals(surface.domain, gx, gy);

  std::filesystem::create_directories(a.out_dir);
  const std::string base = a.out_dir + "/";
  write_pfm_file(base + "depth_gt.pfm", pack_field(surface.domain, surface.z));
  write_pfm_file(base + "normals.pfm", pack_normals(normals));
  write_pgm_mask_file(base + "mask.pgm", mask_of_domain(surface.domain));
  out << "wrote " << base << "{depth_gt.pfm,normals.pfm,mask.pgm}\n";
  return kExitOk;
}

int run_sweep(const SweepArgs& a, std::ostream& out) {
  if (a.trials < 1) throw UsageError("--trials must be >= 1");
  if (a.lambda < 0.0) throw UsageError("--lambda must be >= 0");
  check_kernel_flags(a.ksize, a.order);
  if (a.sigmas.empty()) throw UsageError("--sigmas must list at least one value");

  const auto [w, h] = parse_size(a.size);
  const SyntheticSurface surface = make_surface(a.surface, w, h);

  std::vector<SweepMethod> methods;
  for (const std::string& name : a.methods) {
    SweepMethod method;
    method.name = name;
    method.kernel.kind = parse_kind(name);
    method.kernel.d = a.ksize;
    method.kernel.k = a.order;
    methods.push_back(std::move(method));
  }

  ReconstructionOptions base;
  base.lambda = a.lambda;
  const SweepReport report = noise_sweep(surface, a.sigmas, methods, a.trials, a.seed, base);
  if (a.out.empty()) {
    write_sweep_csv(out, report);
  } else {
    std::ofstream file(a.out);
    if (!file) throw std::runtime_error(a.out + ": cannot create file");
    write_sweep_csv(file, report);
    out << "wrote " << a.out << "\n";
  }
  return kExitOk;
}

int run_eval(const EvalArgs& a, std::ostream& out) {
  const MaskImage mask = read_pgm_mask_file(a.mask);
  const FloatMap pred = read_pfm_file(a.pred);
  const FloatMap gt = read_pfm_file(a.gt);
  check_dims(pred.width, pred.height, a.pred, mask, a.mask);
  check_dims(gt.width, gt.height, a.gt, mask, a.mask);
  const PixelDomain domain = build_domain(mask.width, mask.height, mask.mask);

  double metric = 0.0;
  if (a.metric == "mae-normals") {
    const NormalField np = extract_normals(pred, domain, a.pred);
    const NormalField ng = extract_normals(gt, domain, a.gt);
    metric = median_angular_error_deg(np, ng);
  } else {
    check_channels(pred, 1, a.pred);
    check_channels(gt, 1, a.gt);
    const std::vector<double> zp = extract_field(pred, domain);
    const std::vector<double> zg = extract_field(gt, domain);
    const DepthField fp{&domain, zp};
    const DepthField fg{&domain, zg};
    const AlignMode mode = a.metric == "rmse-scale" ? AlignMode::scale : AlignMode::offset;
    metric = rmse_aligned(fp, fg, mode);
  }
  out << fmt17(metric) << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"least-squares surface reconstruction on masked pixel grids"};
  app.name("sgrecon");
  app.require_subcommand(1);

  HfnArgs hfn;
  CLI::App* hfn_cmd = app.add_subcommand("hfn", "integrate a normal map into a height field");
  hfn_cmd->add_option("--normals", hfn.normals, "input normal map (3-channel PFM)")->required();
  hfn_cmd->add_option("--mask", hfn.mask, "foreground mask (binary PGM)")->required();
  hfn_cmd->add_option("--projection", hfn.projection, "camera model")
      ->required()
      ->check(CLI::IsMember({"ortho", "persp"}));
  hfn_cmd->add_option("--intrinsics", hfn.intrinsics, "camera intrinsics text file");
  hfn_cmd->add_option("--order", hfn.order, "polynomial order of the fit")->capture_default_str();
  hfn_cmd->add_option("--ksize", hfn.ksize, "derivative kernel side length (odd)")->capture_default_str();
  hfn_cmd->add_option("--deriv", hfn.deriv, "derivative scheme")->capture_default_str()
      ->check(CLI::IsMember({"sg", "fw", "bw", "c", "sc"}));
  hfn_cmd->add_option("--lambda", hfn.lambda, "smoothness weight")->capture_default_str();
  hfn_cmd->add_option("--prior", hfn.prior, "depth prior map (single-channel PFM)");
  hfn_cmd->add_option("--omega", hfn.omega, "depth prior weight")->capture_default_str();
  hfn_cmd->add_option("--tol", hfn.tol, "solver convergence tolerance")->capture_default_str();
  hfn_cmd->add_option("--max-iters", hfn.max_iters, "solver iteration cap (0 = automatic)")
      ->capture_default_str();
  hfn_cmd->add_option("--out", hfn.out, "output height map (PFM)")->required();
  hfn_cmd->add_option("--export-obj", hfn.export_obj, "also write the surface as a Wavefront OBJ");

  NfdArgs nfd;
  CLI::App* nfd_cmd = app.add_subcommand("nfd", "differentiate a depth map into normals");
  nfd_cmd->add_option("--depth", nfd.depth, "input depth map (single-channel PFM)")->required();
  nfd_cmd->add_option("--mask", nfd.mask, "foreground mask (binary PGM)")->required();
  nfd_cmd->add_option("--projection", nfd.projection, "camera model")->capture_default_str()
      ->check(CLI::IsMember({"ortho", "persp"}));
  nfd_cmd->add_option("--intrinsics", nfd.intrinsics, "camera intrinsics text file");
  nfd_cmd->add_flag("--knn3d", nfd.knn3d, "pick neighbors by 3D point distance");
  nfd_cmd->add_option("--window", nfd.window, "candidate window for 3D neighbor search")->capture_default_str();
  nfd_cmd->add_option("--order", nfd.order, "polynomial order of the fit")->capture_default_str();
  nfd_cmd->add_option("--ksize", nfd.ksize, "derivative kernel side length (odd)")->capture_default_str();
  nfd_cmd->add_option("--deriv", nfd.deriv, "derivative scheme")->capture_default_str()
      ->check(CLI::IsMember({"sg", "fw", "bw", "c", "sc"}));
  nfd_cmd->add_option("--out", nfd.out, "output normal map (3-channel PFM)")->required();

  KernelsArgs kernels;
  CLI::App* kernels_cmd = app.add_subcommand("kernels", "print a least-squares kernel");
  kernels_cmd->add_option("--ksize", kernels.ksize, "kernel side length (odd)")->required();
  kernels_cmd->add_option("--order", kernels.order, "polynomial order")->required();
  kernels_cmd->add_option("--target", kernels.target, "kernel target")
      ->required()
      ->check(CLI::IsMember({"smooth", "du", "dv"}));
  kernels_cmd->add_option("--neighborhood", kernels.neighborhood,
                          "text file of \"du dv\" offsets instead of the square window");

  SynthArgs synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "write a synthetic surface fixture");
  synth_cmd->add_option("--surface", synth.surface, "surface name")->capture_default_str()
      ->check(CLI::IsMember({"peaks", "bumps", "hemisphere"}));
  synth_cmd->add_option("--size", synth.size, "grid size WxH")->required();
  synth_cmd->add_option("--sigma", synth.sigma, "gradient noise level")->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed, "noise seed")->capture_default_str();
  synth_cmd->add_option("--out-dir", synth.out_dir, "output directory")->required();

  SweepArgs sweep;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "noise sweep over derivative methods");
  sweep_cmd->add_option("--surface", sweep.surface, "surface name")->capture_default_str()
      ->check(CLI::IsMember({"peaks", "bumps", "hemisphere"}));
  sweep_cmd->add_option("--size", sweep.size, "grid size WxH")->capture_default_str();
  sweep_cmd->add_option("--sigmas", sweep.sigmas, "noise levels")->required()->delimiter(',');
  sweep_cmd->add_option("--methods", sweep.methods, "derivative schemes to compare")
      ->required()
      ->delimiter(',')
      ->check(CLI::IsMember({"sg", "fw", "bw", "c", "sc"}));
  sweep_cmd->add_option("--trials", sweep.trials, "trials per noise level")->capture_default_str();
  sweep_cmd->add_option("--seed", sweep.seed, "base seed")->capture_default_str();
  sweep_cmd->add_option("--lambda", sweep.lambda, "smoothness weight")->capture_default_str();
  sweep_cmd->add_option("--order", sweep.order, "polynomial order for the sg method")->capture_default_str();
  sweep_cmd->add_option("--ksize", sweep.ksize, "kernel side length for the sg method")->capture_default_str();
  sweep_cmd->add_option("--out", sweep.out, "CSV output path (default: stdout)");

  EvalArgs eval;
  CLI::App* eval_cmd = app.add_subcommand("eval", "compare a prediction against ground truth");
  eval_cmd->add_option("--pred", eval.pred, "predicted map (PFM)")->required();
  eval_cmd->add_option("--gt", eval.gt, "ground-truth map (PFM)")->required();
  eval_cmd->add_option("--mask", eval.mask, "foreground mask (binary PGM)")->required();
  eval_cmd->add_option("--metric", eval.metric, "metric to print")
      ->required()
      ->check(CLI::IsMember({"rmse-offset", "rmse-scale", "mae-normals"}));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (hfn_cmd->parsed()) return run_hfn(hfn, out);
    if (nfd_cmd->parsed()) return run_nfd(nfd, out);
    if (kernels_cmd->parsed()) return run_kernels(kernels, out);
    if (synth_cmd->parsed()) return run_synth(synth, out);
    if (sweep_cmd->parsed()) return run_sweep(sweep, out);
    if (eval_cmd->parsed()) return run_eval(eval, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SolverFailure& e) {
    err << "error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  err << "error: no command given\n";
  return kExitUsage;
}

}  // namespace sgrecon::cli
