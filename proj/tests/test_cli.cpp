#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sgrecon/cli.hpp"
#include "sgrecon/image_io.hpp"

using namespace sgrecon;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Run r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::path("/tmp/sgrecon_cli_tests") / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

double parse_metric(const std::string& line) { return std::stod(line); }

/// synth fixture shared by the pipeline tests.
fs::path peaks_fixture(const std::string& name, const std::string& extra_sigma = "0",
                       const std::string& seed = "1", const std::string& size = "48x48") {
  const fs::path dir = fresh_dir(name);
  const Run r = run_cli({"synth", "--surface", "peaks", "--size", size, "--sigma", extra_sigma,
                         "--seed", seed, "--out-dir", dir.string()});
  REQUIRE(r.code == 0);
  return dir;
}

}  // namespace

TEST_CASE("missing subcommand and unknown flags are usage errors") {
  CHECK(run_cli({}).code == 1);
  CHECK(run_cli({"frobnicate"}).code == 1);
  CHECK(run_cli({"eval", "--bogus"}).code == 1);
  const Run help = run_cli({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("Subcommands") != std::string::npos);
}

TEST_CASE("perspective reconstruction demands intrinsics by name") {
  const Run r = run_cli({"hfn", "--normals", "n.pfm", "--mask", "m.pgm", "--projection", "persp",
                         "--out", "z.pfm"});
  CHECK(r.code == 1);
  CHECK(r.err.find("--intrinsics") != std::string::npos);

  const Run r3d = run_cli({"nfd", "--depth", "z.pfm", "--mask", "m.pgm", "--knn3d", "--out",
                           "n.pfm"});
  CHECK(r3d.code == 1);
  CHECK(r3d.err.find("--intrinsics") != std::string::npos);
}

TEST_CASE("prior and omega must arrive together") {
  const auto base = std::vector<std::string>{"hfn",   "--normals", "n.pfm", "--mask", "m.pgm",
                                             "--projection", "ortho", "--out", "z.pfm"};
  auto with_prior = base;
  with_prior.insert(with_prior.end(), {"--prior", "p.pfm"});
  CHECK(run_cli(with_prior).code == 1);
  auto with_omega = base;
  with_omega.insert(with_omega.end(), {"--omega", "10"});
  CHECK(run_cli(with_omega).code == 1);
}

TEST_CASE("synth writes the three fixture files") {
  const fs::path dir = fresh_dir("synth_files");
  const Run r = run_cli({"synth", "--surface", "peaks", "--size", "32x32", "--sigma", "0.05",
                         "--seed", "7", "--out-dir", dir.string()});
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "depth_gt.pfm"));
  CHECK(fs::exists(dir / "normals.pfm"));
  CHECK(fs::exists(dir / "mask.pgm"));
  const FloatMap normals = read_pfm_file((dir / "normals.pfm").string());
  CHECK(normals.channels == 3);
  CHECK(normals.width == 32);

  CHECK(run_cli({"synth", "--size", "12", "--out-dir", dir.string()}).code == 1);
  CHECK(run_cli({"synth", "--size", "4x4", "--out-dir", dir.string()}).code == 2);
}

TEST_CASE("seeded synth runs are bitwise reproducible") {
  const fs::path a = peaks_fixture("repro_a", "0.1", "42");
  const fs::path b = peaks_fixture("repro_b", "0.1", "42");
  const fs::path c = peaks_fixture("repro_c", "0.1", "43");
  CHECK(slurp(a / "normals.pfm") == slurp(b / "normals.pfm"));
  CHECK(slurp(a / "depth_gt.pfm") == slurp(b / "depth_gt.pfm"));
  CHECK(slurp(a / "normals.pfm") != slurp(c / "normals.pfm"));
}

TEST_CASE("hfn integrates the noiseless peaks fixture below 1e-2 offset rmse") {
  const fs::path dir = peaks_fixture("pipeline");
  const Run hfn = run_cli({"hfn", "--normals", (dir / "normals.pfm").string(), "--mask",
                           (dir / "mask.pgm").string(), "--projection", "ortho", "--lambda", "0.1",
                           "--out", (dir / "z.pfm").string(), "--export-obj",
                           (dir / "z.obj").string()});
  CHECK(hfn.code == 0);
  const Run eval = run_cli({"eval", "--pred", (dir / "z.pfm").string(), "--gt",
                            (dir / "depth_gt.pfm").string(), "--mask", (dir / "mask.pgm").string(),
                            "--metric", "rmse-offset"});
  CHECK(eval.code == 0);
  CHECK(parse_metric(eval.out) <= 1e-2);

  // The exported mesh covers the full grid: 48*48 vertices, 2*47*47 faces.
  const std::string obj = slurp(dir / "z.obj");
  std::size_t vertices = 0, faces = 0;
  std::istringstream lines(obj);
  for (std::string line; std::getline(lines, line);) {
    vertices += line.rfind("v ", 0) == 0;
    faces += line.rfind("f ", 0) == 0;
  }
  CHECK(vertices == 48u * 48u);
  CHECK(faces == 2u * 47u * 47u);
}

TEST_CASE("eval prints zero for identical inputs and runs all metrics") {
  const fs::path dir = peaks_fixture("eval_metrics");
  const std::string gt = (dir / "depth_gt.pfm").string();
  const std::string mask = (dir / "mask.pgm").string();
  const Run offset = run_cli({"eval", "--pred", gt, "--gt", gt, "--mask", mask, "--metric",
                              "rmse-offset"});
  CHECK(offset.code == 0);
  CHECK(parse_metric(offset.out) == 0.0);
  const Run scale = run_cli({"eval", "--pred", gt, "--gt", gt, "--mask", mask, "--metric",
                             "rmse-scale"});
  CHECK(scale.code == 0);
  CHECK(parse_metric(scale.out) == 0.0);
  const std::string nrm = (dir / "normals.pfm").string();
  const Run mae = run_cli({"eval", "--pred", nrm, "--gt", nrm, "--mask", mask, "--metric",
                           "mae-normals"});
  CHECK(mae.code == 0);
  CHECK(parse_metric(mae.out) == 0.0);
}

TEST_CASE("nfd emits normals close to the synth reference") {
  const fs::path dir = peaks_fixture("nfd_roundtrip");
  const Run nfd = run_cli({"nfd", "--depth", (dir / "depth_gt.pfm").string(), "--mask",
                           (dir / "mask.pgm").string(), "--out", (dir / "n.pfm").string()});
  CHECK(nfd.code == 0);
  const Run mae = run_cli({"eval", "--pred", (dir / "n.pfm").string(), "--gt",
                           (dir / "normals.pfm").string(), "--mask", (dir / "mask.pgm").string(),
                           "--metric", "mae-normals"});
  CHECK(mae.code == 0);
  CHECK(parse_metric(mae.out) <= 0.5);
}

TEST_CASE("kernels prints the 3x3 order-2 derivative stencil") {
  const Run r = run_cli({"kernels", "--ksize", "3", "--order", "2", "--target", "du"});
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  int count = 0;
  for (std::string line; std::getline(lines, line); ++count) {
    std::istringstream row(line);
    int du = 0, dv = 0;
    double w = 0.0;
    REQUIRE((row >> du >> dv >> w));
    CHECK(std::abs(w - du / 6.0) <= 1e-12);
  }
  CHECK(count == 9);
}

TEST_CASE("kernels accepts a custom neighborhood file") {
  const fs::path dir = fresh_dir("kernels_custom");
  {
    std::ofstream f(dir / "cross.txt");
    f << "# five-point cross\n0 -1\n-1 0\n0 0\n1 0\n0 1\n";
  }
  const Run r = run_cli({"kernels", "--ksize", "3", "--order", "1", "--target", "du",
                         "--neighborhood", (dir / "cross.txt").string()});
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  int count = 0;
  for (std::string line; std::getline(lines, line); ++count) {
    std::istringstream row(line);
    int du = 0, dv = 0;
    double w = 0.0;
    REQUIRE((row >> du >> dv >> w));
    CHECK(std::abs(w - du / 2.0) <= 1e-12);
  }
  CHECK(count == 5);

  {
    std::ofstream f(dir / "no_center.txt");
    f << "1 0\n0 1\n";
  }
  const Run bad = run_cli({"kernels", "--ksize", "3", "--order", "1", "--target", "du",
                           "--neighborhood", (dir / "no_center.txt").string()});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("center") != std::string::npos);
}

TEST_CASE("data problems exit with code 2") {
  const fs::path dir = peaks_fixture("data_errors");

  const Run missing = run_cli({"eval", "--pred", "/tmp/sgrecon_does_not_exist.pfm", "--gt",
                               (dir / "depth_gt.pfm").string(), "--mask",
                               (dir / "mask.pgm").string(), "--metric", "rmse-offset"});
  CHECK(missing.code == 2);

  {
    std::ofstream junk(dir / "junk.pfm", std::ios::binary);
    junk << "not a pfm at all";
  }
  const Run malformed = run_cli({"eval", "--pred", (dir / "junk.pfm").string(), "--gt",
                                 (dir / "depth_gt.pfm").string(), "--mask",
                                 (dir / "mask.pgm").string(), "--metric", "rmse-offset"});
  CHECK(malformed.code == 2);

  const fs::path small = peaks_fixture("data_errors_small", "0", "1", "24x24");
  const Run mismatch = run_cli({"hfn", "--normals", (dir / "normals.pfm").string(), "--mask",
                                (small / "mask.pgm").string(), "--projection", "ortho", "--out",
                                (dir / "z.pfm").string()});
  CHECK(mismatch.code == 2);
  CHECK(mismatch.err.find("dimension mismatch") != std::string::npos);

  FloatMap zeros;
  zeros.width = 48;
  zeros.height = 48;
  zeros.channels = 3;
  zeros.data.assign(48 * 48 * 3, 0.0f);
  write_pfm_file((dir / "zeros.pfm").string(), zeros);
  const Run degenerate = run_cli({"hfn", "--normals", (dir / "zeros.pfm").string(), "--mask",
                                  (dir / "mask.pgm").string(), "--projection", "ortho", "--out",
                                  (dir / "z.pfm").string()});
  CHECK(degenerate.code == 2);
  CHECK(degenerate.err.find("zero-length normal") != std::string::npos);
}

TEST_CASE("a starved iteration budget exits with code 3") {
  const fs::path dir = peaks_fixture("solver_budget");
  const Run r = run_cli({"hfn", "--normals", (dir / "normals.pfm").string(), "--mask",
                         (dir / "mask.pgm").string(), "--projection", "ortho", "--max-iters", "3",
                         "--out", (dir / "z.pfm").string()});
  CHECK(r.code == 3);
  CHECK(r.err.find("converge") != std::string::npos);
}

TEST_CASE("sweep writes a reproducible csv") {
  const fs::path dir = fresh_dir("sweep_csv");
  const std::vector<std::string> args = {"sweep",    "--surface", "peaks",  "--size",
                                         "24x24",    "--sigmas",  "0,0.05", "--methods",
                                         "sg,fw",    "--trials",  "2",      "--seed",
                                         "11",       "--out",     (dir / "sweep.csv").string()};
  CHECK(run_cli(args).code == 0);
  const std::string first = slurp(dir / "sweep.csv");
  CHECK(first.rfind("sigma,method,trial,rmse\n", 0) == 0);
  // 2 sigmas x 2 methods x 2 trials data rows plus the header.
  std::size_t lines = 0;
  for (char ch : first) lines += ch == '\n';
  CHECK(lines == 9u);
  CHECK(run_cli(args).code == 0);
  CHECK(slurp(dir / "sweep.csv") == first);

  const Run to_stdout = run_cli({"sweep", "--size", "24x24", "--sigmas", "0", "--methods", "sg",
                                 "--trials", "1"});
  CHECK(to_stdout.code == 0);
  CHECK(to_stdout.out.rfind("sigma,method,trial,rmse\n", 0) == 0);
}

TEST_CASE("hfn runs perspectively with intrinsics from disk") {
  const fs::path dir = fresh_dir("persp_cli");
  // Fronto-parallel plane at z=1: per-pixel normals (0,0,1).
  FloatMap normals;
  normals.width = 16;
  normals.height = 16;
  normals.channels = 3;
  normals.data.assign(16 * 16 * 3, 0.0f);
  for (int v = 0; v < 16; ++v) {
    for (int u = 0; u < 16; ++u) normals.at(u, v, 2) = 1.0f;
  }
  write_pfm_file((dir / "n.pfm").string(), normals);
  MaskImage mask;
  mask.width = 16;
  mask.height = 16;
  mask.mask.assign(256, 1);
  write_pgm_mask_file((dir / "mask.pgm").string(), mask);
  {
    std::ofstream k(dir / "cam.txt");
    k << "f=100\ncu=7.5\ncv=7.5\n";
  }
  const Run r = run_cli({"hfn", "--normals", (dir / "n.pfm").string(), "--mask",
                         (dir / "mask.pgm").string(), "--projection", "persp", "--intrinsics",
                         (dir / "cam.txt").string(), "--lambda", "0", "--tol", "1e-13", "--out",
                         (dir / "z.pfm").string()});
  REQUIRE(r.code == 0);
  const FloatMap z = read_pfm_file((dir / "z.pfm").string());
  for (float value : z.data) CHECK(std::abs(value - 1.0f) <= 1e-6f);
}
