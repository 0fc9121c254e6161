#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sgrecon/grid_domain.hpp"

namespace sgrecon {

/// Float image in memory: row-major, top-to-bottom, channels interleaved.
/// PFM files store rows bottom-to-top; readers and writers normalize.
struct FloatMap {
  int width = 0;
  int height = 0;
  int channels = 1;  // 1 = depth, 3 = normals
  std::vector<float> data;

  float at(int u, int v, int c = 0) const {
    return data[(static_cast<std::size_t>(v) * width + u) * channels + static_cast<std::size_t>(c)];
  }
  float& at(int u, int v, int c = 0) {
    return data[(static_cast<std::size_t>(v) * width + u) * channels + static_cast<std::size_t>(c)];
  }
};

/// PFM: "Pf" (1 channel) or "PF" (3 channels); a negative scale marks
/// little-endian payloads. The scale magnitude is ignored on read and
/// written as -1.0, so write(read(f)) is byte-identical for files this
/// writer produced.
FloatMap read_pfm(std::istream& in, const std::string& name = "<stream>");
FloatMap read_pfm_file(const std::string& path);
void write_pfm(std::ostream& out, const FloatMap& map);
void write_pfm_file(const std::string& path, const FloatMap& map);

/// Binary PGM (P5, maxval <= 255); nonzero bytes are foreground.
struct MaskImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> mask;  // 0 or 1, row-major top-to-bottom
};
MaskImage read_pgm_mask(std::istream& in, const std::string& name = "<stream>");
MaskImage read_pgm_mask_file(const std::string& path);
void write_pgm_mask(std::ostream& out, const MaskImage& mask);
void write_pgm_mask_file(const std::string& path, const MaskImage& mask);

/// Plain text "f=", "cu=", "cv=" lines in any order; '#' starts a comment.
CameraIntrinsics read_intrinsics(std::istream& in, const std::string& name = "<stream>");
CameraIntrinsics read_intrinsics_file(const std::string& path);

/// Wavefront OBJ of the depth surface: one vertex per foreground pixel
/// ((u, v, z) orthographic, unprojected through the intrinsics under
/// perspective), triangles over complete or three-quarter foreground quads.
void write_obj_mesh(std::ostream& out, const PixelDomain& domain, const std::vector<double>& z,
                    bool perspective = false, const CameraIntrinsics* intrinsics = nullptr);

}  // namespace sgrecon
