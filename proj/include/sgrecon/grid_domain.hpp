#pragma once

#include <cstdint>
#include <vector>

namespace sgrecon {

struct Pixel {
  int u = 0;
  int v = 0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
};

struct PixelOffset {
  int du = 0;
  int dv = 0;
  friend bool operator==(const PixelOffset&, const PixelOffset&) = default;
};

/// Pinhole camera intrinsics in pixel units.
struct CameraIntrinsics {
  double f = 1.0;   // focal length (pixels), must be positive
  double cu = 0.0;  // principal point
  double cv = 0.0;
};

/// Immutable indexing of the foreground pixels of a binary mask.
///
/// Foreground pixels receive linear indices in row-major order (v outer,
/// u inner). Connected components are labeled under 8-neighborhood
/// adjacency, in first-encounter order. All queries are read-only and
/// safe to issue concurrently.
class PixelDomain {
 public:
  PixelDomain(int width, int height, const std::vector<std::uint8_t>& mask);

  int width() const { return width_; }
  int height() const { return height_; }
  int size() const { return static_cast<int>(pixels_.size()); }

  bool in_bounds(int u, int v) const {
    return u >= 0 && u < width_ && v >= 0 && v < height_;
  }
  bool contains(int u, int v) const {
    return in_bounds(u, v) && index_[flat(u, v)] >= 0;
  }
  /// Linear index of a foreground pixel, -1 for background/out of bounds.
  int index_of(int u, int v) const {
    return in_bounds(u, v) ? index_[flat(u, v)] : -1;
  }
  Pixel pixel_of(int index) const { return pixels_[static_cast<std::size_t>(index)]; }

  int component_of(int index) const { return component_[static_cast<std::size_t>(index)]; }
  int component_count() const { return static_cast<int>(component_sizes_.size()); }
  const std::vector<int>& component_sizes() const { return component_sizes_; }

 private:
  std::size_t flat(int u, int v) const {
    return static_cast<std::size_t>(v) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(u);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::int32_t> index_;      // width*height, -1 for background
  std::vector<Pixel> pixels_;            // linear index -> pixel
  std::vector<std::int32_t> component_;  // linear index -> component label
  std::vector<int> component_sizes_;
};

/// Builds a PixelDomain from a row-major mask (nonzero = foreground).
/// Throws std::invalid_argument on an empty mask.
PixelDomain build_domain(int width, int height, const std::vector<std::uint8_t>& mask);

/// A set of foreground pixels around a center pixel, ordered by
/// (distance, v, u) ascending; the center is always a member.
struct Neighborhood {
  Pixel center;
  std::vector<Pixel> members;
  std::vector<PixelOffset> offsets;  // members[i] - center
};

/// True iff the whole d x d block centered at the pixel lies in bounds
/// and inside the foreground. d must be odd.
bool has_square_neighborhood(const PixelDomain& domain, Pixel pixel, int d);

/// The k foreground pixels nearest to `pixel` under 2D Euclidean distance,
/// ties broken by (v, u) ascending. The center is always included.
Neighborhood knn_pixels(const PixelDomain& domain, Pixel pixel, int k);

/// Same as knn_pixels but the search is restricted to the connected
/// component of the query pixel (used when assembling per-component
/// operators so rows never couple separate components).
Neighborhood knn_pixels_in_component(const PixelDomain& domain, Pixel pixel, int k);

/// The k foreground pixels in the window x window box around `pixel`
/// whose unprojected 3D points p = ((u-cu)z/f, (v-cv)z/f, z) are nearest
/// to the center's point. Ties broken by (v, u). `depth` is indexed by the
/// domain's linear ordering. Throws if the window holds fewer than k
/// candidates.
Neighborhood knn_points3d(const PixelDomain& domain, const std::vector<double>& depth,
                          const CameraIntrinsics& intrinsics, Pixel pixel, int k, int window);

/// Component-restricted variant of knn_points3d.
Neighborhood knn_points3d_in_component(const PixelDomain& domain, const std::vector<double>& depth,
                                       const CameraIntrinsics& intrinsics, Pixel pixel, int k,
                                       int window);

/// Number of foreground pixels of the component containing `pixel` that lie
/// inside the window x window box around it.
int component_pixels_in_window(const PixelDomain& domain, Pixel pixel, int window);

}  // namespace sgrecon
