#include "sgrecon/grid_domain.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <tuple>

namespace sgrecon {

PixelDomain::PixelDomain(int width, int height, const std::vector<std::uint8_t>& mask)
    : width_(width), height_(height) {
  if (width <= 0 || height <= 0 || mask.size() != static_cast<std::size_t>(width) * height) {
    throw std::invalid_argument("mask dimensions mismatch");
  }
  index_.assign(mask.size(), -1);
  for (int v = 0; v < height_; ++v) {
    for (int u = 0; u < width_; ++u) {
      if (mask[flat(u, v)] != 0) {
        index_[flat(u, v)] = static_cast<std::int32_t>(pixels_.size());
        pixels_.push_back(Pixel{u, v});
      }
    }
  }
  if (pixels_.empty()) throw std::invalid_argument("empty domain");

  // 8-connected flood fill, labels in first-encounter (row-major) order.
  component_.assign(pixels_.size(), -1);
  std::vector<int> stack;
  for (std::size_t start = 0; start < pixels_.size(); ++start) {
    if (component_[start] >= 0) continue;
    const int label = static_cast<int>(component_sizes_.size());
    component_sizes_.push_back(0);
    stack.push_back(static_cast<int>(start));
    component_[start] = label;
    while (!stack.empty()) {
      const int idx = stack.back();
      stack.pop_back();
      ++component_sizes_[static_cast<std::size_t>(label)];
      const Pixel p = pixels_[static_cast<std::size_t>(idx)];
      for (int dv = -1; dv <= 1; ++dv) {
        for (int du = -1; du <= 1; ++du) {
          if (du == 0 && dv == 0) continue;
          const int ni = index_of(p.u + du, p.v + dv);
          if (ni >= 0 && component_[static_cast<std::size_t>(ni)] < 0) {
            component_[static_cast<std::size_t>(ni)] = label;
            stack.push_back(ni);
          }
        }
      }
    }
  }
}

PixelDomain build_domain(int width, int height, const std::vector<std::uint8_t>& mask) {
  return PixelDomain(width, height, mask);
}

bool has_square_neighborhood(const PixelDomain& domain, Pixel pixel, int d) {
  const int h = d / 2;
  for (int dv = -h; dv <= h; ++dv) {
    for (int du = -h; du <= h; ++du) {
      if (!domain.contains(pixel.u + du, pixel.v + dv)) return false;
    }
  }
  return true;
}

namespace {

struct Candidate {
  long long d2;
  int v;
  int u;
};

bool candidate_less(const Candidate& a, const Candidate& b) {
  return std::tie(a.d2, a.v, a.u) < std::tie(b.d2, b.v, b.u);
}

Neighborhood finish(Pixel center, std::vector<Candidate> picked) {
  std::sort(picked.begin(), picked.end(), candidate_less);
  Neighborhood nb;
  nb.center = center;
  nb.members.reserve(picked.size());
  nb.offsets.reserve(picked.size());
  for (const Candidate& c : picked) {
    nb.members.push_back(Pixel{c.u, c.v});
    nb.offsets.push_back(PixelOffset{c.u - center.u, c.v - center.v});
  }
  return nb;
}

// Exact KNN by expanding Chebyshev rings. A pixel at ring r has squared
// Euclidean distance >= r*r, so once K candidates are held the search can
// stop at the first ring with r*r beyond the worst kept distance (ties are
// impossible past that ring because distances are integers).
Neighborhood knn_rings(const PixelDomain& domain, Pixel pixel, int k, int restrict_component) {
  if (domain.index_of(pixel.u, pixel.v) < 0) throw std::invalid_argument("pixel outside domain");
  const int limit = restrict_component >= 0
                        ? domain.component_sizes()[static_cast<std::size_t>(restrict_component)]
                        : domain.size();
  if (k < 1 || k > limit) throw std::invalid_argument("neighborhood exceeds domain");

  auto accept = [&](int u, int v) -> bool {
    const int idx = domain.index_of(u, v);
    if (idx < 0) return false;
    return restrict_component < 0 || domain.component_of(idx) == restrict_component;
  };

  // Max-heap keyed by (d2, v, u): top is the worst candidate kept so far.
  std::priority_queue<Candidate, std::vector<Candidate>, decltype(&candidate_less)> heap(
      &candidate_less);
  const int r_max = std::max(std::max(pixel.u, domain.width() - 1 - pixel.u),
                             std::max(pixel.v, domain.height() - 1 - pixel.v));
  for (int r = 0; r <= r_max; ++r) {
    if (static_cast<int>(heap.size()) == k &&
        static_cast<long long>(r) * r > heap.top().d2) {
      break;
    }
    auto offer = [&](int u, int v) {
      if (!accept(u, v)) return;
      const long long du = u - pixel.u;
      const long long dv = v - pixel.v;
      Candidate c{du * du + dv * dv, v, u};
      if (static_cast<int>(heap.size()) < k) {
        heap.push(c);
      } else if (candidate_less(c, heap.top())) {
        heap.pop();
        heap.push(c);
      }
    };
    if (r == 0) {
      offer(pixel.u, pixel.v);
      continue;
    }
    for (int du = -r; du <= r; ++du) {
      offer(pixel.u + du, pixel.v - r);
      offer(pixel.u + du, pixel.v + r);
    }
    for (int dv = -r + 1; dv <= r - 1; ++dv) {
      offer(pixel.u - r, pixel.v + dv);
      offer(pixel.u + r, pixel.v + dv);
    }
  }

  std::vector<Candidate> picked;
  picked.reserve(heap.size());
  while (!heap.empty()) {
    picked.push_back(heap.top());
    heap.pop();
  }
  return finish(pixel, std::move(picked));
}

struct Candidate3d {
  double d2;
  int v;
  int u;
};

Neighborhood knn3d_window(const PixelDomain& domain, const std::vector<double>& depth,
                          const CameraIntrinsics& intrinsics, Pixel pixel, int k, int window,
                          int restrict_component) {
  const int center_idx = domain.index_of(pixel.u, pixel.v);
  if (center_idx < 0) throw std::invalid_argument("pixel outside domain");
  if (depth.size() != static_cast<std::size_t>(domain.size())) {
    throw std::invalid_argument("depth size mismatch");
  }
  auto unproject = [&](int u, int v, double z, double p[3]) {
    p[0] = (u - intrinsics.cu) * z / intrinsics.f;
    p[1] = (v - intrinsics.cv) * z / intrinsics.f;
    p[2] = z;
  };
  double p0[3];
  unproject(pixel.u, pixel.v, depth[static_cast<std::size_t>(center_idx)], p0);

  const int h = window / 2;
  std::vector<Candidate3d> cands;
  for (int v = pixel.v - h; v <= pixel.v + h; ++v) {
    for (int u = pixel.u - h; u <= pixel.u + h; ++u) {
      const int idx = domain.index_of(u, v);
      if (idx < 0) continue;
      if (restrict_component >= 0 && domain.component_of(idx) != restrict_component) continue;
      double p[3];
      unproject(u, v, depth[static_cast<std::size_t>(idx)], p);
      const double dx = p[0] - p0[0];
      const double dy = p[1] - p0[1];
      const double dz = p[2] - p0[2];
      cands.push_back(Candidate3d{dx * dx + dy * dy + dz * dz, v, u});
    }
  }
  if (static_cast<int>(cands.size()) < k) {
    throw std::runtime_error("window too small for K");
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate3d& a, const Candidate3d& b) {
    return std::tie(a.d2, a.v, a.u) < std::tie(b.d2, b.v, b.u);
  });
  cands.resize(static_cast<std::size_t>(k));

  Neighborhood nb;
  nb.center = pixel;
  nb.members.reserve(cands.size());
  nb.offsets.reserve(cands.size());
  for (const Candidate3d& c : cands) {
    nb.members.push_back(Pixel{c.u, c.v});
    nb.offsets.push_back(PixelOffset{c.u - pixel.u, c.v - pixel.v});
  }
  return nb;
}

}  // namespace

Neighborhood knn_pixels(const PixelDomain& domain, Pixel pixel, int k) {
  return knn_rings(domain, pixel, k, -1);
}

Neighborhood knn_pixels_in_component(const PixelDomain& domain, Pixel pixel, int k) {
  const int idx = domain.index_of(pixel.u, pixel.v);
  if (idx < 0) throw std::invalid_argument("pixel outside domain");
  return knn_rings(domain, pixel, k, domain.component_of(idx));
}

Neighborhood knn_points3d(const PixelDomain& domain, const std::vector<double>& depth,
                          const CameraIntrinsics& intrinsics, Pixel pixel, int k, int window) {
  return knn3d_window(domain, depth, intrinsics, pixel, k, window, -1);
}

Neighborhood knn_points3d_in_component(const PixelDomain& domain, const std::vector<double>& depth,
                                       const CameraIntrinsics& intrinsics, Pixel pixel, int k,
                                       int window) {
  const int idx = domain.index_of(pixel.u, pixel.v);
  if (idx < 0) throw std::invalid_argument("pixel outside domain");
  return knn3d_window(domain, depth, intrinsics, pixel, k, window, domain.component_of(idx));
}

int component_pixels_in_window(const PixelDomain& domain, Pixel pixel, int window) {
  const int idx = domain.index_of(pixel.u, pixel.v);
  if (idx < 0) throw std::invalid_argument("pixel outside domain");
  const int comp = domain.component_of(idx);
  const int h = window / 2;
  int count = 0;
  for (int v = pixel.v - h; v <= pixel.v + h; ++v) {
    for (int u = pixel.u - h; u <= pixel.u + h; ++u) {
      const int i = domain.index_of(u, v);
      if (i >= 0 && domain.component_of(i) == comp) ++count;
    }
  }
  return count;
}

}  // namespace sgrecon
