#include "sgrecon/sparse_ops.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "sgrecon/parallel.hpp"

namespace sgrecon {

namespace {

constexpr double kDropTolerance = 1e-14;

void check_finite(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("non-finite operator entry");
}

}  // namespace

SparseOperator SparseOperator::from_triplets(int rows, int cols, std::vector<Triplet> triplets) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("negative operator shape");
  SparseOperator out;
  out.rows_ = rows;
  out.cols_ = cols;
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return std::tie(a.row, a.col) < std::tie(b.row, b.col);
  });
  out.row_ptr_.assign(static_cast<std::size_t>(rows) + 1, 0);
  out.col_idx_.reserve(triplets.size());
  out.values_.reserve(triplets.size());
  for (std::size_t i = 0; i < triplets.size();) {
    const int r = triplets[i].row;
    const int c = triplets[i].col;
    if (r < 0 || r >= rows || c < 0 || c >= cols) throw std::invalid_argument("triplet out of range");
    double sum = 0.0;
    for (; i < triplets.size() && triplets[i].row == r && triplets[i].col == c; ++i) {
      check_finite(triplets[i].value);
      sum += triplets[i].value;
    }
    out.col_idx_.push_back(c);
    out.values_.push_back(sum);
    out.row_ptr_[static_cast<std::size_t>(r) + 1] = static_cast<std::int64_t>(out.col_idx_.size());
  }
  for (std::size_t r = 1; r < out.row_ptr_.size(); ++r) {
    out.row_ptr_[r] = std::max(out.row_ptr_[r], out.row_ptr_[r - 1]);
  }
  return out;
}

SparseOperator SparseOperator::identity(int n) {
  SparseOperator out;
  out.rows_ = n;
  out.cols_ = n;
  out.row_ptr_.resize(static_cast<std::size_t>(n) + 1);
  out.col_idx_.resize(static_cast<std::size_t>(n));
  out.values_.assign(static_cast<std::size_t>(n), 1.0);
  for (int i = 0; i <= n; ++i) out.row_ptr_[static_cast<std::size_t>(i)] = i;
  for (int i = 0; i < n; ++i) out.col_idx_[static_cast<std::size_t>(i)] = i;
  return out;
}

SparseOperator SparseOperator::transposed() const {
  SparseOperator out;
  out.rows_ = cols_;
  out.cols_ = rows_;
  out.row_ptr_.assign(static_cast<std::size_t>(cols_) + 1, 0);
  for (int c : col_idx_) ++out.row_ptr_[static_cast<std::size_t>(c) + 1];
  for (std::size_t r = 1; r < out.row_ptr_.size(); ++r) out.row_ptr_[r] += out.row_ptr_[r - 1];
  out.col_idx_.resize(col_idx_.size());
  out.values_.resize(values_.size());
  std::vector<std::int64_t> cursor(out.row_ptr_.begin(), out.row_ptr_.end() - 1);
  for (int r = 0; r < rows_; ++r) {
    for (std::int64_t i = row_ptr_[static_cast<std::size_t>(r)]; i < row_ptr_[static_cast<std::size_t>(r) + 1]; ++i) {
      const int c = col_idx_[static_cast<std::size_t>(i)];
      const std::int64_t slot = cursor[static_cast<std::size_t>(c)]++;
      out.col_idx_[static_cast<std::size_t>(slot)] = r;
      out.values_[static_cast<std::size_t>(slot)] = values_[static_cast<std::size_t>(i)];
    }
  }
  return out;
}

SparseOperator SparseOperator::row_scaled(const std::vector<double>& scale) const {
  if (static_cast<int>(scale.size()) != rows_) throw std::invalid_argument("scale length mismatch");
  SparseOperator out = *this;
  for (int r = 0; r < rows_; ++r) {
    for (std::int64_t i = row_ptr_[static_cast<std::size_t>(r)]; i < row_ptr_[static_cast<std::size_t>(r) + 1]; ++i) {
      out.values_[static_cast<std::size_t>(i)] *= scale[static_cast<std::size_t>(r)];
    }
  }
  return out;
}

SparseOperator SparseOperator::plus_diagonal(const std::vector<double>& d) const {
  if (rows_ != cols_ || static_cast<int>(d.size()) != rows_) {
    throw std::invalid_argument("diagonal length mismatch");
  }
  std::vector<Triplet> triplets;
  triplets.reserve(values_.size() + d.size());
  for (int r = 0; r < rows_; ++r) {
    for (std::int64_t i = row_ptr_[static_cast<std::size_t>(r)]; i < row_ptr_[static_cast<std::size_t>(r) + 1]; ++i) {
      triplets.push_back(Triplet{r, col_idx_[static_cast<std::size_t>(i)], values_[static_cast<std::size_t>(i)]});
    }
    triplets.push_back(Triplet{r, r, d[static_cast<std::size_t>(r)]});
  }
  return from_triplets(rows_, cols_, std::move(triplets));
}

SparseOperator SparseOperator::dropped_small(double tol) const {
  SparseOperator out;
  out.rows_ = rows_;
  out.cols_ = cols_;
  out.row_ptr_.assign(static_cast<std::size_t>(rows_) + 1, 0);
  for (int r = 0; r < rows_; ++r) {
    for (std::int64_t i = row_ptr_[static_cast<std::size_t>(r)]; i < row_ptr_[static_cast<std::size_t>(r) + 1]; ++i) {
      if (std::fabs(values_[static_cast<std::size_t>(i)]) < tol) continue;
      out.col_idx_.push_back(col_idx_[static_cast<std::size_t>(i)]);
      out.values_.push_back(values_[static_cast<std::size_t>(i)]);
    }
    out.row_ptr_[static_cast<std::size_t>(r) + 1] = static_cast<std::int64_t>(out.col_idx_.size());
  }
  return out;
}

double SparseOperator::inf_norm() const {
  double best = 0.0;
  for (int r = 0; r < rows_; ++r) {
    double sum = 0.0;
    for (std::int64_t i = row_ptr_[static_cast<std::size_t>(r)]; i < row_ptr_[static_cast<std::size_t>(r) + 1]; ++i) {
      sum += std::fabs(values_[static_cast<std::size_t>(i)]);
    }
    best = std::max(best, sum);
  }
  return best;
}

std::vector<double> matvec(const SparseOperator& a, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != a.cols()) throw std::invalid_argument("matvec dimension mismatch");
  std::vector<double> y(static_cast<std::size_t>(a.rows()), 0.0);
  parallel_for(0, a.rows(), [&](int r) {
    const SparseOperator::RowView row = a.row(r);
    double sum = 0.0;
    for (int i = 0; i < row.size; ++i) sum += row.values[i] * x[static_cast<std::size_t>(row.cols[i])];
    y[static_cast<std::size_t>(r)] = sum;
  });
  return y;
}

std::vector<double> matvec_transpose(const SparseOperator& a, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != a.rows()) throw std::invalid_argument("matvec dimension mismatch");
  std::vector<double> y(static_cast<std::size_t>(a.cols()), 0.0);
  for (int r = 0; r < a.rows(); ++r) {
    const SparseOperator::RowView row = a.row(r);
    const double xr = x[static_cast<std::size_t>(r)];
    if (xr == 0.0) continue;
    for (int i = 0; i < row.size; ++i) y[static_cast<std::size_t>(row.cols[i])] += row.values[i] * xr;
  }
  return y;
}

SparseOperator vstack(const std::vector<std::pair<double, const SparseOperator*>>& blocks) {
  if (blocks.empty()) throw std::invalid_argument("vstack of no blocks");
  const int cols = blocks.front().second->cols();
  SparseOperator out;
  out.cols_ = cols;
  out.row_ptr_.assign(1, 0);
  for (const auto& [scale, block] : blocks) {
    if (block->cols() != cols) throw std::invalid_argument("vstack column mismatch");
    out.rows_ += block->rows();
    for (int r = 0; r < block->rows(); ++r) {
      const SparseOperator::RowView row = block->row(r);
      for (int i = 0; i < row.size; ++i) {
        out.col_idx_.push_back(row.cols[i]);
        out.values_.push_back(scale * row.values[i]);
      }
      out.row_ptr_.push_back(static_cast<std::int64_t>(out.col_idx_.size()));
    }
  }
  return out;
}

void write_triplets(std::ostream& out, const SparseOperator& a) {
  out << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
  char buf[64];
  for (int r = 0; r < a.rows(); ++r) {
    const SparseOperator::RowView row = a.row(r);
    for (int i = 0; i < row.size; ++i) {
      std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", r, row.cols[i], row.values[i]);
      out << buf;
    }
  }
}

namespace {

using RowEntries = std::vector<std::pair<int, double>>;

struct RowBuffers {
  std::vector<RowEntries> du;
  std::vector<RowEntries> dv;
  std::vector<RowEntries> smooth;
  explicit RowBuffers(int n) : du(static_cast<std::size_t>(n)), dv(static_cast<std::size_t>(n)), smooth(static_cast<std::size_t>(n)) {}
};

SparseOperator rows_to_operator(const std::vector<RowEntries>& rows, int n) {
  std::vector<Triplet> triplets;
  std::size_t total = 0;
  for (const RowEntries& r : rows) total += r.size();
  triplets.reserve(total);
  for (int r = 0; r < n; ++r) {
    for (const auto& [c, w] : rows[static_cast<std::size_t>(r)]) triplets.push_back(Triplet{r, c, w});
  }
  return SparseOperator::from_triplets(n, n, std::move(triplets)).dropped_small(kDropTolerance);
}

void scatter_kernel(const PixelDomain& domain, Pixel p, const SgKernel& kernel, RowEntries& row) {
  row.clear();
  row.reserve(kernel.offsets.size());
  for (std::size_t i = 0; i < kernel.offsets.size(); ++i) {
    const int col = domain.index_of(p.u + kernel.offsets[i].du, p.v + kernel.offsets[i].dv);
    row.emplace_back(col, kernel.weights[i]);
  }
}

void scatter_neighborhood(const PixelDomain& domain, const Neighborhood& nb,
                          const SgKernel& kernel, RowEntries& row) {
  row.clear();
  row.reserve(nb.members.size());
  for (std::size_t i = 0; i < nb.members.size(); ++i) {
    row.emplace_back(domain.index_of(nb.members[i].u, nb.members[i].v), kernel.weights[i]);
  }
}

// Classic stencils keep their fixed weights; a stencil applies only when all
// of its taps land in the foreground.
bool try_classic(const PixelDomain& domain, Pixel p, const SgKernel& kernel, RowEntries& row) {
  row.clear();
  for (std::size_t i = 0; i < kernel.offsets.size(); ++i) {
    const int col = domain.index_of(p.u + kernel.offsets[i].du, p.v + kernel.offsets[i].dv);
    if (col < 0) return false;
    row.emplace_back(col, kernel.weights[i]);
  }
  return true;
}

std::string degenerate_message(Pixel p) {
  return "degenerate neighborhood at pixel (" + std::to_string(p.u) + ", " + std::to_string(p.v) + ")";
}

}  // namespace

OperatorBundle assemble_operators(const PixelDomain& domain, const OperatorConfig& config,
                                  const std::vector<double>* depth,
                                  const CameraIntrinsics* intrinsics) {
  if (config.d < 1 || config.d % 2 == 0) throw std::invalid_argument("kernel size must be odd");
  if (config.window < 1 || config.window % 2 == 0) throw std::invalid_argument("window must be odd");
  if (config.kind == KernelKind::sg && monomial_count(config.k) > config.d * config.d) {
    throw std::invalid_argument("order too high for neighborhood");
  }
  const bool mode3d = config.mode == NeighborhoodMode::knn3d;
  if (mode3d) {
    if (depth == nullptr || intrinsics == nullptr) {
      throw std::invalid_argument("3d neighborhood mode requires depth and intrinsics");
    }
    if (depth->size() != static_cast<std::size_t>(domain.size())) {
      throw std::invalid_argument("depth size mismatch");
    }
  }

  const int n = domain.size();
  RowBuffers rows(n);
  std::vector<std::string> failures(static_cast<std::size_t>(n));

  if (config.kind == KernelKind::sg) {
    Neighborhood square;
    square.center = Pixel{0, 0};
    const int h = config.d / 2;
    for (int dv = -h; dv <= h; ++dv) {
      for (int du = -h; du <= h; ++du) {
        square.members.push_back(Pixel{du, dv});
        square.offsets.push_back(PixelOffset{du, dv});
      }
    }
    const SgKernel square_s = sg_kernel(square, config.k, KernelTarget::smooth);
    const SgKernel square_u = sg_kernel(square, config.k, KernelTarget::deriv_u);
    const SgKernel square_v = sg_kernel(square, config.k, KernelTarget::deriv_v);

    parallel_for(0, n, [&](int i) {
      const Pixel p = domain.pixel_of(i);
      try {
        if (!mode3d && has_square_neighborhood(domain, p, config.d)) {
          scatter_kernel(domain, p, square_u, rows.du[static_cast<std::size_t>(i)]);
          scatter_kernel(domain, p, square_v, rows.dv[static_cast<std::size_t>(i)]);
          scatter_kernel(domain, p, square_s, rows.smooth[static_cast<std::size_t>(i)]);
          return;
        }
        const int avail = mode3d ? component_pixels_in_window(domain, p, config.window)
                                 : domain.component_sizes()[static_cast<std::size_t>(domain.component_of(i))];
        const int k_neighbors = std::min(config.d * config.d, avail);
        const Neighborhood nb =
            mode3d ? knn_points3d_in_component(domain, *depth, *intrinsics, p, k_neighbors, config.window)
                   : knn_pixels_in_component(domain, p, k_neighbors);
        scatter_neighborhood(domain, nb, sg_kernel(nb, config.k, KernelTarget::deriv_u),
                             rows.du[static_cast<std::size_t>(i)]);
        scatter_neighborhood(domain, nb, sg_kernel(nb, config.k, KernelTarget::deriv_v),
                             rows.dv[static_cast<std::size_t>(i)]);
        scatter_neighborhood(domain, nb, sg_kernel(nb, config.k, KernelTarget::smooth),
                             rows.smooth[static_cast<std::size_t>(i)]);
      } catch (const std::exception&) {
        failures[static_cast<std::size_t>(i)] = degenerate_message(p);
      }
    });
  } else {
    const SgKernel fw_u = classic_kernel(KernelKind::fw, Axis::u);
    const SgKernel bw_u = classic_kernel(KernelKind::bw, Axis::u);
    const SgKernel c_u = classic_kernel(KernelKind::c, Axis::u);
    const SgKernel sc_u = classic_kernel(KernelKind::sc, Axis::u);
    const SgKernel fw_v = classic_kernel(KernelKind::fw, Axis::v);
    const SgKernel bw_v = classic_kernel(KernelKind::bw, Axis::v);
    const SgKernel c_v = classic_kernel(KernelKind::c, Axis::v);
    const SgKernel sc_v = classic_kernel(KernelKind::sc, Axis::v);

    auto chain = [&](Axis axis) -> std::vector<const SgKernel*> {
      const bool u = axis == Axis::u;
      switch (config.kind) {
        case KernelKind::fw:
          return u ? std::vector<const SgKernel*>{&fw_u, &bw_u} : std::vector<const SgKernel*>{&fw_v, &bw_v};
        case KernelKind::bw:
          return u ? std::vector<const SgKernel*>{&bw_u, &fw_u} : std::vector<const SgKernel*>{&bw_v, &fw_v};
        case KernelKind::c:
          return u ? std::vector<const SgKernel*>{&c_u, &fw_u, &bw_u}
                   : std::vector<const SgKernel*>{&c_v, &fw_v, &bw_v};
        case KernelKind::sc:
          return u ? std::vector<const SgKernel*>{&sc_u, &c_u, &fw_u, &bw_u}
                   : std::vector<const SgKernel*>{&sc_v, &c_v, &fw_v, &bw_v};
        case KernelKind::sg:
          break;
      }
      return {};
    };
    const std::vector<const SgKernel*> chain_u = chain(Axis::u);
    const std::vector<const SgKernel*> chain_v = chain(Axis::v);

    // 3x3 rounded-Gaussian smoothing, renormalized over the taps present so
    // constants are reproduced on any mask.
    const double gauss1d[3] = {1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0};

    parallel_for(0, n, [&](int i) {
      const Pixel p = domain.pixel_of(i);
      bool ok_u = false, ok_v = false;
      for (const SgKernel* k : chain_u) {
        if (try_classic(domain, p, *k, rows.du[static_cast<std::size_t>(i)])) {
          ok_u = true;
          break;
        }
      }
      for (const SgKernel* k : chain_v) {
        if (try_classic(domain, p, *k, rows.dv[static_cast<std::size_t>(i)])) {
          ok_v = true;
          break;
        }
      }
      if (!ok_u || !ok_v) {
        failures[static_cast<std::size_t>(i)] = degenerate_message(p);
        return;
      }
      RowEntries& srow = rows.smooth[static_cast<std::size_t>(i)];
      srow.clear();
      double total = 0.0;
      for (int dv = -1; dv <= 1; ++dv) {
        for (int du = -1; du <= 1; ++du) {
          const int col = domain.index_of(p.u + du, p.v + dv);
          if (col < 0) continue;
          const double w = gauss1d[du + 1] * gauss1d[dv + 1];
          srow.emplace_back(col, w);
          total += w;
        }
      }
      for (auto& [col, w] : srow) w /= total;
    });
  }

  for (int i = 0; i < n; ++i) {
    if (!failures[static_cast<std::size_t>(i)].empty()) {
      throw std::runtime_error(failures[static_cast<std::size_t>(i)]);
    }
  }

  OperatorBundle bundle;
  bundle.du = rows_to_operator(rows.du, n);
  bundle.dv = rows_to_operator(rows.dv, n);
  bundle.smooth = rows_to_operator(rows.smooth, n);
  bundle.config = config;
  return bundle;
}

}  // namespace sgrecon
