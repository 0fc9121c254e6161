#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "sgrecon/grid_domain.hpp"
#include "sgrecon/sg_filter.hpp"

namespace sgrecon {

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// Immutable sparse matrix in compressed-row storage with sorted unique
/// column indices per row. Row-parallel products are deterministic because
/// each output element is a serial sum over one row.
class SparseOperator {
 public:
  SparseOperator() = default;

  /// Duplicate (row, col) pairs are summed.
  static SparseOperator from_triplets(int rows, int cols, std::vector<Triplet> triplets);
  static SparseOperator identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::int64_t nnz() const { return static_cast<std::int64_t>(values_.size()); }

  struct RowView {
    const int* cols = nullptr;
    const double* values = nullptr;
    int size = 0;
  };
  RowView row(int i) const {
    const std::int64_t lo = row_ptr_[static_cast<std::size_t>(i)];
    const std::int64_t hi = row_ptr_[static_cast<std::size_t>(i) + 1];
    return RowView{col_idx_.data() + lo, values_.data() + lo, static_cast<int>(hi - lo)};
  }

  SparseOperator transposed() const;
  /// Multiplies row i by scale[i].
  SparseOperator row_scaled(const std::vector<double>& scale) const;
  /// Adds d[i] to entry (i,i); requires a square operator.
  SparseOperator plus_diagonal(const std::vector<double>& d) const;
  /// Removes stored entries with |value| < tol.
  SparseOperator dropped_small(double tol) const;
  /// Maximum absolute row sum.
  double inf_norm() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::int64_t> row_ptr_{0};
  std::vector<int> col_idx_;
  std::vector<double> values_;

  friend SparseOperator vstack(const std::vector<std::pair<double, const SparseOperator*>>&);
};

/// y = A x with a deterministic (ascending-column) summation order.
std::vector<double> matvec(const SparseOperator& a, const std::vector<double>& x);

/// y = A^T x, serial scatter in row order.
std::vector<double> matvec_transpose(const SparseOperator& a, const std::vector<double>& x);

/// Vertical concatenation; each block's values are multiplied by its scale.
SparseOperator vstack(const std::vector<std::pair<double, const SparseOperator*>>& blocks);

/// Plain-text triplets: header "rows cols nnz", then "row col value" lines
/// with 17 significant digits.
void write_triplets(std::ostream& out, const SparseOperator& a);

enum class NeighborhoodMode { knn2d, knn3d };

struct OperatorConfig {
  KernelKind kind = KernelKind::sg;
  int d = 5;       // square kernel side; custom neighborhoods use K = d*d
  int k = 3;       // polynomial order for sg kernels
  NeighborhoodMode mode = NeighborhoodMode::knn2d;
  int window = 15;  // candidate window for 3D neighbor searches
};

/// The three n x n operators sharing one domain ordering: differentiation
/// along u and v, and smoothing.
struct OperatorBundle {
  SparseOperator du;
  SparseOperator dv;
  SparseOperator smooth;
  OperatorConfig config;
};

/// Builds Du, Dv and S for the domain. Interior pixels (full d x d block in
/// the foreground, 2D mode) share one precomputed square kernel; remaining
/// pixels get per-pixel kernels on K-nearest neighborhoods restricted to
/// their connected component, with K clamped to the pixels available.
/// Classic kinds fall back across stencils at missing neighbors
/// (c -> fw -> bw, sc -> c -> fw -> bw, fw <-> bw). depth and intrinsics are
/// required in 3D mode. Entries below 1e-14 in magnitude are dropped.
OperatorBundle assemble_operators(const PixelDomain& domain, const OperatorConfig& config,
                                  const std::vector<double>* depth = nullptr,
                                  const CameraIntrinsics* intrinsics = nullptr);

}  // namespace sgrecon
