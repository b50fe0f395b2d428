#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace claimspot {

/// Feature vector with explicit dimension. Indices are strictly increasing.
/// Dense blocks are stored with every entry present.
struct SparseVector {
  std::size_t dim = 0;
  std::vector<std::uint32_t> index;
  std::vector<double> value;

  static SparseVector from_dense(std::span<const double> dense);
  std::vector<double> to_dense() const;
  std::size_t nnz() const { return index.size(); }
  double dot(std::span<const double> weights) const;
  /// weights += scale * this
  void axpy_into(double scale, std::span<double> weights) const;
  double squared_norm() const;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

/// Concatenation in the given order; the result's dimension is the sum.
SparseVector concat_features(std::span<const SparseVector> blocks);

/// Rows of equal dimension `cols`.
struct FeatureMatrix {
  std::size_t cols = 0;
  std::vector<SparseVector> rows;

  std::size_t size() const { return rows.size(); }
};

}  // namespace claimspot
