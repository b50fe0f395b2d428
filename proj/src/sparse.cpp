#include "claimspot/sparse.hpp"

namespace claimspot {

SparseVector SparseVector::from_dense(std::span<const double> dense) {
  SparseVector v;
  v.dim = dense.size();
  v.index.resize(dense.size());
  v.value.assign(dense.begin(), dense.end());
  for (std::size_t i = 0; i < dense.size(); ++i) v.index[i] = static_cast<std::uint32_t>(i);
  return v;
}

std::vector<double> SparseVector::to_dense() const {
  std::vector<double> out(dim, 0.0);
  for (std::size_t i = 0; i < index.size(); ++i) out[index[i]] = value[i];
  return out;
}

double SparseVector::dot(std::span<const double> weights) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < index.size(); ++i) sum += value[i] * weights[index[i]];
  return sum;
}

void SparseVector::axpy_into(double scale, std::span<double> weights) const {
  for (std::size_t i = 0; i < index.size(); ++i) weights[index[i]] += scale * value[i];
}

double SparseVector::squared_norm() const {
  double sum = 0.0;
  for (double x : value) sum += x * x;
  return sum;
}

SparseVector concat_features(std::span<const SparseVector> blocks) {
  SparseVector out;
  for (const auto& b : blocks) {
    const auto offset = static_cast<std::uint32_t>(out.dim);
    for (std::size_t i = 0; i < b.index.size(); ++i) {
      out.index.push_back(offset + b.index[i]);
      out.value.push_back(b.value[i]);
    }
    out.dim += b.dim;
  }
  return out;
}

}  // namespace claimspot
