#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace claimspot {

inline constexpr std::size_t kDefaultPcaComponents = 300;

struct PcaModel {
  Eigen::VectorXd mean;
  Eigen::MatrixXd components;          // k x d, orthonormal rows
  Eigen::VectorXd explained_variance;  // k, non-increasing

  std::size_t input_dim() const { return static_cast<std::size_t>(components.cols()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(components.rows()); }
};

/// Top-k eigenvectors of the mean-centred sample covariance of `data`
/// (rows are observations). Requires 1 <= k <= d <= n. Each component's
/// largest-magnitude entry is made positive.
PcaModel fit_pca(const Eigen::MatrixXd& data, std::size_t k);

std::vector<double> transform_pca(const PcaModel& model, std::span<const double> x);

}  // namespace claimspot
