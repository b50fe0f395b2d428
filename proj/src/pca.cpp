#include "claimspot/pca.hpp"

#include <cmath>
#include <string>

#include <spdlog/spdlog.h>

#include "claimspot/error.hpp"

namespace claimspot {

PcaModel fit_pca(const Eigen::MatrixXd& data, std::size_t k) {
  const auto n = static_cast<std::size_t>(data.rows());
  const auto d = static_cast<std::size_t>(data.cols());
  if (k < 1 || k > d || d > n) {
    throw Error(ErrorCode::InvalidArgument, "PCA needs 1 <= k <= d <= n (k=" + std::to_string(k) +
                                                ", d=" + std::to_string(d) + ", n=" + std::to_string(n) + ")");
  }
  PcaModel model;
  model.mean = data.colwise().mean().transpose();
  const Eigen::MatrixXd centred = data.rowwise() - model.mean.transpose();
  const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
  const Eigen::MatrixXd cov = (centred.transpose() * centred) / denom;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::InvalidArgument, "eigendecomposition failed");
  // Eigen returns ascending eigenvalues.
  const Eigen::VectorXd values = solver.eigenvalues();
  const Eigen::MatrixXd vectors = solver.eigenvectors();

  model.components.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
  model.explained_variance.resize(static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) {
    const auto src = static_cast<Eigen::Index>(d - 1 - i);
    Eigen::VectorXd v = vectors.col(src);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    model.components.row(static_cast<Eigen::Index>(i)) = v.transpose();
    model.explained_variance(static_cast<Eigen::Index>(i)) = std::max(values(src), 0.0);
  }
  for (std::size_t i = 0; i < k && i + 1 < d; ++i) {
    const double gap = values(static_cast<Eigen::Index>(d - 1 - i)) - values(static_cast<Eigen::Index>(d - 2 - i));
    if (std::abs(gap) < 1e-12) {
      spdlog::warn("PCA rank deficiency: eigenvalue gap after component {} is below 1e-12", i + 1);
      break;
    }
  }
  return model;
}

std::vector<double> transform_pca(const PcaModel& model, std::span<const double> x) {
  if (x.size() != model.input_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "PCA input has " + std::to_string(x.size()) + " values, expected " +
                                                  std::to_string(model.input_dim()));
  }
  const Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
  const Eigen::VectorXd projected = model.components * (v - model.mean);
  return {projected.data(), projected.data() + projected.size()};
}

}  // namespace claimspot
