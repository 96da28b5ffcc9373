#pragma once

#include "disaudit/error.hpp"
#include "disaudit/types.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <limits>
#include <vector>

namespace disaudit::embedding {

template <typename Scalar>
struct PcaModel {
  RowVector<Scalar> mean;
  Matrix<Scalar> components;  // d x k, orthonormal columns (except flagged padding)
  Vector<Scalar> explained_variance;  // per component, divisor N - 1
  std::vector<bool> padded;  // component beyond numerical rank, left as a zero vector

  Eigen::Index dimension() const { return components.rows(); }
  Eigen::Index rank() const { return components.cols(); }
  bool rank_deficient() const { return std::find(padded.begin(), padded.end(), true) != padded.end(); }

  template <typename Derived>
  Matrix<Scalar> transform(const Eigen::MatrixBase<Derived>& x) const {
    return (x.rowwise() - mean) * components;
  }

  template <typename Derived>
  Matrix<Scalar> inverse_transform(const Eigen::MatrixBase<Derived>& scores) const {
    return (scores * components.transpose()).rowwise() + mean;
  }
};

/// Top-k principal axes from the thin SVD of the centered data. Each axis is
/// signed so its largest-magnitude entry is positive; axes past the numerical
/// rank are returned as zero vectors and flagged in `padded`.
template <typename Derived>
PcaModel<typename Derived::Scalar> fit_pca(const Eigen::MatrixBase<Derived>& x, Eigen::Index k) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = x.rows(), d = x.cols();
  if (k < 1 || k > std::min(n, d)) fail(Errc::InvalidParams, "fit_pca: k must satisfy 1 <= k <= min(N, d)");
  PcaModel<Scalar> model;
  model.mean = x.colwise().mean();
  const Matrix<Scalar> centered = x.rowwise() - model.mean;

  Eigen::BDCSVD<Matrix<Scalar>> svd(centered, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const Scalar tol = sv.size() > 0 ? sv[0] * static_cast<Scalar>(std::max(n, d)) * std::numeric_limits<Scalar>::epsilon()
                                   : Scalar(0);
  model.components = svd.matrixV().leftCols(k);
  model.explained_variance.resize(k);
  model.padded.assign(k, false);
  const Scalar dof = static_cast<Scalar>(std::max<Eigen::Index>(n - 1, 1));
  for (Eigen::Index c = 0; c < k; ++c) {
    if (!(sv[c] > tol)) {
      model.padded[c] = true;
      model.components.col(c).setZero();
      model.explained_variance[c] = 0;
      continue;
    }
    model.explained_variance[c] = sv[c] * sv[c] / dof;
    Eigen::Index arg;
    model.components.col(c).cwiseAbs().maxCoeff(&arg);
    if (model.components(arg, c) < 0) model.components.col(c) *= Scalar(-1);
  }
  return model;
}

}  // namespace disaudit::embedding
