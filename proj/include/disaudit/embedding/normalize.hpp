#pragma once

#include "disaudit/types.hpp"

#include <cmath>
#include <vector>

namespace disaudit::embedding {

template <typename Scalar>
struct ColumnScaling {
  Vector<Scalar> mean;
  Vector<Scalar> stddev;  // population convention
  std::vector<bool> zero_variance;
};

/// Column-wise z-scoring in place with the population standard deviation.
/// Zero-variance columns become all-zero and are flagged.
template <typename Derived>
ColumnScaling<typename Derived::Scalar> zscore_columns(Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  ColumnScaling<Scalar> s;
  const Eigen::Index n = x.rows();
  s.mean = x.colwise().mean().transpose();
  s.stddev.resize(x.cols());
  s.zero_variance.assign(x.cols(), false);
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    x.col(j).array() -= s.mean[j];
    const Scalar sd = std::sqrt(x.col(j).squaredNorm() / static_cast<Scalar>(n));
    s.stddev[j] = sd;
    // Tolerance relative to the column magnitude: a constant column leaves
    // rounding residue after centering.
    const Scalar scale = std::max<Scalar>(Scalar(1), std::abs(s.mean[j]));
    if (!(sd > scale * Scalar(1e-12))) {
      s.zero_variance[j] = true;
      x.col(j).setZero();
    } else {
      x.col(j) /= sd;
      // A second centering pass removes the residual mean left by the division.
      x.col(j).array() -= x.col(j).mean();
    }
  }
  return s;
}

struct NormalizedFeatures {
  FeatureMatrix matrix;
  ColumnScaling<double> scaling;
};

/// z-scores every column of a feature matrix (N >= 2).
NormalizedFeatures zscore_normalize(const FeatureMatrix& m);

}  // namespace disaudit::embedding
