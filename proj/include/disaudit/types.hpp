#pragma once

#include <Eigen/Dense>

#include <string>
#include <string_view>
#include <vector>

namespace disaudit {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

/// Cluster assignment per sample. Values are arbitrary integers; metrics only
/// look at which samples share a value.
using Labels = Eigen::VectorXi;

enum class DimensionTag { emotional, linguistic, pathological };

inline constexpr DimensionTag kAllDimensions[] = {DimensionTag::emotional, DimensionTag::linguistic,
                                                  DimensionTag::pathological};

std::string_view to_string(DimensionTag tag) noexcept;
DimensionTag parse_dimension(std::string_view name);

/// N samples (rows) by d features (columns), with names for both axes.
struct FeatureMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> column_names;
  std::vector<std::string> sample_ids;
  DimensionTag tag = DimensionTag::emotional;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }

  // Throws InvalidParams on shape mismatch or non-finite entries.
  void validate() const;
};

}  // namespace disaudit
