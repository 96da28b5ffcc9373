#pragma once

#include "disaudit/types.hpp"

#include <algorithm>
#include <vector>

namespace disaudit::cluster {

/// Relabels to 0..k-1 in order of increasing original label value.
/// Returns k.
inline int compact_labels(const Labels& labels, Labels& compact) {
  std::vector<int> distinct(labels.data(), labels.data() + labels.size());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  compact.resize(labels.size());
  for (Eigen::Index i = 0; i < labels.size(); ++i)
    compact[i] = static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), labels[i]) - distinct.begin());
  return static_cast<int>(distinct.size());
}

}  // namespace disaudit::cluster
