#include "disaudit/embedding/normalize.hpp"

#include "disaudit/error.hpp"

namespace disaudit::embedding {

NormalizedFeatures zscore_normalize(const FeatureMatrix& m) {
  if (m.rows() < 2) fail(Errc::TooFewSamples, "zscore_normalize needs at least two samples");
  NormalizedFeatures out{m, {}};
  out.scaling = zscore_columns(out.matrix.values);
  return out;
}

}  // namespace disaudit::embedding
