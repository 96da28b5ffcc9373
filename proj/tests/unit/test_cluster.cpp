#include "disaudit/cluster/ari.hpp"
#include "disaudit/cluster/kmeans.hpp"
#include "disaudit/cluster/metrics.hpp"
#include "disaudit/cluster/stability.hpp"
#include "disaudit/error.hpp"
#include "disaudit/synth/synth.hpp"

#include <doctest.h>
#include <oracles.hpp>

#include <cmath>
#include <random>

using namespace disaudit;
using namespace disaudit::cluster;

namespace {

Eigen::MatrixXd pts(std::initializer_list<std::pair<double, double>> xy) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(xy.size()), 2);
  Eigen::Index i = 0;
  for (auto [x, y] : xy) {
    m(i, 0) = x;
    m(i, 1) = y;
    ++i;
  }
  return m;
}

Labels labs(std::initializer_list<int> v) {
  Labels l(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (int x : v) l[i++] = x;
  return l;
}

Errc error_code(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::ParseError;  // sentinel: nothing thrown
}

synth::BlobData blobs(int k, int per, double sep, int dim, std::uint64_t seed) {
  synth::BlobSpec s;
  s.n_clusters = k;
  s.points_per_cluster = per;
  s.center_separation = sep;
  s.dimension = dim;
  s.seed = seed;
  return synth::generate_blobs(s);
}

}  // namespace

TEST_CASE("silhouette of the two-pair fixture") {
  const auto x = pts({{0, 0}, {0, 1}, {10, 0}, {10, 1}});
  // a = 1, b = (10 + sqrt(101)) / 2 for every point.
  const double b = (10 + std::sqrt(101.0)) / 2;
  CHECK(silhouette(x, labs({0, 0, 1, 1})) == doctest::Approx(1 - 1 / b).epsilon(1e-12));
  CHECK(silhouette(x, labs({0, 0, 1, 1})) == doctest::Approx(0.900249).epsilon(1e-6));
}

TEST_CASE("silhouette degenerate conventions") {
  const Eigen::MatrixXd same = Eigen::MatrixXd::Ones(4, 2);
  CHECK(silhouette(same, labs({0, 0, 1, 1})) == 0.0);
  // Singleton cluster contributes 0.
  const auto x = pts({{0, 0}, {0, 1}, {5, 5}});
  CHECK(silhouette(x, labs({0, 0, 1})) == doctest::Approx(oracle::silhouette(x, labs({0, 0, 1}))));
  CHECK(error_code([&] { silhouette(x, labs({2, 2, 2})); }) == Errc::SingleCluster);
}

TEST_CASE("davies-bouldin hand fixtures") {
  const auto x = pts({{0, 0}, {0, 1}, {10, 0}, {10, 1}});
  CHECK(davies_bouldin(x, labs({0, 0, 1, 1})) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(davies_bouldin(pts({{0, 0}, {3, 4}, {9, 9}}), labs({0, 1, 2})) == 0.0);
  CHECK(error_code([&] { davies_bouldin(pts({{0, 0}, {2, 0}, {1, 1}, {1, -1}}), labs({0, 0, 1, 1})); }) == Errc::IdenticalCentroids);
}

TEST_CASE("calinski-harabasz hand fixtures") {
  const auto x = pts({{0, 0}, {0, 2}, {10, 0}, {10, 2}});
  CHECK(calinski_harabasz(x, labs({0, 0, 1, 1})) == doctest::Approx(50.0).epsilon(1e-12));
  CHECK(error_code([&] { calinski_harabasz(pts({{0, 0}, {0, 0}, {4, 4}, {4, 4}}), labs({0, 0, 1, 1})); }) ==
        Errc::ZeroWithinScatter);
}

TEST_CASE("adjusted rand index hand fixtures") {
  CHECK(adjusted_rand_index(labs({0, 0, 1, 1}), labs({0, 0, 1, 1})) == 1.0);
  CHECK(adjusted_rand_index(labs({0, 0, 1, 1}), labs({1, 1, 0, 0})) == 1.0);
  // index 0, expected (1 * 2)(2) / 6 = 2/3, max 2: (0 - 2/3) / (2 - 2/3).
  CHECK(adjusted_rand_index(labs({0, 0, 1, 1}), labs({0, 1, 0, 1})) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(adjusted_rand_index(labs({0, 1, 2, 3}), labs({3, 2, 1, 0})) == 1.0);
  CHECK(adjusted_rand_index(labs({0, 0, 0, 0}), labs({0, 1, 2, 3})) == doctest::Approx(0.0));
  CHECK(error_code([&] { adjusted_rand_index(labs({0, 1}), labs({0, 1, 1})); }) == Errc::LengthMismatch);
}

TEST_CASE("metrics agree with brute-force oracles on random instances") {
  std::mt19937_64 rng(7);
  int checked = 0;
  for (int t = 0; t < 200; ++t) {
    const int n = std::uniform_int_distribution<int>(4, 12)(rng);
    const int k = std::uniform_int_distribution<int>(2, 3)(rng);
    const Eigen::MatrixXd x = oracle::random_matrix(n, 2, 1000 + t);
    Labels l(n), other(n);
    for (int i = 0; i < n; ++i) {
      l[i] = i < k ? i : std::uniform_int_distribution<int>(0, k - 1)(rng);
      other[i] = std::uniform_int_distribution<int>(0, 2)(rng);
    }
    CHECK(silhouette(x, l) == doctest::Approx(oracle::silhouette(x, l)).epsilon(1e-10));
    CHECK(davies_bouldin(x, l) == doctest::Approx(oracle::davies_bouldin(x, l)).epsilon(1e-10));
    CHECK(calinski_harabasz(x, l) == doctest::Approx(oracle::calinski_harabasz(x, l)).epsilon(1e-10));
    CHECK(adjusted_rand_index(l, other) == doctest::Approx(oracle::adjusted_rand(l, other)).epsilon(1e-10));
    ++checked;
  }
  CHECK(checked == 200);
}

TEST_CASE("metrics are invariant to label renaming") {
  const Eigen::MatrixXd x = oracle::random_matrix(10, 2, 3);
  const Labels a = labs({0, 0, 0, 1, 1, 1, 2, 2, 2, 2});
  const Labels b = labs({7, 7, 7, -1, -1, -1, 4, 4, 4, 4});
  CHECK(silhouette(x, a) == silhouette(x, b));
  CHECK(davies_bouldin(x, a) == doctest::Approx(davies_bouldin(x, b)).epsilon(1e-14));
  CHECK(calinski_harabasz(x, a) == doctest::Approx(calinski_harabasz(x, b)).epsilon(1e-14));
}

TEST_CASE("kmeans recovers well-separated blobs") {
  const auto data = blobs(3, 50, 20, 2, 11);
  KMeansOptions opt;
  opt.seed = 5;
  const auto r = kmeans(data.features.values, opt);
  CHECK(adjusted_rand_index(r.labels, data.labels) == 1.0);
  CHECK(r.centroids.rows() == 3);
  // Centroids are the member means.
  for (int j = 0; j < 3; ++j) {
    Eigen::RowVector2d m = Eigen::RowVector2d::Zero();
    int c = 0;
    for (Eigen::Index i = 0; i < r.labels.size(); ++i)
      if (r.labels[i] == j) {
        m += data.features.values.row(i);
        ++c;
      }
    CHECK((m / c - r.centroids.row(j)).norm() < 1e-12);
  }
}

TEST_CASE("kmeans edge cases and determinism") {
  const auto x = pts({{0, 0}, {5, 1}, {-3, 7}});
  KMeansOptions opt;
  const auto r = kmeans(x, opt);
  CHECK(r.inertia == 0.0);
  Labels c;
  CHECK(compact_labels(r.labels, c) == 3);
  CHECK(error_code([&] { kmeans(pts({{0, 0}, {1, 1}}), opt); }) == Errc::TooFewPoints);

  const auto data = blobs(3, 40, 3, 2, 2);
  opt.seed = 9;
  const auto a = kmeans(data.features.values, opt);
  const auto b = kmeans(data.features.values, opt);
  CHECK(a.labels == b.labels);
  CHECK(a.centroids == b.centroids);
  // More restarts never increase the retained inertia.
  KMeansOptions single = opt;
  single.n_init = 1;
  CHECK(a.inertia <= kmeans(data.features.values, single).inertia + 1e-12);
}

TEST_CASE("bootstrap stability separates stable from unstable structure") {
  KMeansOptions km;
  StabilityOptions st;
  st.seed = 17;
  const auto clear = blobs(3, 60, 50, 2, 4);
  const auto full = kmeans(clear.features.values, km);
  const auto stable = bootstrap_stability(clear.features.values, full, km, st);
  CHECK(stable.iterations == 20);
  CHECK(stable.per_iteration_ari.size() == 20);
  CHECK(stable.mean_ari > 0.99);

  // In two dimensions a finite sample breaks the rotational symmetry firmly
  // enough to look stable; thirty dimensions do not.
  const auto blob = blobs(1, 180, 0, 30, 4);
  const auto forced = kmeans(blob.features.values, km);
  const auto unstable = bootstrap_stability(blob.features.values, forced, km, st);
  CHECK(unstable.mean_ari < 0.5);

  const auto again = bootstrap_stability(blob.features.values, forced, km, st);
  CHECK(again.per_iteration_ari == unstable.per_iteration_ari);
}
