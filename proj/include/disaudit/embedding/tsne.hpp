#pragma once

#include "disaudit/embedding/affinity.hpp"
#include "disaudit/embedding/pca.hpp"
#include "disaudit/random.hpp"
#include "disaudit/types.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace disaudit::embedding {

struct TsneOptions {
  double perplexity = 30;
  int iterations = 1000;
  std::uint64_t seed = 0;
  std::optional<double> learning_rate;  // unset: max(N / 12, 50)
  double early_exaggeration = 12;
  int exaggeration_iterations = 250;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  int momentum_switch = 250;
  double min_gain = 0.01;
  double init_scale = 1e-4;  // std of the first PCA coordinate at start
  int kl_every = 50;         // KL trace cadence; 0 disables the trace
};

template <typename Scalar>
struct Embedding {
  Matrix<Scalar> y;  // N x 2
  double final_kl = 0;
  double initial_kl = 0;
  int iterations_run = 0;
  std::uint64_t seed = 0;
  double perplexity = 0;
  std::vector<std::string> sample_ids;
  std::vector<std::pair<int, double>> kl_trace;  // (iteration, KL) pairs
  std::vector<std::string> warnings;
};

namespace detail {

// Student-t kernel values 1 / (1 + |y_i - y_j|^2), zero on the diagonal.
template <typename Scalar>
Scalar student_kernel(const Matrix<Scalar>& y, Matrix<Scalar>& num) {
  const Eigen::Index n = y.rows();
  num.resize(n, n);
  Scalar z = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    num(i, i) = 0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Scalar v = Scalar(1) / (Scalar(1) + (y.row(i) - y.row(j)).squaredNorm());
      num(i, j) = num(j, i) = v;
      z += 2 * v;
    }
  }
  return z;
}

template <typename Scalar>
Scalar kl_from_kernel(const Matrix<Scalar>& p, const Matrix<Scalar>& num, Scalar z) {
  const Eigen::Index n = p.rows();
  Scalar kl = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j || p(i, j) <= 0) continue;
      const Scalar q = std::max(num(i, j) / z, std::numeric_limits<Scalar>::min());
      kl += p(i, j) * std::log(p(i, j) / q);
    }
  return kl;
}

template <typename Scalar>
void gradient_from_kernel(const Matrix<Scalar>& p, Scalar p_scale, const Matrix<Scalar>& y, const Matrix<Scalar>& num,
                          Scalar z, Matrix<Scalar>& grad) {
  const Eigen::Index n = y.rows();
  grad.setZero(n, y.cols());
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const Scalar w = (p_scale * p(i, j) - num(i, j) / z) * num(i, j);
      grad.row(i) += w * (y.row(i) - y.row(j));
    }
  grad *= Scalar(4);
}

}  // namespace detail

/// KL(P || Q(Y)) with the Student-t (one degree of freedom) output kernel.
template <typename Scalar>
Scalar tsne_objective(const Matrix<Scalar>& p, const Matrix<Scalar>& y) {
  Matrix<Scalar> num;
  const Scalar z = detail::student_kernel(y, num);
  return detail::kl_from_kernel(p, num, z);
}

/// dKL/dy_i = 4 sum_j (p_ij - q_ij)(y_i - y_j)(1 + |y_i - y_j|^2)^-1.
template <typename Scalar>
Matrix<Scalar> tsne_gradient(const Matrix<Scalar>& p, const Matrix<Scalar>& y) {
  Matrix<Scalar> num, grad;
  const Scalar z = detail::student_kernel(y, num);
  detail::gradient_from_kernel(p, Scalar(1), y, num, z, grad);
  return grad;
}

/// Exact-gradient t-SNE to two dimensions with PCA initialisation, early
/// exaggeration, momentum and per-coordinate gains. Perplexity is lowered to
/// floor((N-1)/3) unless it is strictly below N/3.
template <typename Derived>
Embedding<typename Derived::Scalar> run_tsne(const Eigen::MatrixBase<Derived>& x, const TsneOptions& opt) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = x.rows();
  if (n < 4) fail(Errc::TooFewPoints, "run_tsne needs at least 4 samples");
  if (opt.iterations < 1) fail(Errc::InvalidParams, "run_tsne: iterations must be positive");

  Embedding<Scalar> emb;
  emb.seed = opt.seed;
  double perplexity = opt.perplexity;
  if (!(perplexity < static_cast<double>(n) / 3.0)) {
    perplexity = std::floor(static_cast<double>(n - 1) / 3.0);
    emb.warnings.push_back("perplexity reduced from " + std::to_string(opt.perplexity) + " to " +
                           std::to_string(perplexity) + " for N=" + std::to_string(n));
  }
  emb.perplexity = perplexity;
  const Matrix<Scalar> p = compute_affinities(x, perplexity).p;

  // Initial layout: leading principal coordinates, shrunk to a tiny spread.
  Matrix<Scalar> y(n, 2);
  {
    const Eigen::Index k = std::min<Eigen::Index>(2, std::min(n, x.cols()));
    const auto pca = fit_pca(x, k);
    y.setZero();
    y.leftCols(k) = pca.transform(x);
    const Scalar sd = std::sqrt((y.col(0).array() - y.col(0).mean()).square().mean());
    if (sd > 0 && k == 2 && !pca.rank_deficient()) {
      y *= static_cast<Scalar>(opt.init_scale) / sd;
    } else {
      Rng rng(opt.seed);
      std::normal_distribution<double> normal(0.0, opt.init_scale);
      for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = static_cast<Scalar>(normal(rng));
      emb.warnings.push_back("degenerate PCA initialisation, using seeded random layout");
    }
  }

  const Scalar lr = static_cast<Scalar>(opt.learning_rate.value_or(std::max(static_cast<double>(n) / 12.0, 50.0)));
  Matrix<Scalar> update = Matrix<Scalar>::Zero(n, 2);
  Matrix<Scalar> gains = Matrix<Scalar>::Ones(n, 2);
  Matrix<Scalar> num, grad;

  Scalar z = detail::student_kernel(y, num);
  emb.initial_kl = static_cast<double>(detail::kl_from_kernel(p, num, z));
  if (opt.kl_every > 0) emb.kl_trace.emplace_back(0, emb.initial_kl);

  for (int it = 0; it < opt.iterations; ++it) {
    const bool exaggerating = it < opt.exaggeration_iterations;
    const Scalar p_scale = exaggerating ? static_cast<Scalar>(opt.early_exaggeration) : Scalar(1);
    const Scalar momentum = static_cast<Scalar>(it < opt.momentum_switch ? opt.initial_momentum : opt.final_momentum);
    if (it > 0) z = detail::student_kernel(y, num);
    detail::gradient_from_kernel(p, p_scale, y, num, z, grad);

    for (Eigen::Index i = 0; i < y.size(); ++i) {
      Scalar& g = gains.data()[i];
      const bool same_sign = (grad.data()[i] > 0) == (update.data()[i] > 0);
      g = same_sign ? g * Scalar(0.8) : g + Scalar(0.2);
      g = std::max(g, static_cast<Scalar>(opt.min_gain));
      update.data()[i] = momentum * update.data()[i] - lr * g * grad.data()[i];
    }
    y += update;
    y.rowwise() -= y.colwise().mean();

    if (opt.kl_every > 0 && ((it + 1) % opt.kl_every == 0 || it + 1 == opt.exaggeration_iterations)) {
      Matrix<Scalar> trace_num;
      const Scalar tz = detail::student_kernel(y, trace_num);
      emb.kl_trace.emplace_back(it + 1, static_cast<double>(detail::kl_from_kernel(p, trace_num, tz)));
    }
  }
  emb.iterations_run = opt.iterations;
  z = detail::student_kernel(y, num);
  emb.final_kl = static_cast<double>(detail::kl_from_kernel(p, num, z));
  emb.y = std::move(y);
  return emb;
}

/// Same as above, carrying sample ids through from the feature matrix.
inline Embedding<double> run_tsne(const FeatureMatrix& m, const TsneOptions& opt) {
  auto emb = run_tsne(m.values, opt);
  emb.sample_ids = m.sample_ids;
  return emb;
}

}  // namespace disaudit::embedding
