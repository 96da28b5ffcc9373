#pragma once

#include "disaudit/error.hpp"
#include "disaudit/types.hpp"

#include <cmath>
#include <limits>

namespace disaudit::embedding {

template <typename Scalar>
struct AffinityMatrix {
  Matrix<Scalar> p;      // symmetric joint probabilities, zero diagonal, sums to 1
  Scalar perplexity = 0;
  Vector<Scalar> beta;   // per-point Gaussian precision 1 / (2 sigma_i^2)
  Vector<Scalar> entropy_bits;  // entropy of each conditional row, log2 units
};

struct AffinityOptions {
  double entropy_tol = 1e-5;  // bits
  int max_bisection_steps = 50;
  double floor = 1e-12;
};

/// Squared Euclidean distances, computed pairwise (no Gram-matrix shortcut).
template <typename Derived>
Matrix<typename Derived::Scalar> squared_distances(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = x.rows();
  Matrix<Scalar> d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d(i, i) = 0;
    for (Eigen::Index j = i + 1; j < n; ++j) d(i, j) = d(j, i) = (x.row(i) - x.row(j)).squaredNorm();
  }
  return d;
}

namespace detail {

// Fills row i of `cond` with p_{j|i} for precision beta and returns the
// row's Shannon entropy in bits. Distances are shifted by the row minimum so
// that large precisions cannot underflow every term.
template <typename Scalar>
Scalar conditional_row(const Matrix<Scalar>& d2, Eigen::Index i, Scalar min_d, Scalar beta, Matrix<Scalar>& cond) {
  const Eigen::Index n = d2.rows();
  Scalar sum = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const Scalar delta = d2(i, j) - min_d;
    const Scalar v = (j == i) ? Scalar(0) : (delta == 0 ? Scalar(1) : std::exp(-beta * delta));
    cond(i, j) = v;
    sum += v;
  }
  Scalar h = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j == i) continue;
    cond(i, j) /= sum;
    const Scalar p = cond(i, j);
    if (p > 0) h -= p * std::log2(p);
  }
  return h;
}

}  // namespace detail

/// Gaussian joint affinities at the requested perplexity. Each row's
/// precision is found by bisection on the conditional entropy; the joint
/// matrix is (P_{j|i} + P_{i|j}) / 2N floored and renormalized.
template <typename Derived>
AffinityMatrix<typename Derived::Scalar> compute_affinities(const Eigen::MatrixBase<Derived>& x, double perplexity,
                                                            const AffinityOptions& opt = {}) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = x.rows();
  if (!(perplexity > 0)) fail(Errc::InvalidParams, "perplexity must be positive");
  if (!(perplexity < static_cast<double>(n) / 3.0))
    fail(Errc::PerplexityTooLarge, "perplexity " + std::to_string(perplexity) + " is not below N/3 for N=" + std::to_string(n));

  const Matrix<Scalar> d2 = squared_distances(x);
  const Scalar target = static_cast<Scalar>(std::log2(perplexity));
  AffinityMatrix<Scalar> out;
  out.perplexity = static_cast<Scalar>(perplexity);
  out.beta.resize(n);
  out.entropy_bits.resize(n);
  Matrix<Scalar> cond(n, n);
  const Scalar tol = static_cast<Scalar>(opt.entropy_tol);

  for (Eigen::Index i = 0; i < n; ++i) {
    Scalar min_d = std::numeric_limits<Scalar>::infinity();
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) min_d = std::min(min_d, d2(i, j));

    // Entropy falls as beta grows. Grow or shrink geometrically until the
    // target is bracketed, then bisect.
    Scalar beta = 1;
    Scalar lo = 0, hi = std::numeric_limits<Scalar>::infinity();
    Scalar h = detail::conditional_row(d2, i, min_d, beta, cond);
    for (int e = 0; e < 200 && (lo == 0 || std::isinf(hi)) && std::abs(h - target) >= tol; ++e) {
      if (h > target) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2 : (beta + hi) / 2;
      } else {
        hi = beta;
        beta = lo == 0 ? beta / 2 : (beta + lo) / 2;
      }
      h = detail::conditional_row(d2, i, min_d, beta, cond);
    }
    for (int step = 0; step < opt.max_bisection_steps && std::abs(h - target) >= tol; ++step) {
      if (h > target) lo = beta;
      else hi = beta;
      beta = (lo + hi) / 2;
      h = detail::conditional_row(d2, i, min_d, beta, cond);
    }
    out.beta[i] = beta;
    out.entropy_bits[i] = h;
  }

  out.p = (cond + cond.transpose()) / (Scalar(2) * static_cast<Scalar>(n));
  const Scalar floor = static_cast<Scalar>(opt.floor);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) out.p(i, j) = (i == j) ? Scalar(0) : std::max(out.p(i, j), floor);
  out.p /= out.p.sum();
  // Renormalization by a scalar keeps symmetry exactly; enforce it bitwise anyway.
  out.p = ((out.p + out.p.transpose()) / Scalar(2)).eval();
  return out;
}

}  // namespace disaudit::embedding
