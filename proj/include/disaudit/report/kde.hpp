#pragma once

#include "disaudit/error.hpp"
#include "disaudit/types.hpp"

#include <cmath>
#include <numbers>

namespace disaudit::report {

struct KdeGrid {
  Eigen::VectorXd grid_x;
  Eigen::VectorXd grid_y;
  Eigen::MatrixXd density;  // density(ix, iy) at (grid_x[ix], grid_y[iy])
  double bandwidth = 0.4;
  double isoline_level = 0;
};

struct KdeOptions {
  double bandwidth = 0.4;
  int grid_resolution = 200;
  double isoline_fraction = 0.30;
};

/// Isotropic Gaussian KDE on a uniform grid spanning the bounding box of the
/// points padded by 3 bandwidths on every side.
template <typename Derived>
KdeGrid kde_2d(const Eigen::MatrixBase<Derived>& points, const KdeOptions& opt = {}) {
  if (points.rows() < 1 || points.cols() != 2) fail(Errc::InvalidParams, "kde_2d needs at least one 2-D point");
  if (!(opt.bandwidth > 0) || opt.grid_resolution < 2) fail(Errc::InvalidParams, "kde_2d needs bandwidth > 0 and resolution >= 2");
  const double h = opt.bandwidth;
  const Eigen::MatrixX2d pts = points.template cast<double>();
  const Eigen::Vector2d lo = pts.colwise().minCoeff().transpose().array() - 3 * h;
  const Eigen::Vector2d hi = pts.colwise().maxCoeff().transpose().array() + 3 * h;

  KdeGrid g;
  g.bandwidth = h;
  g.grid_x = Eigen::VectorXd::LinSpaced(opt.grid_resolution, lo.x(), hi.x());
  g.grid_y = Eigen::VectorXd::LinSpaced(opt.grid_resolution, lo.y(), hi.y());
  g.density.setZero(opt.grid_resolution, opt.grid_resolution);
  const double norm = 1.0 / (static_cast<double>(pts.rows()) * 2.0 * std::numbers::pi * h * h);
  const double inv2h2 = 1.0 / (2.0 * h * h);
  // exp(-(dx^2 + dy^2)/2h^2) separates into an x factor times a y factor.
  Eigen::VectorXd fx(opt.grid_resolution), fy(opt.grid_resolution);
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    fx = (-(g.grid_x.array() - pts(i, 0)).square() * inv2h2).exp();
    fy = (-(g.grid_y.array() - pts(i, 1)).square() * inv2h2).exp();
    g.density.noalias() += fx * fy.transpose();
  }
  g.density *= norm;
  g.isoline_level = opt.isoline_fraction * g.density.maxCoeff();
  return g;
}

}  // namespace disaudit::report
