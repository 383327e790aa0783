#pragma once

#include <Eigen/Dense>
#include <vector>

namespace npsig {

//! Diagonal bandwidth: one positive lambda per predictor coordinate.
struct bandwidth {
  Eigen::VectorXd lambdas;
};

enum class kernel_family { uniform_product };

//! Product kernel applied coordinatewise to (x_i - x_j) / lambda. The only
//! required family is the uniform density with support half-width 0.5, so a
//! point contributes whenever every scaled coordinate distance is <= 0.5.
struct kernel_spec {
  kernel_family family = kernel_family::uniform_product;
  double support_half_width = 0.5;
};

struct nw_fit_result {
  Eigen::VectorXd fitted;     // fitted == y - residuals, bit for bit
  Eigen::VectorXd residuals;
  bandwidth used;
  int fallback_count = 0;     // evaluation points with zero kernel mass
};

//! Nadaraya-Watson fit of y on x1 evaluated at the sample points themselves
//! (self-weight included). Internally the local average is computed relative
//! to the pivot y_i, so constants are reproduced exactly and shifting y by c
//! shifts every fitted value by exactly c. A point whose window is empty
//! (impossible for the uniform kernel at sample points, possible off-sample)
//! falls back to the global mean of y.
nw_fit_result nw_fit(const Eigen::MatrixXd& x1, const Eigen::VectorXd& y,
                     const bandwidth& h, const kernel_spec& k = {});

//! Same estimator evaluated at arbitrary points. Zero-mass points predict the
//! global mean of y; `fallbacks`, when given, receives their count.
Eigen::VectorXd nw_predict(const Eigen::MatrixXd& x1, const Eigen::VectorXd& y,
                           const bandwidth& h, const kernel_spec& k,
                           const Eigen::MatrixXd& points, int* fallbacks = nullptr);

//! Leave-one-out cross validation over a candidate grid: picks the bandwidth
//! minimizing sum_i (y_i - mhat_{-i}(x_i))^2, where the leave-one-out
//! prediction of a point with empty window is the mean of the other y's.
//! Ties go to the lexicographically smallest lambda vector.
bandwidth loo_cv_bandwidth(const Eigen::MatrixXd& x1, const Eigen::VectorXd& y,
                           const kernel_spec& k, const std::vector<bandwidth>& grid);

//! Default CV grid: `count` log-spaced multiples, from 0.25x to 4x, of the
//! per-coordinate sample standard deviation times n^(-1/(4+q)). A constant
//! coordinate gets lambda 1; under the product kernel it then never excludes
//! anything, which is the right degenerate behavior.
std::vector<bandwidth> default_bandwidth_grid(const Eigen::MatrixXd& x1,
                                              int count = 20);

//! Marginal-integration estimator: the fit at x1_i is the average over i' of
//! the full-dimensional Nadaraya-Watson prediction at (x1_i, x2_{i'}).
//! h_full has one lambda per x1 column plus a final lambda for x2.
nw_fit_result marginal_integration_fit(const Eigen::MatrixXd& x1,
                                       const Eigen::VectorXd& x2,
                                       const Eigen::VectorXd& y,
                                       const bandwidth& h_full,
                                       const kernel_spec& k = {});

}  // namespace npsig
