#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "npsig/dataset.hpp"
#include "npsig/kernel_regression.hpp"

namespace npsig {

//! Nearest-neighbor windows over the tested covariate. Ranks come from a
//! stable sort (ties keep original index order), so every window has exactly
//! p members. Window k covers ranks {k, ..., k+p-1}; there are n-p+1 of
//! them, one centered at each interior sorted position.
struct window_layout {
  std::vector<Eigen::Index> order;  // order[r] = original index of rank r
  int p = 0;
  Eigen::Index n = 0;

  Eigen::Index num_windows() const { return n - p + 1; }

  //! Rank indices of window k, materialized.
  std::vector<Eigen::Index> window_ranks(Eigen::Index k) const;
  //! All windows as rank-index sets.
  std::vector<std::vector<Eigen::Index>> windows() const;
};

window_layout build_windows(const Eigen::VectorXd& x2, int p);

//! Concatenates residuals over the windows: block k holds the residuals of
//! ranks k..k+p-1 in rank order. Length is num_windows * p.
Eigen::VectorXd augmented_vector(const Eigen::VectorXd& residuals,
                                 const window_layout& layout);

struct mean_squares {
  double mst = 0.0;
  double mse = 0.0;
};

//! Balanced one-way ANOVA mean squares over `cells` cells of size p:
//! MST = p * sum_i (cellmean_i - grandmean)^2 / (cells-1),
//! MSE = sum_ij (x_ij - cellmean_i)^2 / (cells*(p-1)).
mean_squares mst_mse(const Eigen::VectorXd& xi_v, Eigen::Index cells, int p);

//! Evaluates MST - MSE as the explicit quadratic form xi' A xi with
//! A = (Np-1)/(N(N-1)p(p-1)) blockdiag(J_p) - J_{Np}/(N(N-1)p) - I/(N(p-1)),
//! N = cells. The matrix is materialized entry by entry; this routine shares
//! no algebra with mst_mse and exists to cross-check it.
double quadratic_form_oracle(const Eigen::VectorXd& xi_v, Eigen::Index cells, int p);

//! Local fourth-order variance estimator from first differences of residuals
//! ordered by the tested covariate:
//! (1/(4(n-3))) sum_{j=2}^{n-2} (xi_j - xi_{j-1})^2 (xi_{j+2} - xi_{j+1})^2.
double rice_tau_sq(const Eigen::VectorXd& residuals_sorted);

//! Upper-tail standard normal probability, 1 - Phi(z).
double normal_sf(double z);

//! Null-variance constant 2p(2p-1) / (3(p-1)) multiplying tau^2.
double variance_constant(int p);

enum class estimator_kind { nadaraya_watson, marginal_integration };

struct test_options {
  int p = 9;                             // odd window size >= 3
  std::optional<bandwidth> h;            // empty = leave-one-out CV selection
  kernel_spec kernel;
  estimator_kind estimator = estimator_kind::nadaraya_watson;
  std::optional<double> c_override;      // replaces variance_constant(p)
  int cv_grid_size = 20;
};

struct test_result {
  double stat = 0.0;      // MST - MSE
  double mst = 0.0;
  double mse = 0.0;
  double tau_sq = 0.0;
  double z = 0.0;
  double p_value = 1.0;   // 1 - Phi(z)
  Eigen::Index n = 0;
  int p = 0;
  double c_p = 0.0;       // variance constant actually used
  bandwidth h;            // bandwidth used; empty when no smoothing happened
  int fallbacks = 0;
  std::vector<std::string> notes;
};

//! Core test of whether x2 carries signal beyond the adjustment block x1
//! (x1 may have zero columns: residuals are then y minus its mean).
//! z = sqrt(n) * (MST-MSE) / sqrt(C(p) * tau^2); a zero tau^2 maps to z = 0
//! when the statistic is also zero and to +/-infinity otherwise.
test_result test_with_adjustment(const Eigen::MatrixXd& x1,
                                 const Eigen::VectorXd& x2,
                                 const Eigen::VectorXd& y,
                                 const test_options& opt);

//! Dataset-level entry point: tests split.tested adjusting for
//! split.remaining.
test_result anova_test(const dataset& ds, const column_split& split,
                       const test_options& opt);

}  // namespace npsig
