#pragma once

#include <Eigen/Dense>
#include <optional>

#include "npsig/dataset.hpp"

namespace npsig {

struct sir_config {
  int num_slices = 10;          // H >= 2, at most n
  std::optional<int> fixed_k;   // empty: sequential chi-squared rule
  double level = 0.05;          // level of the sequential rule
};

//! Estimated projection onto the dimension-reduction subspace. Rows of `b`
//! are directions in original covariate scale; `eigenvalues` is the full
//! spectrum of the between-slice covariance of the whitened covariates, in
//! [0,1] and nonincreasing, recorded at fit time.
struct sir_basis {
  Eigen::MatrixXd b;            // K x d
  Eigen::VectorXd eigenvalues;
  int k() const { return static_cast<int>(b.rows()); }
};

//! Sliced inverse regression: whiten x by its sample covariance, slice the
//! observations into cfg.num_slices groups of near-equal size by sorted y
//! (extra members go to the lowest slices; ties keep original index order),
//! and eigen-decompose the slice-size-weighted covariance of slice means.
//! The top K eigenvector directions, mapped back to original scale, form b.
sir_basis sir_fit(const dataset& ds, const sir_config& cfg);

//! Smallest K >= 1 whose tail statistic n * sum_{i>K} lambda_i falls below
//! the (1-level) chi-squared quantile with (d-K)(H-K-1) degrees of freedom,
//! capped at min(d, H-1).
int select_k(const Eigen::VectorXd& eigenvalues, Eigen::Index n, Eigen::Index d,
             int num_slices, double level = 0.05);

//! Maps rows of x through the basis: returns x * b'.
Eigen::MatrixXd project(const Eigen::MatrixXd& x, const sir_basis& basis);

//! Removes covariate column j from the basis. Direction rows that become
//! entirely zero are removed (K shrinks); if nothing is left the basis no
//! longer constrains anything and a numeric_error("null basis") is thrown so
//! the caller can fall back to the marginal test.
sir_basis drop_column(const sir_basis& basis, Eigen::Index j);

}  // namespace npsig
