#pragma once

#include <Eigen/Dense>
#include <vector>

#include "npsig/dataset.hpp"
#include "npsig/window_anova.hpp"

namespace npsig {

struct screen_report {
  Eigen::VectorXd p_values;            // one marginal p-value per covariate
  std::vector<Eigen::Index> kept;      // {j : p_j < threshold}, order preserved
  double threshold = 0.5;
};

//! Marginal significance test of column j: the adjustment set is empty, so
//! residuals are y minus its mean and the windows sit on column j.
test_result marginal_test(const dataset& ds, Eigen::Index j, const test_options& opt);

//! Runs the marginal test on every covariate and keeps those with p-value
//! below the threshold. Never returns an empty set: if everything screens
//! out, the single smallest-p variable is kept so the downstream pipeline
//! always has input.
screen_report screen(const dataset& ds, const test_options& opt,
                     double threshold = 0.5);

}  // namespace npsig
