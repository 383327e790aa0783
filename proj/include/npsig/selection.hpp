#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "npsig/dataset.hpp"
#include "npsig/screening.hpp"
#include "npsig/sir.hpp"
#include "npsig/window_anova.hpp"

namespace npsig {

struct selection_config {
  double alpha = 0.06;            // level of the step-up rule
  test_options test;              // cell size, estimator, bandwidth policy
  bool screening = true;
  double screen_threshold = 0.5;
  bool use_sir = true;
  sir_config sir;
};

//! One elimination round: the survivors entering it, their p-values, the
//! step-up index k, and what happened. `dropped` is empty when the round
//! stopped retaining all survivors.
struct round_record {
  std::vector<Eigen::Index> survivors;
  Eigen::VectorXd p_values;                // aligned with survivors
  Eigen::Index by_k = 0;
  std::optional<Eigen::Index> dropped;     // original column index
  bool marginal_fallback = false;          // round ran marginal tests only
};

struct selection_trace {
  bool screened = false;
  screen_report screening;                 // populated when screened
  std::optional<sir_basis> initial_basis;
  std::vector<round_record> rounds;
  std::vector<Eigen::Index> selected;
  std::vector<std::string> notes;
};

//! Step-up index of Benjamini and Yekutieli (2001): with ordered p-values
//! pi_(1) <= ... <= pi_(d) and harmonic sum S = sum_{l=1}^d 1/l, returns
//! k = max{ j : pi_(j) <= (j/d) * alpha / S }, or 0 when no j qualifies.
Eigen::Index by_threshold(const std::vector<double>& pvalues, double alpha);

//! Tests survivor `pos` against the others: drops its column from the basis,
//! projects the remaining covariates through what is left, and runs the
//! window test on the tested column. Falls back to the marginal test when
//! only one survivor remains or the reduced basis is null.
test_result test_variable(const dataset& ds,
                          const std::vector<Eigen::Index>& survivors,
                          const sir_basis& basis, std::size_t pos,
                          const test_options& opt);

//! Backward elimination: optional screening, one SIR fit on the survivors,
//! then rounds of per-variable tests. A round either retains everything
//! (step-up index equals the survivor count) or drops the variable with the
//! largest p-value (ties: larger column index) and removes its column from
//! the basis without refitting. A final lone survivor faces the marginal
//! test against the d=1 cutoff, which is alpha itself.
selection_trace backward_eliminate(const dataset& ds, const selection_config& cfg);

}  // namespace npsig
