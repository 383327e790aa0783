#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "npsig/dataset.hpp"
#include "npsig/rng.hpp"
#include "npsig/selection.hpp"
#include "npsig/window_anova.hpp"

namespace npsig {

//! Built-in data generating scenarios for the Monte Carlo drivers. Rejection
//! scenarios carry a designated tested covariate; table4/table5 are variable
//! selection scenarios.
enum class scenario_id {
  table1,          // Y = X1 + theta X2 + gamma X1 X2 + e,  X ~ U(0,1)^2, sd(e)=3
  table2_f0,       // Y = -X1 + X1^3 + f_j(X2) + e, X ~ N(0,1)^2, var(e)=4
  table2_f1,       //   f1 = 0.5 X2
  table2_f2,       //   f2 = X2
  table2_f3,       //   f3 = 2 X2
  table2_f4,       //   f4 = sin(2 pi X2)
  table2_f5,       //   f5 = sin(pi X2)
  table2_f6,       //   f6 = sin(2/3 pi X2)
  table3_nonadd,   // Y = X1^X2 (1+theta X3) + X2^(1+theta X3)/X2 + e
  table3_hetero,   // Y = X1^2 + theta cos(pi X2) + X2 e
  table4_identity, // Y = beta'X + e, d=25, X ~ N(0, I), sd(e)=3
  table4_ar,       //   same with Sigma = (0.5^|i-j|)
  table5_g1,       // Y = sin(pi X1) + e, d=8, AR covariance, sd(e)=0.3
  table5_g2,       // Y = sin(3/4 pi X1) - 3 Phi(-|X5|^3) + e
};

scenario_id parse_scenario(const std::string& name);
std::string scenario_name(scenario_id id);
//! Sample size used in the source tables; the caller may override it.
int scenario_default_n(scenario_id id);
bool is_selection_scenario(scenario_id id);

struct scenario_spec {
  scenario_id id = scenario_id::table2_f0;
  int n = 0;              // 0: scenario default
  double theta = 0.0;     // table1, table3-*
  double gamma = 0.0;     // table1
  std::uint64_t seed = 0;
};

struct generated_data {
  dataset data;
  std::vector<Eigen::Index> relevant;  // covariates entering the mean function
  Eigen::Index tested = -1;            // rejection scenarios only
};

//! Draws one dataset from the scenario. Covariates are drawn row-major,
//! then the errors, so the stream layout is fixed regardless of scheduling.
generated_data generate(const scenario_spec& spec, rng& gen);

//! Rows are iid N(mean, cov) via the lower Cholesky factor of cov.
Eigen::MatrixXd mvn_sample(rng& gen, const Eigen::VectorXd& mean,
                           const Eigen::MatrixXd& cov, Eigen::Index n);

struct rejection_report {
  std::string scenario;
  int runs = 0;
  double level = 0.05;
  double rate = 0.0;
  double mcse = 0.0;       // sqrt(rate (1-rate) / runs)
  double mean_z = 0.0;
  std::uint64_t seed = 0;
  std::string rng_name;
};

struct selection_report {
  std::string scenario;
  int runs = 0;
  double mean_correct = 0.0;    // irrelevant variables excluded, mean
  double mean_incorrect = 0.0;  // relevant variables excluded, mean
  double mcse_correct = 0.0;
  double mcse_incorrect = 0.0;
  std::uint64_t seed = 0;
  std::string rng_name;
};

//! Replicate r draws its dataset from rng(child_seed(spec.seed, r)), runs
//! the window test on the scenario's tested covariate and rejects when the
//! p-value is below `level`. Thread count changes wall time only.
rejection_report run_rejection_study(const scenario_spec& spec, int runs,
                                     double level, const test_options& opt,
                                     int threads = 1);

//! Replicate r runs backward elimination on its drawn dataset and counts
//! exclusions against the scenario's ground truth.
selection_report run_selection_study(const scenario_spec& spec, int runs,
                                     const selection_config& cfg,
                                     int threads = 1);

struct exclusion_counts {
  int correct = 0;    // irrelevant variables excluded
  int incorrect = 0;  // relevant variables excluded
};

//! Exclusions of a selected set against the ground truth over d variables.
//! A selector that retains everything scores (0, 0).
exclusion_counts count_exclusions(const std::vector<Eigen::Index>& selected,
                                  const std::vector<Eigen::Index>& relevant,
                                  Eigen::Index d);

//! Runs fn(0..total-1) across `threads` workers; used by the studies.
void parallel_for(int total, int threads, const std::function<void(int)>& fn);

}  // namespace npsig
