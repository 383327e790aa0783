#include "npsig/screening.hpp"

#include <stdexcept>

namespace npsig {

test_result marginal_test(const dataset& ds, Eigen::Index j, const test_options& opt) {
  if (j < 0 || j >= ds.dim())
    throw std::invalid_argument("column index out of range");
  Eigen::MatrixXd empty(ds.n(), 0);
  return test_with_adjustment(empty, ds.x.col(j), ds.y, opt);
}

screen_report screen(const dataset& ds, const test_options& opt, double threshold) {
  screen_report report;
  report.threshold = threshold;
  report.p_values.resize(ds.dim());
  for (Eigen::Index j = 0; j < ds.dim(); ++j)
    report.p_values(j) = marginal_test(ds, j, opt).p_value;
  for (Eigen::Index j = 0; j < ds.dim(); ++j)
    if (report.p_values(j) < threshold) report.kept.push_back(j);
  if (report.kept.empty()) {
    Eigen::Index best = 0;
    report.p_values.minCoeff(&best);
    report.kept.push_back(best);
  }
  return report;
}

}  // namespace npsig
