#include "npsig/window_anova.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "npsig/errors.hpp"

namespace npsig {

std::vector<Eigen::Index> window_layout::window_ranks(Eigen::Index k) const {
  if (k < 0 || k >= num_windows())
    throw std::invalid_argument("window index out of range");
  std::vector<Eigen::Index> ranks(static_cast<std::size_t>(p));
  std::iota(ranks.begin(), ranks.end(), k);
  return ranks;
}

std::vector<std::vector<Eigen::Index>> window_layout::windows() const {
  std::vector<std::vector<Eigen::Index>> all;
  all.reserve(static_cast<std::size_t>(num_windows()));
  for (Eigen::Index k = 0; k < num_windows(); ++k) all.push_back(window_ranks(k));
  return all;
}

window_layout build_windows(const Eigen::VectorXd& x2, int p) {
  const Eigen::Index n = x2.size();
  if (p % 2 == 0) throw std::invalid_argument("cell size p must be odd");
  if (p < 3) throw std::invalid_argument("cell size p must be >= 3");
  if (static_cast<Eigen::Index>(p) > n)
    throw std::invalid_argument("cell size p exceeds sample size");

  window_layout layout;
  layout.p = p;
  layout.n = n;
  layout.order.resize(static_cast<std::size_t>(n));
  std::iota(layout.order.begin(), layout.order.end(), Eigen::Index{0});
  std::stable_sort(layout.order.begin(), layout.order.end(),
                   [&x2](Eigen::Index a, Eigen::Index b) { return x2(a) < x2(b); });
  return layout;
}

Eigen::VectorXd augmented_vector(const Eigen::VectorXd& residuals,
                                 const window_layout& layout) {
  if (residuals.size() != layout.n)
    throw std::invalid_argument("residual length does not match the layout");
  const Eigen::Index N = layout.num_windows();
  Eigen::VectorXd sorted(layout.n);
  for (Eigen::Index r = 0; r < layout.n; ++r)
    sorted(r) = residuals(layout.order[static_cast<std::size_t>(r)]);
  Eigen::VectorXd out(N * layout.p);
  for (Eigen::Index k = 0; k < N; ++k)
    out.segment(k * layout.p, layout.p) = sorted.segment(k, layout.p);
  return out;
}

mean_squares mst_mse(const Eigen::VectorXd& xi_v, Eigen::Index cells, int p) {
  if (cells < 2) throw std::invalid_argument("need at least two cells");
  if (p < 2) throw std::invalid_argument("need cell size >= 2");
  if (xi_v.size() != cells * p)
    throw std::invalid_argument("augmented vector length must be cells * p");

  Eigen::VectorXd cell_mean(cells);
  for (Eigen::Index i = 0; i < cells; ++i)
    cell_mean(i) = xi_v.segment(i * p, p).mean();
  const double grand = xi_v.mean();

  mean_squares ms;
  for (Eigen::Index i = 0; i < cells; ++i) {
    const double d = cell_mean(i) - grand;
    ms.mst += d * d;
    for (Eigen::Index j = 0; j < p; ++j) {
      const double e = xi_v(i * p + j) - cell_mean(i);
      ms.mse += e * e;
    }
  }
  ms.mst *= static_cast<double>(p) / static_cast<double>(cells - 1);
  ms.mse /= static_cast<double>(cells) * static_cast<double>(p - 1);
  return ms;
}

double quadratic_form_oracle(const Eigen::VectorXd& xi_v, Eigen::Index cells, int p) {
  if (cells < 2) throw std::invalid_argument("need at least two cells");
  if (p < 2) throw std::invalid_argument("need cell size >= 2");
  const Eigen::Index m = cells * p;
  if (xi_v.size() != m)
    throw std::invalid_argument("augmented vector length must be cells * p");

  const double N = static_cast<double>(cells);
  const double pd = static_cast<double>(p);
  const double c_block = (N * pd - 1.0) / (N * (N - 1.0) * pd * (pd - 1.0));
  const double c_all = 1.0 / (N * (N - 1.0) * pd);
  const double c_diag = 1.0 / (N * (pd - 1.0));

  Eigen::MatrixXd A(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      double v = -c_all;
      if (a / p == b / p) v += c_block;
      if (a == b) v -= c_diag;
      A(a, b) = v;
    }
  }

  double value = 0.0;
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b) value += xi_v(a) * A(a, b) * xi_v(b);
  return value;
}

double rice_tau_sq(const Eigen::VectorXd& residuals_sorted) {
  const Eigen::Index n = residuals_sorted.size();
  if (n < 4) throw std::invalid_argument("need n >= 4 residuals");
  double sum = 0.0;
  for (Eigen::Index j = 1; j + 2 < n; ++j) {
    const double a = residuals_sorted(j) - residuals_sorted(j - 1);
    const double b = residuals_sorted(j + 2) - residuals_sorted(j + 1);
    sum += a * a * b * b;
  }
  return sum / (4.0 * static_cast<double>(n - 3));
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double variance_constant(int p) {
  return 2.0 * p * (2.0 * p - 1.0) / (3.0 * (p - 1.0));
}

namespace {

Eigen::Index count_distinct(const Eigen::VectorXd& v) {
  std::vector<double> sorted(v.data(), v.data() + v.size());
  std::sort(sorted.begin(), sorted.end());
  return static_cast<Eigen::Index>(
      std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

// Residuals about the sample mean, differenced against the first element so
// an exactly constant y produces exactly zero residuals.
Eigen::VectorXd center_residuals(const Eigen::VectorXd& y) {
  Eigen::VectorXd diff = y.array() - y(0);
  return diff.array() - diff.mean();
}

}  // namespace

test_result test_with_adjustment(const Eigen::MatrixXd& x1,
                                 const Eigen::VectorXd& x2,
                                 const Eigen::VectorXd& y,
                                 const test_options& opt) {
  const Eigen::Index n = y.size();
  if (x2.size() != n) throw std::invalid_argument("x2 length must match y");
  if (x1.cols() > 0 && x1.rows() != n)
    throw std::invalid_argument("x1 rows must match y length");
  if (opt.p % 2 == 0 || opt.p < 3)
    throw std::invalid_argument("cell size p must be odd and >= 3");
  if (n <= opt.p) throw std::invalid_argument("need n > p");
  if (count_distinct(x2) < opt.p)
    throw numeric_error("tested covariate has fewer than p distinct values");

  test_result res;
  res.n = n;
  res.p = opt.p;

  Eigen::VectorXd residuals;
  const Eigen::Index q = x1.cols();
  if (q == 0) {
    residuals = center_residuals(y);
  } else {
    if (q > 4)
      res.notes.push_back("adjustment dimension " + std::to_string(q) +
                          " exceeds 4; the normal approximation may be poor");
    if (opt.estimator == estimator_kind::nadaraya_watson) {
      bandwidth h = opt.h ? *opt.h
                          : loo_cv_bandwidth(x1, y, opt.kernel,
                                             default_bandwidth_grid(x1, opt.cv_grid_size));
      auto fit = nw_fit(x1, y, h, opt.kernel);
      residuals = std::move(fit.residuals);
      res.h = std::move(fit.used);
      res.fallbacks = fit.fallback_count;
    } else {
      Eigen::MatrixXd full(n, q + 1);
      full.leftCols(q) = x1;
      full.col(q) = x2;
      bandwidth h = opt.h ? *opt.h
                          : loo_cv_bandwidth(full, y, opt.kernel,
                                             default_bandwidth_grid(full, opt.cv_grid_size));
      auto fit = marginal_integration_fit(x1, x2, y, h, opt.kernel);
      residuals = std::move(fit.residuals);
      res.h = std::move(fit.used);
      res.fallbacks = fit.fallback_count;
    }
  }

  const window_layout layout = build_windows(x2, opt.p);
  const Eigen::VectorXd xi_v = augmented_vector(residuals, layout);
  const mean_squares ms = mst_mse(xi_v, layout.num_windows(), opt.p);
  res.mst = ms.mst;
  res.mse = ms.mse;
  res.stat = ms.mst - ms.mse;

  Eigen::VectorXd sorted(n);
  for (Eigen::Index r = 0; r < n; ++r)
    sorted(r) = residuals(layout.order[static_cast<std::size_t>(r)]);
  res.tau_sq = rice_tau_sq(sorted);

  res.c_p = opt.c_override ? *opt.c_override : variance_constant(opt.p);
  if (res.tau_sq > 0.0) {
    res.z = std::sqrt(static_cast<double>(n)) * res.stat /
            std::sqrt(res.c_p * res.tau_sq);
  } else {
    // Limit of the standardization as tau^2 -> 0.
    res.z = res.stat == 0.0 ? 0.0
                            : std::copysign(std::numeric_limits<double>::infinity(),
                                            res.stat);
  }
  res.p_value = normal_sf(res.z);
  return res;
}

test_result anova_test(const dataset& ds, const column_split& split,
                       const test_options& opt) {
  if (split.tested < 0 || split.tested >= ds.dim())
    throw std::invalid_argument("tested column out of range");
  Eigen::MatrixXd x1(ds.n(), static_cast<Eigen::Index>(split.remaining.size()));
  for (std::size_t i = 0; i < split.remaining.size(); ++i) {
    const Eigen::Index c = split.remaining[i];
    if (c < 0 || c >= ds.dim() || c == split.tested)
      throw std::invalid_argument("invalid adjustment column set");
    x1.col(static_cast<Eigen::Index>(i)) = ds.x.col(c);
  }
  return test_with_adjustment(x1, ds.x.col(split.tested), ds.y, opt);
}

}  // namespace npsig
