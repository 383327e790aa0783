#include "npsig/kernel_regression.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "npsig/errors.hpp"

namespace npsig {

namespace {

void check_bandwidth(const bandwidth& h, Eigen::Index q) {
  if (h.lambdas.size() != q)
    throw std::invalid_argument("bandwidth has " + std::to_string(h.lambdas.size()) +
                                " lambdas, predictor has " + std::to_string(q) +
                                " columns");
  for (Eigen::Index c = 0; c < q; ++c)
    if (!(h.lambdas(c) > 0.0) || !std::isfinite(h.lambdas(c)))
      throw std::invalid_argument("bandwidth lambdas must be positive and finite");
}

// Product kernel weight between rows a of A and b of B.
inline double kernel_weight(const Eigen::MatrixXd& A, Eigen::Index a,
                            const Eigen::MatrixXd& B, Eigen::Index b,
                            const bandwidth& h, const kernel_spec& k) {
  for (Eigen::Index c = 0; c < A.cols(); ++c) {
    const double u = (A(a, c) - B(b, c)) / h.lambdas(c);
    if (std::abs(u) > k.support_half_width) return 0.0;
  }
  return 1.0;
}

// Mean of y computed against the pivot y_0, so a constant vector has an
// exactly constant mean.
double pivot_mean(const Eigen::VectorXd& y) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) acc += y(i) - y(0);
  return y(0) + acc / static_cast<double>(y.size());
}

}  // namespace

nw_fit_result nw_fit(const Eigen::MatrixXd& x1, const Eigen::VectorXd& y,
                     const bandwidth& h, const kernel_spec& k) {
  const Eigen::Index n = y.size();
  if (x1.rows() != n) throw std::invalid_argument("x1 rows must match y length");
  if (n < 2) throw std::invalid_argument("need n >= 2");
  if (x1.cols() < 1) throw std::invalid_argument("need q >= 1 predictor columns");
  check_bandwidth(h, x1.cols());

  nw_fit_result out;
  out.used = h;
  out.fitted.resize(n);
  out.residuals.resize(n);
  const double fallback = pivot_mean(y);
  for (Eigen::Index i = 0; i < n; ++i) {
    double den = 0.0, acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double w = kernel_weight(x1, i, x1, j, h, k);
      if (w != 0.0) {
        den += w;
        acc += w * (y(j) - y(i));
      }
    }
    if (den > 0.0) {
      // The residual is the negated local offset, so it is untouched by any
      // exactly representable shift of y.
      out.residuals(i) = -(acc / den);
      out.fitted(i) = y(i) - out.residuals(i);
    } else {
      out.fitted(i) = fallback;
      out.residuals(i) = y(i) - fallback;
      ++out.fallback_count;
    }
  }
  return out;
}

Eigen::VectorXd nw_predict(const Eigen::MatrixXd& x1, const Eigen::VectorXd& y,
                           const bandwidth& h, const kernel_spec& k,
                           const Eigen::MatrixXd& points, int* fallbacks) {
  const Eigen::Index n = y.size();
  if (x1.rows() != n) throw std::invalid_argument("x1 rows must match y length");
  if (points.cols() != x1.cols())
    throw std::invalid_argument("prediction points must match predictor width");
  check_bandwidth(h, x1.cols());

  Eigen::VectorXd out(points.rows());
  const double fallback = pivot_mean(y);
  int misses = 0;
  for (Eigen::Index m = 0; m < points.rows(); ++m) {
    double den = 0.0, num = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double w = kernel_weight(points, m, x1, j, h, k);
      if (w != 0.0) {
        den += w;
        num += w * y(j);
      }
    }
    if (den > 0.0) {
      out(m) = num / den;
    } else {
      out(m) = fallback;
      ++misses;
    }
  }
  if (fallbacks) *fallbacks = misses;
  return out;
}

bandwidth loo_cv_bandwidth(const Eigen::MatrixXd& x1, const Eigen::VectorXd& y,
                           const kernel_spec& k, const std::vector<bandwidth>& grid) {
  if (grid.empty()) throw std::invalid_argument("empty bandwidth grid");
  const Eigen::Index n = y.size();
  if (x1.rows() != n) throw std::invalid_argument("x1 rows must match y length");
  if (n < 2) throw std::invalid_argument("need n >= 2 for leave-one-out");

  const double total = y.sum();

  auto lex_less = [](const bandwidth& a, const bandwidth& b) {
    for (Eigen::Index c = 0; c < a.lambdas.size(); ++c) {
      if (a.lambdas(c) < b.lambdas(c)) return true;
      if (a.lambdas(c) > b.lambdas(c)) return false;
    }
    return false;
  };

  double best_score = std::numeric_limits<double>::infinity();
  std::size_t best = 0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    check_bandwidth(grid[g], x1.cols());
    double score = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double den = 0.0, acc = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        const double w = kernel_weight(x1, i, x1, j, grid[g], k);
        if (w != 0.0) {
          den += w;
          acc += w * (y(j) - y(i));
        }
      }
      const double pred = den > 0.0 ? y(i) + acc / den
                                    : (total - y(i)) / static_cast<double>(n - 1);
      const double err = y(i) - pred;
      score += err * err;
    }
    if (score < best_score ||
        (score == best_score && lex_less(grid[g], grid[best]))) {
      best_score = score;
      best = g;
    }
  }
  return grid[best];
}

std::vector<bandwidth> default_bandwidth_grid(const Eigen::MatrixXd& x1, int count) {
  if (count < 1) throw std::invalid_argument("grid count must be >= 1");
  const Eigen::Index n = x1.rows();
  const Eigen::Index q = x1.cols();
  if (n < 2 || q < 1) throw std::invalid_argument("need n >= 2 and q >= 1");

  Eigen::VectorXd base(q);
  const double rate = std::pow(static_cast<double>(n),
                               -1.0 / (4.0 + static_cast<double>(q)));
  for (Eigen::Index c = 0; c < q; ++c) {
    const Eigen::VectorXd centered = x1.col(c).array() - x1.col(c).mean();
    const double sd = std::sqrt(centered.squaredNorm() / static_cast<double>(n - 1));
    base(c) = sd > 0.0 ? sd * rate : 1.0;
  }

  std::vector<bandwidth> grid;
  grid.reserve(static_cast<std::size_t>(count));
  const double lo = std::log(0.25), hi = std::log(4.0);
  for (int i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.5 : static_cast<double>(i) / (count - 1);
    const double mult = std::exp(lo + t * (hi - lo));
    grid.push_back(bandwidth{base * mult});
  }
  return grid;
}

nw_fit_result marginal_integration_fit(const Eigen::MatrixXd& x1,
                                       const Eigen::VectorXd& x2,
                                       const Eigen::VectorXd& y,
                                       const bandwidth& h_full,
                                       const kernel_spec& k) {
  const Eigen::Index n = y.size();
  const Eigen::Index q = x1.cols();
  if (x1.rows() != n || x2.size() != n)
    throw std::invalid_argument("x1, x2 and y must have matching lengths");
  if (n < 2) throw std::invalid_argument("need n >= 2");
  if (q < 1) throw std::invalid_argument("need at least one x1 column");
  check_bandwidth(h_full, q + 1);

  bandwidth h1{h_full.lambdas.head(q)};
  const double lam2 = h_full.lambdas(q);

  // U(i,l): product-kernel indicator on the x1 block; V(m,l): on x2.
  Eigen::MatrixXd U(n, n), V(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index l = 0; l < n; ++l)
      U(i, l) = kernel_weight(x1, i, x1, l, h1, k);
  const double half = k.support_half_width;
  for (Eigen::Index m = 0; m < n; ++m)
    for (Eigen::Index l = 0; l < n; ++l)
      V(m, l) = std::abs((x2(m) - x2(l)) / lam2) <= half ? 1.0 : 0.0;

  // mhat(x1_i, x2_{i'}) = P(i,i')/D(i,i'); zero-mass cells fall back to the
  // global mean of y.
  const Eigen::MatrixXd D = U * V.transpose();
  const Eigen::MatrixXd P = U * (y.asDiagonal() * V.transpose());
  const double fallback = pivot_mean(y);

  nw_fit_result out;
  out.used = h_full;
  out.fitted.resize(n);
  out.residuals.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (Eigen::Index m = 0; m < n; ++m) {
      if (D(i, m) > 0.0) {
        acc += P(i, m) / D(i, m) - y(i);
      } else {
        acc += fallback - y(i);
        ++out.fallback_count;
      }
    }
    out.residuals(i) = -(acc / static_cast<double>(n));
    out.fitted(i) = y(i) - out.residuals(i);
  }
  return out;
}

}  // namespace npsig
