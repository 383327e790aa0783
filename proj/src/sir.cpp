#include "npsig/sir.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <numeric>
#include <stdexcept>

#include "npsig/errors.hpp"

namespace npsig {

sir_basis sir_fit(const dataset& ds, const sir_config& cfg) {
  const Eigen::Index n = ds.n();
  const Eigen::Index d = ds.dim();
  const int H = cfg.num_slices;
  if (H < 2) throw std::invalid_argument("need at least two slices");
  if (static_cast<Eigen::Index>(H) > n)
    throw numeric_error("more slices than observations");
  if (n < d + H)
    throw numeric_error("need n >= d + H observations for SIR");

  // Whiten: per-column scaling first, then the correlation root, applied
  // twice. The second pass scrubs the O(kappa * eps) residual of the first
  // so that two affinely related designs whiten to the same data up to an
  // orthogonal map at machine precision.
  const standardization std_x = standardize(ds.x);
  auto half_inverse = [d](const Eigen::MatrixXd& cov) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success)
      throw numeric_error("covariance eigendecomposition failed");
    const Eigen::VectorXd w = eig.eigenvalues();
    if (w(0) <= 1e-12 * w(d - 1))
      throw numeric_error("singular covariate covariance");
    return Eigen::MatrixXd(eig.eigenvectors() *
                           w.cwiseSqrt().cwiseInverse().asDiagonal() *
                           eig.eigenvectors().transpose());
  };
  Eigen::MatrixXd root_inv = half_inverse(
      std_x.z.transpose() * std_x.z / static_cast<double>(n - 1));
  Eigen::MatrixXd z = std_x.z * root_inv;
  const Eigen::MatrixXd polish =
      half_inverse(z.transpose() * z / static_cast<double>(n - 1));
  root_inv *= polish;
  z *= polish;

  // Slice by sorted response, stable in the original index.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&ds](Eigen::Index a, Eigen::Index b) {
    return ds.y(a) < ds.y(b);
  });
  const Eigen::Index base = n / H;
  const Eigen::Index extra = n % H;

  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(d, d);
  Eigen::Index pos = 0;
  for (int h = 0; h < H; ++h) {
    const Eigen::Index size = base + (h < extra ? 1 : 0);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
    for (Eigen::Index i = 0; i < size; ++i)
      mean += z.row(order[static_cast<std::size_t>(pos + i)]).transpose();
    mean /= static_cast<double>(size);
    M += (static_cast<double>(size) / static_cast<double>(n)) * mean *
         mean.transpose();
    pos += size;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> m_eig(M);
  if (m_eig.info() != Eigen::Success)
    throw numeric_error("slice-mean eigendecomposition failed");

  sir_basis basis;
  basis.eigenvalues.resize(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    // Eigen sorts ascending; report descending and clamp roundoff into [0,1].
    const double lambda = m_eig.eigenvalues()(d - 1 - i);
    basis.eigenvalues(i) = std::min(1.0, std::max(0.0, lambda));
  }

  int K;
  if (cfg.fixed_k) {
    K = *cfg.fixed_k;
    const int cap = static_cast<int>(std::min<Eigen::Index>(d, H - 1));
    if (K < 1 || K > cap)
      throw std::invalid_argument("fixed K must lie in [1, min(d, H-1)]");
  } else {
    K = select_k(basis.eigenvalues, n, d, H, cfg.level);
  }

  basis.b.resize(K, d);
  for (int k = 0; k < K; ++k) {
    const Eigen::VectorXd v = m_eig.eigenvectors().col(d - 1 - k);
    // Undo the whitening so the direction applies to raw covariates.
    basis.b.row(k) = (root_inv * v).cwiseQuotient(std_x.scale).transpose();
  }
  return basis;
}

int select_k(const Eigen::VectorXd& eigenvalues, Eigen::Index n, Eigen::Index d,
             int num_slices, double level) {
  if (eigenvalues.size() != d)
    throw std::invalid_argument("eigenvalue count must equal d");
  if (level <= 0.0 || level >= 1.0)
    throw std::invalid_argument("level must be in (0,1)");
  const int cap =
      std::max(1, static_cast<int>(std::min<Eigen::Index>(d, num_slices - 1)));
  for (int K = 1; K < cap; ++K) {
    const double tail = eigenvalues.tail(d - K).sum();
    const double stat = static_cast<double>(n) * tail;
    const double df = static_cast<double>((d - K) * (num_slices - K - 1));
    if (df <= 0.0) break;
    boost::math::chi_squared chi(df);
    if (stat < boost::math::quantile(chi, 1.0 - level)) return K;
  }
  return cap;
}

Eigen::MatrixXd project(const Eigen::MatrixXd& x, const sir_basis& basis) {
  if (x.cols() != basis.b.cols())
    throw std::invalid_argument("projection dimension mismatch");
  return x * basis.b.transpose();
}

sir_basis drop_column(const sir_basis& basis, Eigen::Index j) {
  const Eigen::Index d = basis.b.cols();
  if (j < 0 || j >= d) throw std::invalid_argument("column index out of range");
  if (d < 2) throw std::invalid_argument("cannot drop the only column");

  Eigen::MatrixXd reduced(basis.b.rows(), d - 1);
  reduced.leftCols(j) = basis.b.leftCols(j);
  reduced.rightCols(d - 1 - j) = basis.b.rightCols(d - 1 - j);

  std::vector<Eigen::Index> keep;
  for (Eigen::Index r = 0; r < reduced.rows(); ++r) {
    const double tol =
        1e-10 * (1.0 + basis.b.row(r).lpNorm<Eigen::Infinity>());
    if (reduced.row(r).lpNorm<Eigen::Infinity>() > tol) keep.push_back(r);
  }
  if (keep.empty()) throw numeric_error("null basis");

  sir_basis out;
  out.eigenvalues = basis.eigenvalues;
  out.b.resize(static_cast<Eigen::Index>(keep.size()), d - 1);
  for (std::size_t r = 0; r < keep.size(); ++r)
    out.b.row(static_cast<Eigen::Index>(r)) = reduced.row(keep[r]);
  return out;
}

}  // namespace npsig
