#include <doctest.h>

#include <cmath>
#include <numeric>

#include "npsig/errors.hpp"
#include "npsig/rng.hpp"
#include "npsig/sir.hpp"

using namespace npsig;

namespace {

constexpr double kPi = 3.14159265358979323846;

dataset gaussian_design(rng& gen, Eigen::Index n, Eigen::Index d) {
  dataset ds;
  ds.x.resize(n, d);
  ds.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c < d; ++c) ds.x(i, c) = gen.normal();
    ds.y(i) = gen.normal();
  }
  for (Eigen::Index c = 0; c < d; ++c)
    ds.names.push_back("x" + std::to_string(c + 1));
  ds.response_name = "y";
  return ds;
}

// Largest principal angle between the row spaces of two bases, in radians.
double principal_angle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Eigen::MatrixXd qa =
      Eigen::HouseholderQR<Eigen::MatrixXd>(a.transpose())
          .householderQ() *
      Eigen::MatrixXd::Identity(a.cols(), a.rows());
  const Eigen::MatrixXd qb =
      Eigen::HouseholderQR<Eigen::MatrixXd>(b.transpose())
          .householderQ() *
      Eigen::MatrixXd::Identity(b.cols(), b.rows());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(qa.transpose() * qb);
  const double c = std::min(1.0, svd.singularValues().minCoeff());
  return std::acos(c);
}

}  // namespace

TEST_CASE("sir_fit recovers a single linear direction") {
  rng gen(51);
  dataset ds = gaussian_design(gen, 2000, 3);
  ds.y = ds.x.col(0);
  sir_config cfg;
  cfg.num_slices = 10;
  const sir_basis basis = sir_fit(ds, cfg);
  CHECK(basis.k() == 1);
  CHECK(basis.eigenvalues(0) > 0.8);
  CHECK(basis.eigenvalues(1) < 0.05);
  CHECK(basis.eigenvalues(2) < 0.05);

  Eigen::MatrixXd e1 = Eigen::MatrixXd::Zero(1, 3);
  e1(0, 0) = 1.0;
  CHECK(principal_angle(basis.b, e1) < 5.0 * kPi / 180.0);
}

TEST_CASE("sir_fit finds no structure under independence") {
  rng gen(52);
  dataset ds = gaussian_design(gen, 2000, 3);
  sir_config cfg;
  cfg.num_slices = 10;
  cfg.fixed_k = 1;
  const sir_basis basis = sir_fit(ds, cfg);
  for (Eigen::Index i = 0; i < 3; ++i) CHECK(basis.eigenvalues(i) < 0.02);
}

TEST_CASE("sir eigenvalues stay in [0,1] and nonincreasing") {
  rng gen(53);
  dataset ds = gaussian_design(gen, 300, 4);
  ds.y = (ds.x.col(0) + ds.x.col(1)).array().sin();
  sir_config cfg;
  cfg.num_slices = 8;
  const sir_basis basis = sir_fit(ds, cfg);
  for (Eigen::Index i = 0; i < 4; ++i) {
    CHECK(basis.eigenvalues(i) >= -1e-9);
    CHECK(basis.eigenvalues(i) <= 1.0 + 1e-9);
    if (i > 0) CHECK(basis.eigenvalues(i) <= basis.eigenvalues(i - 1) + 1e-12);
  }
}

TEST_CASE("sir_fit is affine equivariant") {
  rng gen(54);
  dataset ds = gaussian_design(gen, 1000, 3);
  // Two directions the slice means can see, with a healthy spectral gap.
  ds.y = ds.x.col(0) + 0.8 * ds.x.col(2).array().cube().matrix();
  sir_config cfg;
  cfg.num_slices = 10;
  cfg.fixed_k = 2;
  const sir_basis base = sir_fit(ds, cfg);

  Eigen::MatrixXd a(3, 3);
  a << 2, 1, 0, 0.5, 3, -1, 0, 0.2, 1.5;
  Eigen::RowVector3d c(4.0, -2.0, 7.0);
  dataset mapped = ds;
  mapped.x = (ds.x * a).rowwise() + c;
  const sir_basis moved = sir_fit(mapped, cfg);

  // Column spaces agree once the affine map is undone: directions transform
  // contravariantly, so compare b_base with b_moved * a'.
  const Eigen::MatrixXd pulled_back = moved.b * a.transpose();
  CHECK(principal_angle(base.b, pulled_back) < 1e-8);
}

TEST_CASE("sir_fit depends on y only through its ranks") {
  rng gen(55);
  dataset ds = gaussian_design(gen, 400, 3);
  ds.y = ds.x.col(1) + 0.1 * ds.y;
  sir_config cfg;
  cfg.num_slices = 10;
  cfg.fixed_k = 1;
  const sir_basis base = sir_fit(ds, cfg);

  dataset warped = ds;
  warped.y = (ds.y.array() * 3.0).exp();  // strictly increasing transform
  const sir_basis same = sir_fit(warped, cfg);
  CHECK((same.b - base.b).cwiseAbs().maxCoeff() == 0.0);
  CHECK((same.eigenvalues - base.eigenvalues).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sir_fit is row-permutation invariant") {
  rng gen(56);
  dataset ds = gaussian_design(gen, 200, 3);
  ds.y = ds.x.col(0).array().cos();
  sir_config cfg;
  cfg.num_slices = 5;
  cfg.fixed_k = 1;
  const sir_basis base = sir_fit(ds, cfg);

  std::vector<Eigen::Index> perm(200);
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  for (Eigen::Index i = 199; i > 0; --i)
    std::swap(perm[i], perm[gen.next_u64() % (i + 1)]);
  dataset permuted = ds;
  for (Eigen::Index i = 0; i < 200; ++i) {
    permuted.y(i) = ds.y(perm[i]);
    permuted.x.row(i) = ds.x.row(perm[i]);
  }
  const sir_basis moved = sir_fit(permuted, cfg);
  CHECK(principal_angle(moved.b, base.b) < 1e-9);
  CHECK((moved.eigenvalues - base.eigenvalues).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("sir_fit input checks") {
  rng gen(57);
  dataset ds = gaussian_design(gen, 30, 3);
  ds.y = ds.x.col(0);
  sir_config cfg;
  cfg.num_slices = 40;
  CHECK_THROWS_AS(sir_fit(ds, cfg), numeric_error);  // H > n
  cfg.num_slices = 28;
  CHECK_THROWS_AS(sir_fit(ds, cfg), numeric_error);  // n < d + H
  cfg.num_slices = 5;
  dataset collinear = ds;
  collinear.x.col(2) = 2.0 * collinear.x.col(0);
  CHECK_THROWS_AS(sir_fit(collinear, cfg), numeric_error);
}

TEST_CASE("select_k") {
  SUBCASE("dominant first eigenvalue gives K=1") {
    Eigen::VectorXd eig(3);
    eig << 0.9, 0.001, 0.001;
    CHECK(select_k(eig, 2000, 3, 10) == 1);
  }
  SUBCASE("all-zero spectrum floors at K=1") {
    CHECK(select_k(Eigen::VectorXd::Zero(4), 500, 4, 10) == 1);
  }
  SUBCASE("large spectrum hits the cap") {
    Eigen::VectorXd eig(3);
    eig << 0.9, 0.8, 0.7;
    CHECK(select_k(eig, 100000, 3, 10) == 3);
    CHECK(select_k(eig, 100000, 3, 3) == 2);  // cap = H - 1
  }
}

TEST_CASE("project") {
  sir_basis basis;
  basis.b.resize(2, 3);
  basis.b << 1, 0, 0, 0, 0, 1;
  basis.eigenvalues = Eigen::VectorXd::Ones(3);
  Eigen::MatrixXd x(2, 3);
  x << 1, 2, 3, 4, 5, 6;
  const Eigen::MatrixXd p = project(x, basis);
  CHECK(p(0, 0) == 1.0);
  CHECK(p(0, 1) == 3.0);
  CHECK(p(1, 0) == 4.0);

  SUBCASE("unit diagonal combination") {
    sir_basis diag;
    diag.b.resize(1, 2);
    const double s = 1.0 / std::sqrt(2.0);
    diag.b << s, s;
    diag.eigenvalues = Eigen::VectorXd::Ones(2);
    Eigen::MatrixXd row(1, 2);
    row << 1, 1;
    CHECK(project(row, diag)(0, 0) == doctest::Approx(std::sqrt(2.0)));
  }
  SUBCASE("zero input maps to zero") {
    CHECK(project(Eigen::MatrixXd::Zero(3, 3), basis).isZero(0.0));
  }
  SUBCASE("width mismatch rejected") {
    CHECK_THROWS_AS(project(Eigen::MatrixXd::Zero(3, 2), basis),
                    std::invalid_argument);
  }
}

TEST_CASE("drop_column") {
  sir_basis basis;
  basis.b.resize(2, 3);
  basis.b << 1, 0, 0, 0, 0, 1;
  basis.eigenvalues = Eigen::VectorXd::Ones(3);

  SUBCASE("keeps nonzero rows and shrinks the width") {
    const sir_basis out = drop_column(basis, 2);
    CHECK(out.k() == 1);  // second row vanished
    CHECK(out.b.cols() == 2);
    CHECK(out.b(0, 0) == 1.0);
  }
  SUBCASE("dropping an inert column changes nothing in the projection") {
    rng gen(58);
    Eigen::MatrixXd x(10, 3);
    for (Eigen::Index i = 0; i < 10; ++i)
      for (Eigen::Index c = 0; c < 3; ++c) x(i, c) = gen.normal();
    sir_basis partial;
    partial.b.resize(1, 3);
    partial.b << 0.6, 0.0, -0.8;  // column 1 inert
    partial.eigenvalues = Eigen::VectorXd::Ones(3);
    const sir_basis reduced = drop_column(partial, 1);
    Eigen::MatrixXd x_rest(10, 2);
    x_rest.col(0) = x.col(0);
    x_rest.col(1) = x.col(2);
    CHECK((project(x_rest, reduced) - project(x, partial)).cwiseAbs().maxCoeff() <
          1e-12);
  }
  SUBCASE("a basis whose rows all vanish is an error") {
    sir_basis lone;
    lone.b.resize(1, 3);
    lone.b << 0, 1, 0;
    lone.eigenvalues = Eigen::VectorXd::Ones(3);
    CHECK_THROWS_AS(drop_column(lone, 1), numeric_error);
  }
  SUBCASE("out-of-range index") {
    CHECK_THROWS_AS(drop_column(basis, 3), std::invalid_argument);
  }
}
