#include "npsig/selection.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "npsig/errors.hpp"

namespace npsig {

Eigen::Index by_threshold(const std::vector<double>& pvalues, double alpha) {
  const std::size_t d = pvalues.size();
  if (d == 0) throw std::invalid_argument("need at least one p-value");
  for (double p : pvalues)
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("p-value outside [0,1]");

  std::vector<double> sorted(pvalues);
  std::sort(sorted.begin(), sorted.end());
  double harmonic = 0.0;
  for (std::size_t l = 1; l <= d; ++l) harmonic += 1.0 / static_cast<double>(l);

  Eigen::Index k = 0;
  for (std::size_t j = 1; j <= d; ++j) {
    const double cutoff = static_cast<double>(j) * alpha /
                          (static_cast<double>(d) * harmonic);
    if (sorted[j - 1] <= cutoff) k = static_cast<Eigen::Index>(j);
  }
  return k;
}

namespace {

sir_basis identity_basis(Eigen::Index d) {
  sir_basis basis;
  basis.b = Eigen::MatrixXd::Identity(d, d);
  basis.eigenvalues = Eigen::VectorXd::Ones(d);
  return basis;
}

}  // namespace

test_result test_variable(const dataset& ds,
                          const std::vector<Eigen::Index>& survivors,
                          const sir_basis& basis, std::size_t pos,
                          const test_options& opt) {
  if (pos >= survivors.size())
    throw std::invalid_argument("survivor position out of range");
  const Eigen::Index j = survivors[pos];
  if (survivors.size() == 1) return marginal_test(ds, j, opt);
  if (basis.b.cols() != static_cast<Eigen::Index>(survivors.size()))
    throw std::invalid_argument("basis width must match the survivor count");

  sir_basis reduced;
  try {
    reduced = drop_column(basis, static_cast<Eigen::Index>(pos));
  } catch (const numeric_error&) {
    return marginal_test(ds, j, opt);
  }

  Eigen::MatrixXd x_rest(ds.n(), static_cast<Eigen::Index>(survivors.size()) - 1);
  Eigen::Index c = 0;
  for (std::size_t i = 0; i < survivors.size(); ++i) {
    if (i == pos) continue;
    x_rest.col(c++) = ds.x.col(survivors[i]);
  }
  return test_with_adjustment(project(x_rest, reduced), ds.x.col(j), ds.y, opt);
}

selection_trace backward_eliminate(const dataset& ds, const selection_config& cfg) {
  if (!(cfg.alpha >= 0.0 && cfg.alpha <= 1.0))
    throw std::invalid_argument("alpha must lie in [0,1]");

  selection_trace trace;
  std::vector<Eigen::Index> survivors(static_cast<std::size_t>(ds.dim()));
  std::iota(survivors.begin(), survivors.end(), Eigen::Index{0});

  if (cfg.screening) {
    trace.screened = true;
    trace.screening = screen(ds, cfg.test, cfg.screen_threshold);
    survivors = trace.screening.kept;
  }

  sir_basis basis;
  bool marginal_mode = false;
  if (survivors.size() >= 2) {
    if (cfg.use_sir) {
      basis = sir_fit(subset_columns(ds, survivors), cfg.sir);
      trace.initial_basis = basis;
    } else {
      basis = identity_basis(static_cast<Eigen::Index>(survivors.size()));
    }
  }

  while (!survivors.empty()) {
    round_record round;
    round.survivors = survivors;
    round.marginal_fallback = marginal_mode || survivors.size() == 1;

    const std::size_t m = survivors.size();
    std::vector<double> pvals(m);
    for (std::size_t i = 0; i < m; ++i) {
      const test_result r = marginal_mode
                                ? marginal_test(ds, survivors[i], cfg.test)
                                : test_variable(ds, survivors, basis, i, cfg.test);
      pvals[i] = r.p_value;
    }
    round.p_values = Eigen::Map<const Eigen::VectorXd>(pvals.data(),
                                                       static_cast<Eigen::Index>(m));
    round.by_k = by_threshold(pvals, cfg.alpha);

    if (round.by_k == static_cast<Eigen::Index>(m)) {
      trace.rounds.push_back(std::move(round));
      trace.selected = survivors;
      return trace;
    }

    // Drop the largest p-value; equal values resolve to the larger column
    // index, which the >= scan over ascending survivors produces.
    std::size_t drop = 0;
    for (std::size_t i = 1; i < m; ++i)
      if (pvals[i] >= pvals[drop]) drop = i;
    round.dropped = survivors[drop];
    trace.rounds.push_back(std::move(round));

    if (!marginal_mode && m > 2) {
      try {
        basis = drop_column(basis, static_cast<Eigen::Index>(drop));
      } catch (const numeric_error&) {
        marginal_mode = true;
        trace.notes.push_back("basis degenerated after dropping column " +
                              ds.names[static_cast<std::size_t>(survivors[drop])] +
                              "; later rounds use marginal tests");
      }
    }
    survivors.erase(survivors.begin() + static_cast<std::ptrdiff_t>(drop));
  }

  trace.selected = survivors;  // empty: even the last variable was dropped
  return trace;
}

}  // namespace npsig
