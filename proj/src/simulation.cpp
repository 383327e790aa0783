#include "npsig/simulation.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

#include "npsig/errors.hpp"

namespace npsig {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct scenario_entry {
  const char* name;
  scenario_id id;
  int default_n;
};

constexpr scenario_entry kScenarios[] = {
    {"table1", scenario_id::table1, 100},
    {"table2-f0", scenario_id::table2_f0, 100},
    {"table2-f1", scenario_id::table2_f1, 100},
    {"table2-f2", scenario_id::table2_f2, 100},
    {"table2-f3", scenario_id::table2_f3, 100},
    {"table2-f4", scenario_id::table2_f4, 100},
    {"table2-f5", scenario_id::table2_f5, 100},
    {"table2-f6", scenario_id::table2_f6, 100},
    {"table3-nonadd", scenario_id::table3_nonadd, 200},
    {"table3-hetero", scenario_id::table3_hetero, 200},
    {"table4-I", scenario_id::table4_identity, 110},
    {"table4-AR", scenario_id::table4_ar, 110},
    {"table5-g1", scenario_id::table5_g1, 40},
    {"table5-g2", scenario_id::table5_g2, 40},
};

Eigen::MatrixXd draw_iid(rng& gen, Eigen::Index n, Eigen::Index d,
                         const std::function<double(rng&)>& draw) {
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index c = 0; c < d; ++c) x(i, c) = draw(gen);
  return x;
}

Eigen::VectorXd draw_normals(rng& gen, Eigen::Index n, double sd) {
  Eigen::VectorXd e(n);
  for (Eigen::Index i = 0; i < n; ++i) e(i) = sd * gen.normal();
  return e;
}

Eigen::MatrixXd ar_covariance(Eigen::Index d, double rho) {
  Eigen::MatrixXd cov(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      cov(i, j) = std::pow(rho, std::abs(static_cast<double>(i - j)));
  return cov;
}

void name_columns(dataset& ds) {
  ds.response_name = "y";
  ds.names.clear();
  for (Eigen::Index c = 0; c < ds.dim(); ++c)
    ds.names.push_back("x" + std::to_string(c + 1));
}

int sine_case(scenario_id id) {
  switch (id) {
    case scenario_id::table2_f0: return 0;
    case scenario_id::table2_f1: return 1;
    case scenario_id::table2_f2: return 2;
    case scenario_id::table2_f3: return 3;
    case scenario_id::table2_f4: return 4;
    case scenario_id::table2_f5: return 5;
    case scenario_id::table2_f6: return 6;
    default: return -1;
  }
}

double table2_shift(int j, double x) {
  switch (j) {
    case 0: return 0.0;
    case 1: return 0.5 * x;
    case 2: return x;
    case 3: return 2.0 * x;
    case 4: return std::sin(2.0 * kPi * x);
    case 5: return std::sin(kPi * x);
    default: return std::sin(2.0 / 3.0 * kPi * x);
  }
}

}  // namespace

scenario_id parse_scenario(const std::string& name) {
  for (const auto& e : kScenarios)
    if (name == e.name) return e.id;
  throw std::invalid_argument("unknown scenario id: " + name);
}

std::string scenario_name(scenario_id id) {
  for (const auto& e : kScenarios)
    if (id == e.id) return e.name;
  return "?";
}

int scenario_default_n(scenario_id id) {
  for (const auto& e : kScenarios)
    if (id == e.id) return e.default_n;
  return 100;
}

bool is_selection_scenario(scenario_id id) {
  switch (id) {
    case scenario_id::table4_identity:
    case scenario_id::table4_ar:
    case scenario_id::table5_g1:
    case scenario_id::table5_g2:
      return true;
    default:
      return false;
  }
}

Eigen::MatrixXd mvn_sample(rng& gen, const Eigen::VectorXd& mean,
                           const Eigen::MatrixXd& cov, Eigen::Index n) {
  const Eigen::Index d = mean.size();
  if (cov.rows() != d || cov.cols() != d)
    throw std::invalid_argument("covariance must be d x d");
  if (!cov.isApprox(cov.transpose(), 1e-12))
    throw std::invalid_argument("covariance must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("covariance is not positive definite");
  const Eigen::MatrixXd L = llt.matrixL();

  Eigen::MatrixXd x(n, d);
  Eigen::VectorXd z(d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c < d; ++c) z(c) = gen.normal();
    x.row(i) = (mean + L * z).transpose();
  }
  return x;
}

generated_data generate(const scenario_spec& spec, rng& gen) {
  const Eigen::Index n = spec.n > 0 ? spec.n : scenario_default_n(spec.id);
  generated_data out;
  dataset& ds = out.data;

  switch (spec.id) {
    case scenario_id::table1: {
      ds.x = draw_iid(gen, n, 2, [](rng& g) { return g.uniform(); });
      const Eigen::VectorXd e = draw_normals(gen, n, 3.0);
      ds.y = ds.x.col(0) + spec.theta * ds.x.col(1) +
             spec.gamma * ds.x.col(0).cwiseProduct(ds.x.col(1)) + e;
      out.tested = 1;
      out.relevant = {0};
      if (spec.theta != 0.0 || spec.gamma != 0.0) out.relevant.push_back(1);
      break;
    }
    case scenario_id::table2_f0:
    case scenario_id::table2_f1:
    case scenario_id::table2_f2:
    case scenario_id::table2_f3:
    case scenario_id::table2_f4:
    case scenario_id::table2_f5:
    case scenario_id::table2_f6: {
      const int j = sine_case(spec.id);
      ds.x = draw_iid(gen, n, 2, [](rng& g) { return g.normal(); });
      const Eigen::VectorXd e = draw_normals(gen, n, 2.0);  // variance 4
      ds.y.resize(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double x1 = ds.x(i, 0);
        ds.y(i) = -x1 + x1 * x1 * x1 + table2_shift(j, ds.x(i, 1)) + e(i);
      }
      out.tested = 1;
      out.relevant = j == 0 ? std::vector<Eigen::Index>{0}
                            : std::vector<Eigen::Index>{0, 1};
      break;
    }
    case scenario_id::table3_nonadd: {
      ds.x = draw_iid(gen, n, 3, [](rng& g) { return g.uniform(0.5, 2.5); });
      // Error sd 0.1: the variance-0.1 reading flattens the power trend far
      // below the tabulated values, sd 0.1 reproduces them.
      const Eigen::VectorXd e = draw_normals(gen, n, 0.1);
      ds.y.resize(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double x1 = ds.x(i, 0), x2 = ds.x(i, 1), x3 = ds.x(i, 2);
        const double expo = 1.0 + spec.theta * x3;
        ds.y(i) = std::pow(x1, x2) * expo + std::pow(x2, expo) / x2 + e(i);
      }
      out.tested = 2;
      out.relevant = spec.theta == 0.0 ? std::vector<Eigen::Index>{0, 1}
                                       : std::vector<Eigen::Index>{0, 1, 2};
      break;
    }
    case scenario_id::table3_hetero: {
      ds.x = draw_iid(gen, n, 2, [](rng& g) { return g.normal(); });
      const Eigen::VectorXd e = draw_normals(gen, n, std::sqrt(0.5));
      ds.y.resize(n);
      for (Eigen::Index i = 0; i < n; ++i)
        ds.y(i) = ds.x(i, 0) * ds.x(i, 0) +
                  spec.theta * std::cos(kPi * ds.x(i, 1)) + ds.x(i, 1) * e(i);
      out.tested = 1;
      out.relevant = spec.theta == 0.0 ? std::vector<Eigen::Index>{0}
                                       : std::vector<Eigen::Index>{0, 1};
      break;
    }
    case scenario_id::table4_identity:
    case scenario_id::table4_ar: {
      const Eigen::Index d = 25;
      Eigen::VectorXd beta = Eigen::VectorXd::Zero(d);
      beta(0) = 3.0;
      beta(1) = 1.5;
      beta(4) = 2.0;
      beta(6) = 2.0;
      beta(16) = 3.0;
      const Eigen::MatrixXd cov = spec.id == scenario_id::table4_identity
                                      ? Eigen::MatrixXd::Identity(d, d)
                                      : ar_covariance(d, 0.5);
      ds.x = mvn_sample(gen, Eigen::VectorXd::Zero(d), cov, n);
      const Eigen::VectorXd e = draw_normals(gen, n, 3.0);
      ds.y = ds.x * beta + e;
      out.relevant = {0, 1, 4, 6, 16};
      break;
    }
    case scenario_id::table5_g1:
    case scenario_id::table5_g2: {
      const Eigen::Index d = 8;
      ds.x = mvn_sample(gen, Eigen::VectorXd::Zero(d), ar_covariance(d, 0.5), n);
      const Eigen::VectorXd e = draw_normals(gen, n, 0.3);
      ds.y.resize(n);
      if (spec.id == scenario_id::table5_g1) {
        for (Eigen::Index i = 0; i < n; ++i)
          ds.y(i) = std::sin(kPi * ds.x(i, 0)) + e(i);
        out.relevant = {0};
      } else {
        for (Eigen::Index i = 0; i < n; ++i) {
          const double a = std::abs(ds.x(i, 4));
          ds.y(i) = std::sin(0.75 * kPi * ds.x(i, 0)) -
                    3.0 * normal_sf(a * a * a) + e(i);
        }
        out.relevant = {0, 4};
      }
      break;
    }
  }

  name_columns(ds);
  return out;
}

void parallel_for(int total, int threads, const std::function<void(int)>& fn) {
  if (total <= 0) return;
  const int workers = std::max(1, std::min(threads, total));
  if (workers == 1) {
    for (int i = 0; i < total; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= total) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

rejection_report run_rejection_study(const scenario_spec& spec, int runs,
                                     double level, const test_options& opt,
                                     int threads) {
  if (runs < 1) throw std::invalid_argument("need at least one run");
  if (is_selection_scenario(spec.id))
    throw std::invalid_argument("scenario " + scenario_name(spec.id) +
                                " has no designated tested covariate");

  std::vector<unsigned char> rejected(static_cast<std::size_t>(runs), 0);
  std::vector<double> zs(static_cast<std::size_t>(runs), 0.0);
  parallel_for(runs, threads, [&](int r) {
    rng gen(rng::child_seed(spec.seed, static_cast<std::uint64_t>(r)));
    const generated_data g = generate(spec, gen);
    const column_split split = split_columns(g.data.dim(), g.tested);
    const test_result res = anova_test(g.data, split, opt);
    rejected[static_cast<std::size_t>(r)] = res.p_value < level ? 1 : 0;
    zs[static_cast<std::size_t>(r)] = res.z;
  });

  rejection_report report;
  report.scenario = scenario_name(spec.id);
  report.runs = runs;
  report.level = level;
  report.seed = spec.seed;
  report.rng_name = std::string(rng::identity);
  long count = 0;
  for (auto b : rejected) count += b;
  report.rate = static_cast<double>(count) / runs;
  report.mcse = std::sqrt(report.rate * (1.0 - report.rate) / runs);
  double zsum = 0.0;
  for (double z : zs) zsum += z;
  report.mean_z = zsum / runs;
  return report;
}

exclusion_counts count_exclusions(const std::vector<Eigen::Index>& selected,
                                  const std::vector<Eigen::Index>& relevant,
                                  Eigen::Index d) {
  std::vector<bool> kept(static_cast<std::size_t>(d), false);
  for (Eigen::Index j : selected) kept[static_cast<std::size_t>(j)] = true;
  std::vector<bool> truth(static_cast<std::size_t>(d), false);
  for (Eigen::Index j : relevant) truth[static_cast<std::size_t>(j)] = true;

  exclusion_counts counts;
  for (Eigen::Index j = 0; j < d; ++j) {
    if (kept[static_cast<std::size_t>(j)]) continue;
    if (truth[static_cast<std::size_t>(j)]) ++counts.incorrect;
    else ++counts.correct;
  }
  return counts;
}

selection_report run_selection_study(const scenario_spec& spec, int runs,
                                     const selection_config& cfg, int threads) {
  if (runs < 1) throw std::invalid_argument("need at least one run");

  std::vector<double> correct(static_cast<std::size_t>(runs), 0.0);
  std::vector<double> incorrect(static_cast<std::size_t>(runs), 0.0);
  parallel_for(runs, threads, [&](int r) {
    rng gen(rng::child_seed(spec.seed, static_cast<std::uint64_t>(r)));
    const generated_data g = generate(spec, gen);
    const selection_trace trace = backward_eliminate(g.data, cfg);
    const exclusion_counts counts =
        count_exclusions(trace.selected, g.relevant, g.data.dim());
    correct[static_cast<std::size_t>(r)] = counts.correct;
    incorrect[static_cast<std::size_t>(r)] = counts.incorrect;
  });

  auto mean_of = [runs](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / runs;
  };
  auto mcse_of = [runs](const std::vector<double>& v, double mean) {
    if (runs < 2) return 0.0;
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return std::sqrt(s / (static_cast<double>(runs) - 1.0) / runs);
  };

  selection_report report;
  report.scenario = scenario_name(spec.id);
  report.runs = runs;
  report.seed = spec.seed;
  report.rng_name = std::string(rng::identity);
  report.mean_correct = mean_of(correct);
  report.mean_incorrect = mean_of(incorrect);
  report.mcse_correct = mcse_of(correct, report.mean_correct);
  report.mcse_incorrect = mcse_of(incorrect, report.mean_incorrect);
  return report;
}

}  // namespace npsig
