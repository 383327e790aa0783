// Command-line front end: single-variable significance tests, marginal
// screening, backward-elimination variable selection, SIR inspection and
// seeded simulation studies, all reporting as JSON (or flattened CSV).

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <thread>

#include "npsig/dataset.hpp"
#include "npsig/errors.hpp"
#include "npsig/report.hpp"
#include "npsig/screening.hpp"
#include "npsig/selection.hpp"
#include "npsig/simulation.hpp"
#include "npsig/sir.hpp"
#include "npsig/window_anova.hpp"

namespace {

using nlohmann::json;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

struct cli_options {
  std::string data;
  std::string response;
  std::string test_var;
  int p = 9;
  double alpha = 0.06;
  double screen_threshold = 0.5;
  bool no_screen = false;
  bool no_sir = false;
  int slices = 10;
  std::string slices_sweep;
  std::string estimator = "nw";
  std::string bandwidth = "auto";
  std::string scenario;
  int runs = 500;
  std::uint64_t seed = 0;
  int n_override = 0;
  double theta = 0.0;
  double gamma = 0.0;
  double level = 0.05;
  int threads = 0;
  std::string out;
  std::string format = "json";
};

int default_threads() {
  if (const char* env = std::getenv("NPSIG_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void validate_common(const cli_options& o) {
  if (o.p % 2 == 0 || o.p < 3)
    throw CLI::ValidationError("--p", "cell size must be odd and >= 3");
  if (o.alpha < 0.0 || o.alpha > 1.0)
    throw CLI::ValidationError("--alpha", "must lie in [0,1]");
  if (o.screen_threshold <= 0.0 || o.screen_threshold > 1.0)
    throw CLI::ValidationError("--screen-threshold", "must lie in (0,1]");
  if (o.estimator != "nw" && o.estimator != "mi")
    throw CLI::ValidationError("--estimator", "must be 'nw' or 'mi'");
  if (o.slices < 2)
    throw CLI::ValidationError("--slices", "need at least two slices");
  if (o.level <= 0.0 || o.level > 1.0)
    throw CLI::ValidationError("--level", "must lie in (0,1]");
}

std::optional<npsig::bandwidth> parse_bandwidth(const std::string& s) {
  if (s == "auto") return std::nullopt;
  std::vector<double> lambdas;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      lambdas.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw CLI::ValidationError("--bandwidth", "expected 'auto' or a comma list");
    }
  }
  if (lambdas.empty())
    throw CLI::ValidationError("--bandwidth", "expected 'auto' or a comma list");
  npsig::bandwidth h;
  h.lambdas = Eigen::Map<Eigen::VectorXd>(lambdas.data(),
                                          static_cast<Eigen::Index>(lambdas.size()));
  return h;
}

std::pair<int, int> parse_sweep(const std::string& s) {
  const auto pos = s.find("..");
  if (pos == std::string::npos)
    throw CLI::ValidationError("--slices-sweep", "expected lo..hi");
  try {
    const int lo = std::stoi(s.substr(0, pos));
    const int hi = std::stoi(s.substr(pos + 2));
    if (lo < 2 || hi < lo)
      throw CLI::ValidationError("--slices-sweep", "need 2 <= lo <= hi");
    return {lo, hi};
  } catch (const CLI::ValidationError&) {
    throw;
  } catch (const std::exception&) {
    throw CLI::ValidationError("--slices-sweep", "expected lo..hi");
  }
}

npsig::test_options make_test_options(const cli_options& o) {
  npsig::test_options opt;
  opt.p = o.p;
  opt.estimator = o.estimator == "mi" ? npsig::estimator_kind::marginal_integration
                                      : npsig::estimator_kind::nadaraya_watson;
  opt.h = parse_bandwidth(o.bandwidth);
  return opt;
}

json config_json(const cli_options& o, const std::vector<std::string>& keys) {
  json cfg;
  for (const auto& k : keys) {
    if (k == "data") cfg["data"] = o.data;
    else if (k == "response") cfg["response"] = o.response;
    else if (k == "test_var") cfg["test_var"] = o.test_var;
    else if (k == "p") cfg["p"] = o.p;
    else if (k == "alpha") cfg["alpha"] = o.alpha;
    else if (k == "screen") cfg["screen"] = !o.no_screen;
    else if (k == "screen_threshold") cfg["screen_threshold"] = o.screen_threshold;
    else if (k == "sir") cfg["sir"] = !o.no_sir;
    else if (k == "slices") cfg["slices"] = o.slices;
    else if (k == "estimator") cfg["estimator"] = o.estimator;
    else if (k == "bandwidth") cfg["bandwidth"] = o.bandwidth;
    else if (k == "scenario") cfg["scenario"] = o.scenario;
    else if (k == "runs") cfg["runs"] = o.runs;
    else if (k == "seed") cfg["seed"] = o.seed;
    else if (k == "n") cfg["n"] = o.n_override;
    else if (k == "theta") cfg["theta"] = o.theta;
    else if (k == "gamma") cfg["gamma"] = o.gamma;
    else if (k == "level") cfg["level"] = o.level;
    else if (k == "threads") cfg["threads"] = o.threads;
  }
  return cfg;
}

void emit(const cli_options& o, const json& report) {
  std::string text = o.format == "csv" ? npsig::flatten_csv(report)
                                       : report.dump(2) + "\n";
  if (o.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(o.out);
    if (!f) throw npsig::data_error("cannot open output file: " + o.out);
    f << text;
  }
}

Eigen::Index column_index(const npsig::dataset& ds, const std::string& name) {
  for (std::size_t i = 0; i < ds.names.size(); ++i)
    if (ds.names[i] == name) return static_cast<Eigen::Index>(i);
  throw npsig::data_error("covariate '" + name + "' not found");
}

void require_varying_response(const npsig::dataset& ds) {
  if ((ds.y.array() == ds.y(0)).all())
    throw npsig::numeric_error("response column '" + ds.response_name +
                               "' is constant");
}

int run_test(const cli_options& o) {
  validate_common(o);
  const npsig::dataset ds = npsig::load_csv(o.data, o.response);
  require_varying_response(ds);
  const Eigen::Index j = column_index(ds, o.test_var);
  const npsig::test_options opt = make_test_options(o);

  npsig::test_result res;
  std::vector<std::string> adjustment;
  if (o.no_sir || ds.dim() == 1) {
    const npsig::column_split split = npsig::split_columns(ds.dim(), j);
    res = npsig::anova_test(ds, split, opt);
    for (Eigen::Index c : split.remaining)
      adjustment.push_back(ds.names[static_cast<std::size_t>(c)]);
  } else {
    npsig::sir_config sc;
    sc.num_slices = o.slices;
    const npsig::sir_basis basis = npsig::sir_fit(ds, sc);
    std::vector<Eigen::Index> all(static_cast<std::size_t>(ds.dim()));
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<Eigen::Index>(i);
    res = npsig::test_variable(ds, all, basis, static_cast<std::size_t>(j), opt);
    for (Eigen::Index c = 0; c < ds.dim(); ++c)
      if (c != j) adjustment.push_back(ds.names[static_cast<std::size_t>(c)]);
  }

  json report = npsig::report_envelope(
      "test", config_json(o, {"data", "response", "test_var", "p", "estimator",
                              "bandwidth", "sir", "slices"}));
  report["result"] = npsig::to_json(res, adjustment);
  for (const auto& note : res.notes) std::cerr << "note: " << note << "\n";
  emit(o, report);
  return 0;
}

int run_screen(const cli_options& o) {
  validate_common(o);
  const npsig::dataset ds = npsig::load_csv(o.data, o.response);
  require_varying_response(ds);
  const npsig::screen_report rep =
      npsig::screen(ds, make_test_options(o), o.screen_threshold);
  json report = npsig::report_envelope(
      "screen", config_json(o, {"data", "response", "p", "screen_threshold"}));
  report["result"] = npsig::to_json(rep, ds);
  emit(o, report);
  return 0;
}

npsig::selection_config make_selection_config(const cli_options& o) {
  npsig::selection_config cfg;
  cfg.alpha = o.alpha;
  cfg.test = make_test_options(o);
  cfg.screening = !o.no_screen;
  cfg.screen_threshold = o.screen_threshold;
  cfg.use_sir = !o.no_sir;
  cfg.sir.num_slices = o.slices;
  return cfg;
}

int run_select(const cli_options& o) {
  validate_common(o);
  const npsig::dataset ds = npsig::load_csv(o.data, o.response);
  require_varying_response(ds);
  npsig::selection_config cfg = make_selection_config(o);

  json report = npsig::report_envelope(
      "select",
      config_json(o, {"data", "response", "p", "alpha", "screen",
                      "screen_threshold", "sir", "slices", "estimator",
                      "bandwidth", "threads"}));

  if (o.slices_sweep.empty()) {
    report["result"] = npsig::to_json(npsig::backward_eliminate(ds, cfg), ds);
    emit(o, report);
    return 0;
  }

  const auto [lo, hi] = parse_sweep(o.slices_sweep);
  report["config"]["slices_sweep"] = o.slices_sweep;
  const int count = hi - lo + 1;
  std::vector<std::vector<Eigen::Index>> per_h(static_cast<std::size_t>(count));
  npsig::parallel_for(count, o.threads, [&](int i) {
    npsig::selection_config local = cfg;
    local.sir.num_slices = lo + i;
    per_h[static_cast<std::size_t>(i)] =
        npsig::backward_eliminate(ds, local).selected;
  });

  std::vector<int> frequency(static_cast<std::size_t>(ds.dim()), 0);
  json per_slice = json::array();
  for (int i = 0; i < count; ++i) {
    json names = json::array();
    for (Eigen::Index j : per_h[static_cast<std::size_t>(i)]) {
      ++frequency[static_cast<std::size_t>(j)];
      names.push_back(ds.names[static_cast<std::size_t>(j)]);
    }
    per_slice.push_back(json{{"slices", lo + i}, {"selected", names}});
  }
  json freq = json::object();
  for (Eigen::Index j = 0; j < ds.dim(); ++j)
    freq[ds.names[static_cast<std::size_t>(j)]] =
        frequency[static_cast<std::size_t>(j)];
  report["result"] = json{{"settings", count},
                          {"selection_frequency", freq},
                          {"per_slice", per_slice}};
  emit(o, report);
  return 0;
}

int run_sir(const cli_options& o) {
  validate_common(o);
  const npsig::dataset ds = npsig::load_csv(o.data, o.response);
  require_varying_response(ds);
  npsig::sir_config sc;
  sc.num_slices = o.slices;
  const npsig::sir_basis basis = npsig::sir_fit(ds, sc);
  json report = npsig::report_envelope(
      "sir", config_json(o, {"data", "response", "slices"}));
  report["result"] = npsig::to_json(basis, ds.names);
  emit(o, report);
  return 0;
}

int run_simulate(const cli_options& o) {
  validate_common(o);
  if (o.runs < 1) throw CLI::ValidationError("--runs", "need at least one run");
  npsig::scenario_spec spec;
  spec.id = npsig::parse_scenario(o.scenario);
  spec.n = o.n_override;
  spec.theta = o.theta;
  spec.gamma = o.gamma;
  spec.seed = o.seed;

  json report = npsig::report_envelope(
      "simulate",
      config_json(o, {"scenario", "runs", "seed", "n", "p", "theta", "gamma",
                      "level", "alpha", "estimator", "bandwidth", "screen",
                      "screen_threshold", "sir", "slices", "threads"}));

  if (npsig::is_selection_scenario(spec.id)) {
    const npsig::selection_report rep = npsig::run_selection_study(
        spec, o.runs, make_selection_config(o), o.threads);
    report["result"] = npsig::to_json(rep);
  } else {
    const npsig::rejection_report rep = npsig::run_rejection_study(
        spec, o.runs, o.level, make_test_options(o), o.threads);
    report["result"] = npsig::to_json(rep);
  }
  emit(o, report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ANOVA-type nonparametric significance testing and variable selection"};
  app.require_subcommand(1);
  cli_options o;
  o.threads = default_threads();

  auto add_io = [&o](CLI::App* cmd) {
    cmd->add_option("--out", o.out, "write the report here instead of stdout");
    cmd->add_option("--format", o.format, "json (default) or csv")
        ->check(CLI::IsMember({"json", "csv"}));
  };
  auto add_data = [&o](CLI::App* cmd) {
    cmd->add_option("--data", o.data, "input CSV with a header row")->required();
    cmd->add_option("--response", o.response, "response column name")->required();
  };
  auto add_test_opts = [&o](CLI::App* cmd) {
    cmd->add_option("--p", o.p, "ANOVA cell size (odd, default 9)");
    cmd->add_option("--estimator", o.estimator, "nw (default) or mi");
    cmd->add_option("--bandwidth", o.bandwidth,
                    "'auto' (leave-one-out CV) or comma-separated lambdas");
  };

  CLI::App* t = app.add_subcommand("test", "test one covariate's significance");
  add_data(t);
  t->add_option("--test-var", o.test_var, "covariate to test")->required();
  add_test_opts(t);
  t->add_flag("--no-sir", o.no_sir, "adjust for raw covariates, no reduction");
  t->add_option("--slices", o.slices, "SIR slice count (default 10)");
  add_io(t);

  CLI::App* sc = app.add_subcommand("screen", "marginal screening of all covariates");
  add_data(sc);
  sc->add_option("--p", o.p, "ANOVA cell size (odd, default 9)");
  sc->add_option("--screen-threshold", o.screen_threshold,
                 "keep p-values below this (default 0.5)");
  add_io(sc);

  CLI::App* sel = app.add_subcommand("select", "backward-elimination selection");
  add_data(sel);
  add_test_opts(sel);
  sel->add_option("--alpha", o.alpha, "step-up level (default 0.06)");
  sel->add_flag("--no-screen", o.no_screen, "skip marginal screening");
  sel->add_option("--screen-threshold", o.screen_threshold,
                  "screening threshold (default 0.5)");
  sel->add_flag("--no-sir", o.no_sir, "skip SIR reduction");
  sel->add_option("--slices", o.slices, "SIR slice count (default 10)");
  sel->add_option("--slices-sweep", o.slices_sweep,
                  "lo..hi: rerun selection for each slice count");
  sel->add_option("--threads", o.threads, "worker threads for the sweep");
  add_io(sel);

  CLI::App* si = app.add_subcommand("sir", "inspect the SIR basis");
  add_data(si);
  si->add_option("--slices", o.slices, "slice count (default 10)");
  add_io(si);

  CLI::App* sim = app.add_subcommand("simulate", "seeded Monte Carlo studies");
  sim->add_option("--scenario", o.scenario, "scenario id, e.g. table2-f0")
      ->required();
  sim->add_option("--runs", o.runs, "replicates (default 500)");
  sim->add_option("--seed", o.seed, "master seed")->required();
  sim->add_option("--n", o.n_override, "sample size override");
  sim->add_option("--theta", o.theta, "scenario parameter theta");
  sim->add_option("--gamma", o.gamma, "scenario parameter gamma");
  sim->add_option("--level", o.level, "rejection level (default 0.05)");
  sim->add_option("--alpha", o.alpha, "selection step-up level (default 0.06)");
  add_test_opts(sim);
  sim->add_flag("--no-screen", o.no_screen, "skip screening in selection studies");
  sim->add_flag("--no-sir", o.no_sir, "skip SIR in selection studies");
  sim->add_option("--slices", o.slices, "SIR slice count (default 10)");
  sim->add_option("--screen-threshold", o.screen_threshold,
                  "screening threshold (default 0.5)");
  sim->add_option("--threads", o.threads, "worker threads (default: all cores)");
  add_io(sim);

  try {
    app.parse(argc, argv);
    if (t->parsed()) return run_test(o);
    if (sc->parsed()) return run_screen(o);
    if (sel->parsed()) return run_select(o);
    if (si->parsed()) return run_sir(o);
    if (sim->parsed()) return run_simulate(o);
    return kExitUsage;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const npsig::data_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const npsig::numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}
