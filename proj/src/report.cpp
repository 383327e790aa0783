#include "npsig/report.hpp"

#include <cmath>
#include <sstream>

namespace npsig {

using nlohmann::json;

namespace {

json finite_or_string(double v) {
  // JSON has no infinity; the degenerate z = +/-inf cases become strings.
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

json names_of(const dataset& ds, const std::vector<Eigen::Index>& cols) {
  json arr = json::array();
  for (Eigen::Index c : cols) arr.push_back(ds.names[static_cast<std::size_t>(c)]);
  return arr;
}

}  // namespace

json report_envelope(const std::string& command, const json& config) {
  return json{{"schema", kSchema},
              {"version", kVersion},
              {"command", command},
              {"config", config}};
}

json to_json(const test_result& r, const std::vector<std::string>& adjustment_names) {
  json h = json::array();
  for (Eigen::Index i = 0; i < r.h.lambdas.size(); ++i) h.push_back(r.h.lambdas(i));
  json out{{"stat", r.stat},
           {"mst", r.mst},
           {"mse", r.mse},
           {"tau_sq", r.tau_sq},
           {"z", finite_or_string(r.z)},
           {"p_value", r.p_value},
           {"n", r.n},
           {"p", r.p},
           {"variance_constant", r.c_p},
           {"bandwidth", h},
           {"fallbacks", r.fallbacks},
           {"adjustment", adjustment_names}};
  if (!r.notes.empty()) out["notes"] = r.notes;
  return out;
}

json to_json(const screen_report& r, const dataset& ds) {
  json pv = json::object();
  for (Eigen::Index j = 0; j < r.p_values.size(); ++j)
    pv[ds.names[static_cast<std::size_t>(j)]] = r.p_values(j);
  return json{{"p_values", pv},
              {"kept", names_of(ds, r.kept)},
              {"threshold", r.threshold}};
}

json to_json(const sir_basis& b, const std::vector<std::string>& names) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < b.b.rows(); ++r) {
    json row = json::object();
    for (Eigen::Index c = 0; c < b.b.cols(); ++c)
      row[names[static_cast<std::size_t>(c)]] = b.b(r, c);
    rows.push_back(row);
  }
  json eig = json::array();
  for (Eigen::Index i = 0; i < b.eigenvalues.size(); ++i)
    eig.push_back(b.eigenvalues(i));
  return json{{"k", b.k()}, {"directions", rows}, {"eigenvalues", eig}};
}

json to_json(const selection_trace& t, const dataset& ds) {
  json rounds = json::array();
  for (const auto& round : t.rounds) {
    json pv = json::object();
    for (std::size_t i = 0; i < round.survivors.size(); ++i)
      pv[ds.names[static_cast<std::size_t>(round.survivors[i])]] =
          round.p_values(static_cast<Eigen::Index>(i));
    json rec{{"survivors", names_of(ds, round.survivors)},
             {"p_values", pv},
             {"by_k", round.by_k},
             {"marginal_fallback", round.marginal_fallback}};
    if (round.dropped)
      rec["dropped"] = ds.names[static_cast<std::size_t>(*round.dropped)];
    else
      rec["dropped"] = nullptr;
    rounds.push_back(rec);
  }
  json out{{"rounds", rounds}, {"selected", names_of(ds, t.selected)}};
  if (t.screened) out["screening"] = to_json(t.screening, ds);
  if (t.initial_basis) out["sir"] = to_json(*t.initial_basis, ds.names);
  if (!t.notes.empty()) out["notes"] = t.notes;
  return out;
}

json to_json(const rejection_report& r) {
  return json{{"scenario", r.scenario}, {"runs", r.runs},
              {"level", r.level},       {"rate", r.rate},
              {"mcse", r.mcse},         {"mean_z", r.mean_z},
              {"seed", r.seed},         {"rng", r.rng_name}};
}

json to_json(const selection_report& r) {
  return json{{"scenario", r.scenario},
              {"runs", r.runs},
              {"mean_correct_exclusions", r.mean_correct},
              {"mean_incorrect_exclusions", r.mean_incorrect},
              {"mcse_correct", r.mcse_correct},
              {"mcse_incorrect", r.mcse_incorrect},
              {"seed", r.seed},
              {"rng", r.rng_name}};
}

namespace {

void flatten_into(const json& node, const std::string& prefix,
                  std::ostringstream& out) {
  if (node.is_object()) {
    for (auto it = node.begin(); it != node.end(); ++it)
      flatten_into(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(),
                   out);
  } else if (node.is_array()) {
    for (std::size_t i = 0; i < node.size(); ++i)
      flatten_into(node[i], prefix + "[" + std::to_string(i) + "]", out);
  } else {
    out << prefix << "," << node.dump() << "\n";
  }
}

}  // namespace

std::string flatten_csv(const json& report) {
  std::ostringstream out;
  out << "key,value\n";
  flatten_into(report, "", out);
  return out.str();
}

}  // namespace npsig
