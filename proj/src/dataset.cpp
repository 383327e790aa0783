#include "npsig/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "npsig/errors.hpp"

namespace npsig {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_cell(const std::string& raw, std::size_t row, const std::string& column) {
  const std::string s = trim(raw);
  double value = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || s.empty())
    throw data_error("row " + std::to_string(row) + ", column '" + column +
                     "': cannot parse '" + trim(raw) + "' as a number");
  if (!std::isfinite(value))
    throw data_error("row " + std::to_string(row) + ", column '" + column +
                     "': non-finite value");
  return value;
}

}  // namespace

csv_table read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw data_error("empty file: " + path);

  csv_table table;
  for (const auto& raw : split_line(line)) {
    const std::string name = trim(raw);
    if (name.empty()) throw data_error("empty column label in header of " + path);
    table.header.push_back(name);
  }
  {
    std::set<std::string> seen;
    for (const auto& name : table.header)
      if (!seen.insert(name).second)
        throw data_error("duplicate header column '" + name + "' in " + path);
  }

  const std::size_t k = table.header.size();
  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t row_number = 1;  // header row is row 1
  while (std::getline(in, line)) {
    ++row_number;
    if (trim(line).empty()) continue;
    const auto fields = split_line(line);
    if (fields.size() != k)
      throw data_error("row " + std::to_string(row_number) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(k));
    for (std::size_t c = 0; c < k; ++c)
      values.push_back(parse_cell(fields[c], row_number, table.header[c]));
    ++rows;
  }
  if (rows == 0) throw data_error("no data rows in " + path);

  table.cells.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(k));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < k; ++c)
      table.cells(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          values[r * k + c];
  return table;
}

void write_csv(const std::string& path, const csv_table& table) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot open file for writing: " + path);
  for (std::size_t c = 0; c < table.header.size(); ++c)
    out << (c ? "," : "") << table.header[c];
  out << "\n";
  char buf[64];
  for (Eigen::Index r = 0; r < table.cells.rows(); ++r) {
    for (Eigen::Index c = 0; c < table.cells.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", table.cells(r, c));
      out << (c ? "," : "") << buf;
    }
    out << "\n";
  }
  if (!out) throw data_error("write failed: " + path);
}

dataset make_dataset(const csv_table& table, const std::string& response) {
  const auto it = std::find(table.header.begin(), table.header.end(), response);
  if (it == table.header.end())
    throw data_error("response column '" + response + "' not found");
  const Eigen::Index rc = it - table.header.begin();
  if (table.header.size() < 2)
    throw data_error("need at least one covariate besides the response");

  dataset ds;
  ds.response_name = response;
  ds.y = table.cells.col(rc);
  ds.x.resize(table.cells.rows(), table.cells.cols() - 1);
  Eigen::Index out = 0;
  for (Eigen::Index c = 0; c < table.cells.cols(); ++c) {
    if (c == rc) continue;
    ds.x.col(out) = table.cells.col(c);
    ds.names.push_back(table.header[static_cast<std::size_t>(c)]);
    ++out;
  }
  validate(ds);
  return ds;
}

dataset load_csv(const std::string& path, const std::string& response) {
  return make_dataset(read_csv(path), response);
}

dataset subset_columns(const dataset& ds, const std::vector<Eigen::Index>& columns) {
  dataset out;
  out.y = ds.y;
  out.response_name = ds.response_name;
  out.x.resize(ds.x.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] < 0 || columns[i] >= ds.dim())
      throw std::invalid_argument("column index out of range");
    out.x.col(static_cast<Eigen::Index>(i)) = ds.x.col(columns[i]);
    out.names.push_back(ds.names[static_cast<std::size_t>(columns[i])]);
  }
  return out;
}

column_split split_columns(Eigen::Index d, Eigen::Index tested) {
  if (tested < 0 || tested >= d)
    throw std::invalid_argument("tested column index " + std::to_string(tested) +
                                " out of range for d=" + std::to_string(d));
  column_split split;
  split.tested = tested;
  split.remaining.reserve(static_cast<std::size_t>(d) - 1);
  for (Eigen::Index c = 0; c < d; ++c)
    if (c != tested) split.remaining.push_back(c);
  return split;
}

standardization standardize(const Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows();
  if (n < 2) throw numeric_error("standardize needs at least two rows");
  standardization s;
  s.center = x.colwise().mean();
  s.scale.resize(x.cols());
  s.z.resize(n, x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const Eigen::VectorXd centered = x.col(c).array() - s.center(c);
    const double var = centered.squaredNorm() / static_cast<double>(n - 1);
    if (var <= 0.0)
      throw numeric_error("constant column at index " + std::to_string(c));
    s.scale(c) = std::sqrt(var);
    s.z.col(c) = centered / s.scale(c);
  }
  return s;
}

void validate(const dataset& ds) {
  if (ds.y.size() < 1 || ds.x.cols() < 1)
    throw data_error("dataset needs n >= 1 rows and d >= 1 covariates");
  if (ds.y.size() != ds.x.rows())
    throw data_error("response length does not match covariate row count");
  if (static_cast<Eigen::Index>(ds.names.size()) != ds.x.cols())
    throw data_error("covariate label count does not match column count");
  if (!ds.y.allFinite() || !ds.x.allFinite())
    throw data_error("dataset contains non-finite entries");
  std::set<std::string> seen;
  for (const auto& name : ds.names) {
    if (name.empty()) throw data_error("empty covariate label");
    if (!seen.insert(name).second)
      throw data_error("duplicate covariate label '" + name + "'");
  }
}

}  // namespace npsig
