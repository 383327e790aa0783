#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace npsig {

//! A fully numeric table read from disk: header labels plus an n x k cell
//! matrix in file order.
struct csv_table {
  std::vector<std::string> header;
  Eigen::MatrixXd cells;
};

//! Response vector, covariate matrix and covariate labels. Immutable after
//! construction; shared freely across threads.
struct dataset {
  Eigen::VectorXd y;                // length n
  Eigen::MatrixXd x;                // n x d
  std::vector<std::string> names;   // d covariate labels, unique, non-empty
  std::string response_name;

  Eigen::Index n() const { return y.size(); }
  Eigen::Index dim() const { return x.cols(); }
};

//! Partition of the covariate columns into the tested one and the rest.
//! `remaining` preserves the original column order with `tested` removed.
struct column_split {
  Eigen::Index tested;
  std::vector<Eigen::Index> remaining;
};

struct standardization {
  Eigen::MatrixXd z;        // columns have mean 0, sample variance 1
  Eigen::VectorXd center;
  Eigen::VectorXd scale;
};

//! Reads a comma-separated file. First row is a mandatory header; every body
//! cell must parse as a finite number (scientific notation accepted).
//! Throws data_error naming the offending row and column otherwise.
csv_table read_csv(const std::string& path);

//! Writes a table back out with enough digits to round-trip doubles.
void write_csv(const std::string& path, const csv_table& table);

//! Splits the named response column off a table. Remaining columns keep
//! their file order as covariates.
dataset make_dataset(const csv_table& table, const std::string& response);

dataset load_csv(const std::string& path, const std::string& response);

//! Restrict a dataset to the given covariate columns (order preserved).
dataset subset_columns(const dataset& ds, const std::vector<Eigen::Index>& columns);

//! 0-based tested column index j among d columns.
column_split split_columns(Eigen::Index d, Eigen::Index tested);

//! Per-column centering and scaling to unit sample variance (n-1 convention).
//! Throws numeric_error on a constant column.
standardization standardize(const Eigen::MatrixXd& x);

//! Validates the dataset invariants (finite entries, matching sizes, unique
//! non-empty labels); throws data_error on violation.
void validate(const dataset& ds);

}  // namespace npsig
