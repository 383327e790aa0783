#pragma once

#include <stdexcept>
#include <string>

namespace npsig {

// Input data violates a documented requirement: unreadable file, bad cell,
// malformed header, dimension mismatch between files.
class data_error : public std::runtime_error {
public:
  explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

// Computation cannot proceed on this data: degenerate column, singular
// covariance, fewer distinct values than the cell size requires.
class numeric_error : public std::runtime_error {
public:
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace npsig
