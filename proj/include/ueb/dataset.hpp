#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "ueb/family.hpp"

namespace ueb {

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Dataset {
  std::vector<std::string> ids;       // unique area identifiers, file order
  std::vector<AreaRecord> records;    // parallel to ids
  std::vector<std::string> x_names;   // covariate column names from the header
  std::size_t q() const { return x_names.size(); }
};

// Comma-separated file with a mandatory header
//   area_id,y,n,<x1>,...,<xq>        (q >= 1; include a ones column for an
//                                     intercept)
// Each row is validated for the family; diagnostics carry 1-based row numbers.
// Duplicate area ids are rejected. FH files carry n = 1/D.
Dataset load_dataset_csv(const std::string& path, Family f);
Dataset parse_dataset_csv(const std::string& text, Family f, const std::string& origin);

}  // namespace ueb
