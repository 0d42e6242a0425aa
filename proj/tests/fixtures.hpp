#pragma once

#include <vector>

#include "hcl/data_model.hpp"

namespace fixtures {

inline hcl::HistoricalData mortality() {
  const std::vector<double> y{15, 10, 12, 17, 11, 21, 13, 12, 17, 10};
  return hcl::HistoricalData::from_counts(y, std::vector<double>(y.size(), 50.0));
}

inline hcl::HistoricalData counts(std::vector<double> y, std::vector<double> n) {
  return hcl::HistoricalData::from_counts(y, n);
}

}  // namespace fixtures
