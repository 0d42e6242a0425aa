#pragma once

#include <cstdint>

#include "hcl/data_model.hpp"

namespace hcl {

/// [min y_h, max y_h]. Requires constant cluster size (UnequalClusterSizes).
IntervalResult historical_range(const HistoricalData& hcd);

/// Shewhart np-chart limits n* pi_bar +/- k sqrt(n* pi_bar (1 - pi_bar)).
IntervalResult np_chart(const HistoricalData& hcd, std::int64_t n_star, double k);

/// y_bar +/- k SD over studies. Requires H >= 2 and constant cluster size.
IntervalResult mean_k_sd(const HistoricalData& hcd, double k);

}  // namespace hcl
