#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "hcl/data_model.hpp"

namespace hcl {

/// Reads the `study_id,y,n` CSV schema. y and n must be integers.
HistoricalData read_hcd_csv(std::istream& in);
HistoricalData read_hcd_csv(const std::filesystem::path& path);

/// Writes the same schema. Fractional counts (zero-adjusted data) are
/// written with round-trip precision but are rejected by the reader.
void write_hcd_csv(std::ostream& out, const HistoricalData& hcd);

}  // namespace hcl
