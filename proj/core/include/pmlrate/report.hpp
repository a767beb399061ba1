#pragma once

#include <optional>
#include <span>
#include <string>

#include "pmlrate/harness.hpp"

namespace pml {

/// Header of the sweep CSV; fixed byte for byte.
inline constexpr const char* kSweepCsvHeader = "axis,value,rel_L2,rel_H1,abs_H1,predicted_bound,ratio,flag";

/// Shortest round-trip decimal form of v.
std::string format_double(double v);

/// Sweep rows as CSV (header line first, '\n' line endings).
std::string sweep_csv(std::span<const SweepRow> rows);

/// JSON mirror: {"rows": [{axis, value, rel_L2, ...}], "fit": {...}} with the CSV keys.
std::string sweep_json(std::span<const SweepRow> rows, const std::optional<FitResult>& fit = std::nullopt);

}  // namespace pml
