#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "nkdelib/experiments.hpp"

namespace nkd {

// Column order of the per-run CSV.
inline constexpr const char* kRunsCsvHeader =
    "condition_label,k,w,alpha_spec,run_index,seed,distinct_solutions,dm_value,dm_value_normalized,"
    "consensus_round,rounds_executed";

// Column order of the per-condition aggregate CSV.
inline constexpr const char* kAggregateCsvHeader =
    "condition_label,k,w,alpha_spec,runs,mean,sd,ci_low,ci_high,mean_dm_value,mean_dm_value_normalized,"
    "mean_consensus_round,converged_runs";

// Each comment line is written as "# <line>" before the CSV header row.
// Absent optional values are written as empty fields.
void write_runs_csv(const ExperimentResult& result, std::span<const std::string> comments, std::ostream& out);
void write_aggregate_csv(const ExperimentResult& result, std::span<const std::string> comments, std::ostream& out);

// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(const std::string& text);

}  // namespace nkd
