#include "nkdelib/report.hpp"

#include <ostream>

#include "nkdelib/text.hpp"

namespace nkd {

namespace {

template <class T>
std::string optional_field(const std::optional<T>& v) {
  if (!v) return {};
  if constexpr (std::is_floating_point_v<T>)
    return format_real(*v);
  else
    return std::to_string(*v);
}

void write_comments(std::span<const std::string> comments, std::ostream& out) {
  for (const auto& c : comments) out << "# " << c << '\n';
}

std::string condition_columns(const ConditionResult& c) {
  return csv_field(c.label) + ',' + std::to_string(c.params.k) + ',' + format_real(c.params.divergence_weight) + ',' +
         csv_field(c.params.schedule.describe());
}

}  // namespace

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char ch : text) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

void write_runs_csv(const ExperimentResult& result, std::span<const std::string> comments, std::ostream& out) {
  write_comments(comments, out);
  out << kRunsCsvHeader << '\n';
  for (const auto& c : result.conditions) {
    const auto prefix = condition_columns(c);
    for (const auto& r : c.run_records) {
      const auto& s = r.summary;
      out << prefix << ',' << r.run_index << ',' << r.seed << ',' << s.distinct_solutions << ','
          << format_real(s.dm_value) << ',' << optional_field(s.dm_value_normalized) << ','
          << optional_field(s.consensus_round) << ',' << s.rounds_executed << '\n';
    }
  }
}

void write_aggregate_csv(const ExperimentResult& result, std::span<const std::string> comments, std::ostream& out) {
  write_comments(comments, out);
  out << kAggregateCsvHeader << '\n';
  for (const auto& c : result.conditions) {
    out << condition_columns(c) << ',' << c.runs << ',' << format_real(c.mean_distinct) << ','
        << format_real(c.sd_distinct) << ',' << format_real(c.ci.low) << ',' << format_real(c.ci.high) << ','
        << format_real(c.mean_dm_value) << ',' << optional_field(c.mean_dm_value_normalized) << ','
        << optional_field(c.mean_consensus_round) << ',' << c.converged_runs << '\n';
  }
}

}  // namespace nkd
