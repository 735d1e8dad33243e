#pragma once

#include <string>
#include <vector>

#include "p300/evaluation.hpp"

namespace p300 {

struct ReportInputs {
  std::vector<AccuracyCurve> curves;
  // Axis name ("montage" or "trials") paired with its table.
  std::vector<std::pair<std::string, ComparisonTable>> tables;
};

// Writes curve_<family>_<montage>.csv and table_<axis>.csv under outdir,
// accuracies at 4 decimals. With reference_mode on, also writes summary.txt
// comparing table cells against the published anchor numbers. Empty inputs
// warn on stderr and write nothing.
void emit_report(const ReportInputs& inputs, const std::string& outdir,
                 bool reference_mode = false);

// CSV forms used by emit_report, exposed for the report-merging command.
std::string curve_to_csv(const AccuracyCurve& curve);
std::string table_to_csv(const ComparisonTable& table, const std::string& axis);
ComparisonTable table_from_csv(const std::string& csv, std::string* axis);

// Column-wise merge of tables sharing an axis; rows are unioned in first-seen
// order.
ComparisonTable merge_tables(const std::vector<ComparisonTable>& tables);

}  // namespace p300
