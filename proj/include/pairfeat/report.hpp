#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pairfeat/protocol.hpp"

namespace pairfeat {

/// Per-metric table of one (mode, classifier) run: macro and per-class rows
/// for the average and maximum reports.
std::string metrics_csv(const ProtocolResult& result, std::span<const std::string> class_names);

/// K x K grid with a header row and a leading true-class column.
std::string confusion_csv(std::span<const double> grid, std::span<const std::string> class_names);

/// One row per (classifier, mode) with the five macro metrics.
std::string summary_csv(const ComparisonReport& report, bool maximum);

/// Paired minus non-paired for each classifier, average and maximum.
std::string deltas_csv(const ComparisonReport& report);

/// Train/test seconds laid out as phase x mode rows and classifier columns.
std::string timing_csv(const ComparisonReport& report);

/// Everything above plus every repeat's confusion matrix and the row-count
/// statistics, as pretty-printed JSON.
std::string report_json(const ComparisonReport& report, std::span<const std::string> class_names,
                        const std::string& run_id);

/// Writes all report files into `dir` with names prefixed by `run_id` and
/// returns their paths.
std::vector<std::filesystem::path> write_report(const std::filesystem::path& dir, const std::string& run_id,
                                                const ComparisonReport& report,
                                                std::span<const std::string> class_names);

}  // namespace pairfeat
