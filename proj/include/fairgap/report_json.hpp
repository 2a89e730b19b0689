#pragma once

#include <string>

#include <json.hpp>

#include "fairgap/approx.hpp"
#include "fairgap/core_metrics.hpp"
#include "fairgap/dataset.hpp"
#include "fairgap/radar.hpp"
#include "fairgap/sweep.hpp"
#include "fairgap/trainer.hpp"

namespace fairgap::report {

inline constexpr int kReportSchemaVersion = 1;

nlohmann::json rate_set_json(const RateSet& r);
nlohmann::json metrics_json(const GroupMetrics& m);
nlohmann::json gaps_json(const FairnessGaps& g);

// Full audit document: metrics, gaps, between-group deltas and the
// (eps, delta) predicate results for the supplied parameters.
nlohmann::json audit_report_json(const std::string& dataset_name, std::size_t n,
                                 const GroupMetrics& m, double eps, double delta);

nlohmann::json sweep_report_json(const approx::SweepReport& r);

nlohmann::json stats_json(const std::string& dataset_name, const data::DatasetStats& s);

// Run records round-trip through JSON lines (one record per line).
nlohmann::json run_record_json(const train::RunRecord& r);
train::RunRecord run_record_from_json(const nlohmann::json& j);

void append_records_jsonl(const std::string& path,
                          const std::vector<train::RunRecord>& records);
std::vector<train::RunRecord> load_records_jsonl(const std::string& path);

nlohmann::json radar_report_json(const RadarReport& r);
std::string radar_report_csv(const RadarReport& r);

// Flat parameter-vector form with a versioned shape header.
nlohmann::json params_json(const nn::ParameterVector& p);
nn::ParameterVector params_from_json(const nlohmann::json& j);

}  // namespace fairgap::report
