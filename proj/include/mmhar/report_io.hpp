#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mmhar/evaluation.hpp"
#include "mmhar/experiments.hpp"

namespace mmhar {

/// Stable summary-CSV row. Column order is part of the interface:
/// dataset,condition,ratio,hidden_count,seed,top1,top5,macro_f1
struct SummaryRow {
  std::string dataset;
  std::string condition;
  double ratio = 1.0;
  int hidden_count = 0;
  std::uint64_t seed = 0;
  double top1 = 0.0;
  double top5 = 0.0;
  double macro_f1 = 0.0;
};

extern const char* kSummaryCsvHeader;

std::string format_summary_row(const SummaryRow& row);
SummaryRow parse_summary_row(const std::string& line);

/// Appends rows, writing the header when the file is new.
void append_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> read_summary_csv(const std::string& path);

void write_metrics_report_json(const std::string& path, const MetricsReport& report,
                               const std::string& dataset, const std::string& condition);

void write_training_log_jsonl(const std::string& path, const TrainingRun& run,
                              const std::string& stage_name);
void write_audit_log_jsonl(const std::string& path, const std::vector<ConsumptionRecord>& audit);
std::vector<ConsumptionRecord> read_audit_log_jsonl(const std::string& path);

/// Writes text, creating parent directories.
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace mmhar
