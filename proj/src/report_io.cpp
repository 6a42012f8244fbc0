#include "mmhar/report_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace mmhar {

const char* kSummaryCsvHeader = "dataset,condition,ratio,hidden_count,seed,top1,top5,macro_f1";

namespace {
std::string fmt(double v, const char* spec) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}
}  // namespace

std::string format_summary_row(const SummaryRow& row) {
  std::string out;
  out += row.dataset;
  out += ',';
  out += row.condition;
  out += ',';
  out += fmt(row.ratio, "%.4f");
  out += ',';
  out += std::to_string(row.hidden_count);
  out += ',';
  out += std::to_string(row.seed);
  out += ',';
  out += fmt(row.top1, "%.6f");
  out += ',';
  out += fmt(row.top5, "%.6f");
  out += ',';
  out += fmt(row.macro_f1, "%.6f");
  return out;
}

SummaryRow parse_summary_row(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ',')) fields.push_back(tok);
  if (fields.size() != 8) throw Error("summary csv: malformed row '" + line + "'");
  SummaryRow row;
  row.dataset = fields[0];
  row.condition = fields[1];
  row.ratio = std::stod(fields[2]);
  row.hidden_count = std::stoi(fields[3]);
  row.seed = std::stoull(fields[4]);
  row.top1 = std::stod(fields[5]);
  row.top5 = std::stod(fields[6]);
  row.macro_f1 = std::stod(fields[7]);
  return row;
}

void append_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows) {
  fs::create_directories(fs::path(path).parent_path());
  const bool fresh = !fs::exists(path) || fs::file_size(path) == 0;
  std::ofstream f(path, std::ios::app);
  if (!f) throw Error("cannot open summary csv '" + path + "'");
  if (fresh) f << kSummaryCsvHeader << "\n";
  for (const auto& row : rows) f << format_summary_row(row) << "\n";
}

std::vector<SummaryRow> read_summary_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot read summary csv '" + path + "'");
  std::vector<SummaryRow> rows;
  std::string line;
  bool first = true;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (first && line == kSummaryCsvHeader) {
      first = false;
      continue;
    }
    first = false;
    rows.push_back(parse_summary_row(line));
  }
  return rows;
}

void write_metrics_report_json(const std::string& path, const MetricsReport& report,
                               const std::string& dataset, const std::string& condition) {
  nlohmann::json j;
  j["dataset"] = dataset;
  j["condition"] = condition;
  j["top1"] = report.top1;
  j["top5"] = report.top5;
  j["macro_f1"] = report.macro_f1;
  j["num_samples"] = report.num_samples;
  j["config_hash"] = report.config_hash;
  j["seed"] = report.seed;
  write_text_file(path, j.dump(2) + "\n");
}

void write_training_log_jsonl(const std::string& path, const TrainingRun& run,
                              const std::string& stage_name) {
  fs::create_directories(fs::path(path).parent_path());
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error("cannot open training log '" + path + "'");
  for (const auto& e : run.history) {
    nlohmann::json j;
    j["stage"] = stage_name;
    j["epoch"] = e.epoch;
    j["train_loss"] = e.train_loss;
    j["val_top1"] = e.val_top1;
    f << j.dump() << "\n";
  }
}

void write_audit_log_jsonl(const std::string& path, const std::vector<ConsumptionRecord>& audit) {
  fs::create_directories(fs::path(path).parent_path());
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error("cannot open audit log '" + path + "'");
  for (const auto& rec : audit) {
    nlohmann::json j;
    j["sample_id"] = rec.sample_id;
    j["modality"] = to_string(rec.modality);
    j["stage"] = rec.stage;
    j["epoch"] = rec.epoch;
    f << j.dump() << "\n";
  }
}

std::vector<ConsumptionRecord> read_audit_log_jsonl(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot read audit log '" + path + "'");
  std::vector<ConsumptionRecord> out;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    ConsumptionRecord rec;
    rec.sample_id = j.at("sample_id");
    rec.modality = modality_from_string(j.at("modality"));
    rec.stage = j.at("stage");
    rec.epoch = j.at("epoch");
    out.push_back(std::move(rec));
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& text) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(path, std::ios::trunc | std::ios::binary);
  if (!f) throw Error("cannot write '" + path + "'");
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot read '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace mmhar
