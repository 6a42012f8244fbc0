#include "mmhar/compare.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#include "mmhar/report_io.hpp"

namespace fs = std::filesystem;

namespace mmhar {

namespace {

struct Aggregate {
  double top1 = 0, top5 = 0, f1 = 0;
  int n = 0;
  void add(const SummaryRow& row) {
    top1 += row.top1;
    top5 += row.top5;
    f1 += row.macro_f1;
    ++n;
  }
};

std::string cell(const Aggregate* agg, double Aggregate::*field) {
  if (!agg || agg->n == 0) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", agg->*field / agg->n);
  return buf;
}

}  // namespace

CompareResult compare_runs(const std::vector<std::string>& results_dirs,
                           const std::string& out_dir) {
  if (results_dirs.size() < 2) {
    throw Error("compare: need at least two run directories (got " +
                std::to_string(results_dirs.size()) + ")");
  }

  // (condition, dataset) -> aggregate over every matching row
  std::map<std::string, std::map<std::string, Aggregate>> table;
  std::set<std::string> datasets;
  CompareResult result;

  for (const auto& dir : results_dirs) {
    const fs::path csv = fs::is_regular_file(dir) ? fs::path(dir) : fs::path(dir) / "summary.csv";
    if (!fs::exists(csv)) {
      throw Error("compare: '" + dir + "' has no summary.csv");
    }
    for (const auto& row : read_summary_csv(csv.string())) {
      table[row.condition][row.dataset].add(row);
      datasets.insert(row.dataset);
    }
  }
  if (datasets.size() > 1) {
    result.warnings.push_back("runs span multiple datasets: missing cells are rendered as '-'");
  }

  std::ostringstream csv_out;
  csv_out << "condition";
  for (const auto& ds : datasets) csv_out << "," << ds << "_top1," << ds << "_top5," << ds << "_f1";
  if (!result.warnings.empty()) csv_out << ",warning";
  csv_out << "\n";
  for (const auto& [condition, per_ds] : table) {
    csv_out << condition;
    for (const auto& ds : datasets) {
      auto it = per_ds.find(ds);
      const Aggregate* agg = it == per_ds.end() ? nullptr : &it->second;
      csv_out << "," << cell(agg, &Aggregate::top1) << "," << cell(agg, &Aggregate::top5) << ","
              << cell(agg, &Aggregate::f1);
    }
    if (!result.warnings.empty()) {
      bool missing = false;
      for (const auto& ds : datasets) missing |= per_ds.count(ds) == 0;
      csv_out << "," << (missing ? "partial" : "");
    }
    csv_out << "\n";
  }

  std::ostringstream txt;
  txt << std::left;
  const int name_w = 14, col_w = 10;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-*s", name_w, "condition");
  txt << buf;
  for (const auto& ds : datasets) {
    for (const char* m : {"top1", "top5", "f1"}) {
      std::snprintf(buf, sizeof(buf), "%*s", col_w, (ds + ":" + m).c_str());
      txt << buf;
    }
  }
  txt << "\n";
  for (const auto& [condition, per_ds] : table) {
    std::snprintf(buf, sizeof(buf), "%-*s", name_w, condition.c_str());
    txt << buf;
    for (const auto& ds : datasets) {
      auto it = per_ds.find(ds);
      const Aggregate* agg = it == per_ds.end() ? nullptr : &it->second;
      for (auto field : {&Aggregate::top1, &Aggregate::top5, &Aggregate::f1}) {
        std::snprintf(buf, sizeof(buf), "%*s", col_w, cell(agg, field).c_str());
        txt << buf;
      }
    }
    txt << "\n";
  }
  for (const auto& w : result.warnings) txt << "note: " << w << "\n";

  fs::create_directories(out_dir);
  result.csv_path = (fs::path(out_dir) / "comparison.csv").string();
  result.text_path = (fs::path(out_dir) / "comparison.txt").string();
  write_text_file(result.csv_path, csv_out.str());
  write_text_file(result.text_path, txt.str());
  return result;
}

}  // namespace mmhar
