#pragma once

#include <string>
#include <vector>

namespace mmhar {

/// Aligns two or more run directories (their summary.csv files) into a
/// comparison table: rows = condition, columns = top1/top5/F1 per dataset.
/// Writes comparison.csv and a fixed-width comparison.txt under out_dir;
/// mismatched datasets produce a warning column, not a failure.
struct CompareResult {
  std::string csv_path;
  std::string text_path;
  std::vector<std::string> warnings;
};

CompareResult compare_runs(const std::vector<std::string>& results_dirs,
                           const std::string& out_dir);

}  // namespace mmhar
