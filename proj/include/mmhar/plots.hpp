#pragma once

#include <string>
#include <vector>

namespace mmhar {

/// Reads every summary.csv under results_dir and renders:
///   - ratio_sweep.svg            (top-1 vs training ratio, one line per condition)
///   - zero_shot_accuracy.svg     (grouped bars per hidden count)
///   - zero_shot_f1.svg
/// Only the plots with matching rows are produced; no rows at all is an
/// error and nothing is written. Returns the paths written.
std::vector<std::string> emit_plots(const std::string& results_dir, const std::string& out_dir);

}  // namespace mmhar
