#include "mmhar/plots.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#include "mmhar/report_io.hpp"

namespace fs = std::filesystem;

namespace mmhar {

namespace {

const std::set<std::string> kZeroShotLabels{"IMU-only", "RGB-only", "IMU*+RGB", "RGB*+IMU"};
const std::array<const char*, 6> kPalette{"#1f77b4", "#ff7f0e", "#2ca02c",
                                          "#d62728", "#9467bd", "#8c564b"};

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 40, kTop = 40, kBottom = 60;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

struct SvgBuilder {
  std::ostringstream out;

  SvgBuilder(const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";
  }

  void axes(const std::string& x_label, const std::string& y_label) {
    out << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\""
        << kWidth - kRight << "\" y2=\"" << kHeight - kBottom
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
        << kHeight - kBottom << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << x_label
        << "</text>\n";
    out << "<text x=\"18\" y=\"" << (kTop + kHeight - kBottom) / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
        << "transform=\"rotate(-90 18 " << (kTop + kHeight - kBottom) / 2 << ")\">" << y_label
        << "</text>\n";
    // y grid at 0, 0.25, ..., 1.0 (metric axis is always [0, 1])
    for (int i = 0; i <= 4; ++i) {
      const double v = 0.25 * i;
      const double y = y_of(v);
      out << "<line x1=\"" << kLeft << "\" y1=\"" << y << "\" x2=\"" << kWidth - kRight
          << "\" y2=\"" << y << "\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n";
      out << "<text x=\"" << kLeft - 8 << "\" y=\"" << y + 4
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(v)
          << "</text>\n";
    }
  }

  static double y_of(double metric) {
    return kHeight - kBottom - metric * (kHeight - kTop - kBottom);
  }

  void legend(const std::vector<std::string>& names) {
    double y = kTop + 6;
    for (std::size_t i = 0; i < names.size(); ++i) {
      out << "<rect x=\"" << kWidth - kRight - 150 << "\" y=\"" << y - 9
          << "\" width=\"12\" height=\"12\" fill=\"" << kPalette[i % kPalette.size()]
          << "\"/>\n";
      out << "<text x=\"" << kWidth - kRight - 132 << "\" y=\"" << y + 2
          << "\" font-family=\"sans-serif\" font-size=\"11\">" << names[i] << "</text>\n";
      y += 18;
    }
  }

  std::string finish() {
    out << "</svg>\n";
    return out.str();
  }
};

std::vector<SummaryRow> collect_rows(const std::string& results_dir) {
  std::vector<SummaryRow> rows;
  if (!fs::exists(results_dir)) throw Error("plots: results dir '" + results_dir + "' missing");
  if (fs::is_regular_file(results_dir)) {
    return read_summary_csv(results_dir);
  }
  for (const auto& entry : fs::recursive_directory_iterator(results_dir)) {
    if (entry.is_regular_file() && entry.path().filename() == "summary.csv") {
      const auto part = read_summary_csv(entry.path().string());
      rows.insert(rows.end(), part.begin(), part.end());
    }
  }
  return rows;
}

std::string render_ratio_plot(const std::vector<SummaryRow>& rows) {
  // mean top-1 per (condition, ratio) over seeds
  std::map<std::string, std::map<double, std::pair<double, int>>> agg;
  for (const auto& row : rows) {
    auto& cell = agg[row.condition][row.ratio];
    cell.first += row.top1;
    cell.second += 1;
  }

  SvgBuilder svg("Top-1 accuracy vs training-data ratio");
  svg.axes("training data ratio", "top-1 accuracy");

  double min_ratio = 1.0, max_ratio = 0.0;
  for (const auto& [cond, series] : agg) {
    for (const auto& [ratio, v] : series) {
      min_ratio = std::min(min_ratio, ratio);
      max_ratio = std::max(max_ratio, ratio);
    }
  }
  if (max_ratio <= min_ratio) {
    min_ratio = 0.0;
    max_ratio = 1.0;
  }
  auto x_of = [&](double ratio) {
    return kLeft + (ratio - min_ratio) / (max_ratio - min_ratio) * (kWidth - kLeft - kRight);
  };

  std::vector<std::string> names;
  std::size_t color = 0;
  for (const auto& [cond, series] : agg) {
    std::ostringstream points;
    for (const auto& [ratio, v] : series) {
      points << x_of(ratio) << "," << SvgBuilder::y_of(v.first / v.second) << " ";
    }
    svg.out << "<polyline fill=\"none\" stroke=\"" << kPalette[color % kPalette.size()]
            << "\" stroke-width=\"2\" points=\"" << points.str() << "\"/>\n";
    for (const auto& [ratio, v] : series) {
      svg.out << "<circle cx=\"" << x_of(ratio) << "\" cy=\""
              << SvgBuilder::y_of(v.first / v.second) << "\" r=\"3\" fill=\""
              << kPalette[color % kPalette.size()] << "\"/>\n";
    }
    names.push_back(cond);
    ++color;
  }
  for (const auto& [cond, series] : agg) {
    for (const auto& [ratio, v] : series) {
      svg.out << "<text x=\"" << x_of(ratio) << "\" y=\"" << kHeight - kBottom + 16
              << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
              << fmt(ratio) << "</text>\n";
    }
    break;  // tick labels once
  }
  svg.legend(names);
  return svg.finish();
}

std::string render_zero_shot_bars(const std::vector<SummaryRow>& rows, bool use_f1) {
  // mean metric per (hidden_count, condition)
  std::map<int, std::map<std::string, std::pair<double, int>>> agg;
  std::set<std::string> conditions;
  for (const auto& row : rows) {
    auto& cell = agg[row.hidden_count][row.condition];
    cell.first += use_f1 ? row.macro_f1 : row.top1;
    cell.second += 1;
    conditions.insert(row.condition);
  }

  SvgBuilder svg(use_f1 ? "Zero-shot macro-F1 per hidden-class count"
                        : "Zero-shot top-1 accuracy per hidden-class count");
  svg.axes("hidden classes", use_f1 ? "macro-F1" : "top-1 accuracy");

  const double plot_w = kWidth - kLeft - kRight;
  const auto n_groups = static_cast<double>(agg.size());
  const auto n_bars = static_cast<double>(conditions.size());
  const double group_w = plot_w / n_groups;
  const double bar_w = group_w * 0.8 / n_bars;

  std::vector<std::string> cond_order(conditions.begin(), conditions.end());
  double gx = kLeft;
  for (const auto& [count, per_cond] : agg) {
    for (std::size_t b = 0; b < cond_order.size(); ++b) {
      auto it = per_cond.find(cond_order[b]);
      if (it == per_cond.end()) continue;
      const double v = it->second.first / it->second.second;
      const double x = gx + group_w * 0.1 + static_cast<double>(b) * bar_w;
      const double y = SvgBuilder::y_of(v);
      svg.out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << bar_w * 0.9
              << "\" height=\"" << (kHeight - kBottom) - y << "\" fill=\""
              << kPalette[b % kPalette.size()] << "\"/>\n";
    }
    svg.out << "<text x=\"" << gx + group_w / 2 << "\" y=\"" << kHeight - kBottom + 16
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << count << " hidden</text>\n";
    gx += group_w;
  }
  svg.legend(cond_order);
  return svg.finish();
}

}  // namespace

std::vector<std::string> emit_plots(const std::string& results_dir, const std::string& out_dir) {
  const std::vector<SummaryRow> rows = collect_rows(results_dir);
  if (rows.empty()) throw Error("plots: no summary rows under '" + results_dir + "'");

  std::vector<SummaryRow> sweep_rows, zero_rows;
  std::set<double> sweep_ratios;
  for (const auto& row : rows) {
    if (kZeroShotLabels.count(row.condition) && row.hidden_count > 0) {
      zero_rows.push_back(row);
    }
    if (row.hidden_count == 0) {
      sweep_rows.push_back(row);
      sweep_ratios.insert(row.ratio);
    }
  }
  // zero-shot baselines (hidden_count = 0 rows with zero-shot labels) join the bars
  for (const auto& row : rows) {
    if (kZeroShotLabels.count(row.condition) && row.hidden_count == 0 && !zero_rows.empty()) {
      zero_rows.push_back(row);
    }
  }

  std::vector<std::string> written;
  fs::create_directories(out_dir);
  if (sweep_ratios.size() >= 2) {
    const std::string path = (fs::path(out_dir) / "ratio_sweep.svg").string();
    write_text_file(path, render_ratio_plot(sweep_rows));
    written.push_back(path);
  }
  if (!zero_rows.empty()) {
    const std::string acc = (fs::path(out_dir) / "zero_shot_accuracy.svg").string();
    const std::string f1 = (fs::path(out_dir) / "zero_shot_f1.svg").string();
    write_text_file(acc, render_zero_shot_bars(zero_rows, false));
    write_text_file(f1, render_zero_shot_bars(zero_rows, true));
    written.push_back(acc);
    written.push_back(f1);
  }
  if (written.empty()) {
    throw Error("plots: rows found but none match a ratio sweep or zero-shot layout");
  }
  return written;
}

}  // namespace mmhar
