#include "homebench/render.hpp"

#include <algorithm>
#include <cstdio>
#include <optional>
#include <sstream>
#include <vector>

namespace homebench::render {

using metrics::MetricBlock;
using metrics::MetricsReport;
using task::Category;

namespace {

constexpr const char* kDash = "—";

// Column order: overall first, then the perturbed categories, then the
// unperturbed baseline.
const std::vector<Category> kColumns = {
    Category::RandomDisturbance, Category::ObservationMismatching,
    Category::MemoryExploration, Category::MemoryExecution,
    Category::Mix,               Category::Ideal,
};

const std::vector<const char*> kColumnTitles = {"Ran.", "Obs.", "Exp.",
                                                "Exe.", "Mix",  "Ideal"};

std::string fmt2(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", metrics::round_half_even(x, 2));
  return buf;
}

std::string fmt_opt(const std::optional<double>& x) {
  return x ? fmt2(*x) : std::string(kDash);
}

std::string fmt_int(int x) { return std::to_string(x); }

struct Row {
  std::string title;
  std::vector<std::string> cells;  // overall + one per category column
};

std::vector<Row> grid_rows(const MetricsReport& r) {
  auto block = [&](Category c) -> const MetricBlock* {
    auto it = r.categories.find(c);
    return it == r.categories.end() ? nullptr : &it->second;
  };
  auto row = [&](std::string title, auto&& pick) {
    Row out{std::move(title), {}};
    out.cells.push_back(pick(r.overall));
    for (Category c : kColumns) {
      const MetricBlock* b = block(c);
      out.cells.push_back(b ? pick(*b) : std::string(kDash));
    }
    return out;
  };
  return {
      row("SR (%)", [](const MetricBlock& b) { return fmt2(b.sr); }),
      row("Acc_P (%)", [](const MetricBlock& b) { return fmt2(b.acc_p); }),
      row("Len", [](const MetricBlock& b) { return fmt2(b.len); }),
      row("eta", [](const MetricBlock& b) { return fmt2(b.eta); }),
      row("Acc_C (%)", [](const MetricBlock& b) { return fmt_opt(b.acc_c); }),
      row("episodes", [](const MetricBlock& b) { return fmt_int(b.episodes); }),
  };
}

std::vector<std::pair<std::string, std::string>> memory_rows(
    const MetricsReport& r) {
  const auto& m = r.memory;
  return {
      {"SR_Exp (%)", fmt_opt(m.sr_exp)},
      {"SR_Exp-only (%)", fmt_opt(m.sr_exp_only)},
      {"Comp_Exp", fmt_opt(m.comp_exp)},
      {"eta_Exp", fmt_opt(m.eta_exp)},
      {"SR_Exe (%)", fmt_opt(m.sr_exe)},
      {"Acc_Dec (%)", fmt_opt(m.acc_dec)},
  };
}

// Pad UTF-8 aware enough for our one non-ASCII glyph (the em dash).
std::size_t display_width(const std::string& s) {
  std::size_t w = 0;
  for (unsigned char ch : s) {
    if ((ch & 0xC0) != 0x80) ++w;
  }
  return w;
}

void pad_to(std::string& line, std::size_t column) {
  std::size_t w = display_width(line);
  if (w < column) line.append(column - w, ' ');
}

}  // namespace

std::string render_table(const MetricsReport& r) {
  std::ostringstream out;
  const std::size_t label_w = 14;
  const std::size_t cell_w = 9;

  std::string header(label_w, ' ');
  {
    std::string line = header;
    std::vector<std::string> titles = {"Avg"};
    titles.insert(titles.end(), kColumnTitles.begin(), kColumnTitles.end());
    for (const auto& t : titles) {
      std::string cell = t;
      std::string padded(cell_w - std::min(cell_w - 1, display_width(cell)), ' ');
      line += padded + cell;
    }
    out << line << "\n";
    out << std::string(display_width(line), '-') << "\n";
  }
  for (const auto& row : grid_rows(r)) {
    std::string line = row.title;
    pad_to(line, label_w);
    for (const auto& cell : row.cells) {
      std::string pad(cell_w - std::min(cell_w - 1, display_width(cell)), ' ');
      line += pad + cell;
    }
    out << line << "\n";
  }

  out << "\nhidden-target metrics\n";
  for (const auto& [title, value] : memory_rows(r)) {
    std::string line = title;
    pad_to(line, label_w + 4);
    out << line << value << "\n";
  }

  out << "\naborted episodes: " << r.overall.aborted << "\n";
  if (!r.footnotes.empty()) {
    out << "notes:\n";
    for (const auto& note : r.footnotes) out << "  - " << note << "\n";
  }
  return out.str();
}

std::string render_csv(const MetricsReport& r) {
  std::ostringstream out;
  out << "metric,avg";
  for (Category c : kColumns) out << "," << task::category_name(c);
  out << "\n";
  for (const auto& row : grid_rows(r)) {
    out << row.title;
    for (const auto& cell : row.cells) {
      out << "," << (cell == kDash ? "" : cell);
    }
    out << "\n";
  }
  for (const auto& [title, value] : memory_rows(r)) {
    out << title << "," << (value == kDash ? "" : value);
    for (std::size_t i = 0; i < kColumns.size(); ++i) out << ",";
    out << "\n";
  }
  return out.str();
}

std::string render_compare(const MetricsReport& from, const MetricsReport& to) {
  std::ostringstream out;
  auto rows_a = grid_rows(from);
  auto rows_b = grid_rows(to);
  std::vector<std::string> columns = {"Avg"};
  columns.insert(columns.end(), kColumnTitles.begin(), kColumnTitles.end());
  for (std::size_t i = 0; i < rows_a.size(); ++i) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const std::string& a = rows_a[i].cells[c];
      const std::string& b = rows_b[i].cells[c];
      if (a == kDash && b == kDash) continue;
      out << rows_a[i].title << " [" << columns[c] << "]: " << a << " -> " << b;
      if (a != kDash && b != kDash) {
        double delta = std::stod(b) - std::stod(a);
        char buf[32];
        std::snprintf(buf, sizeof buf, "%+.2f", delta);
        out << " (" << buf << ")";
      }
      out << "\n";
    }
  }
  auto mem_a = memory_rows(from);
  auto mem_b = memory_rows(to);
  for (std::size_t i = 0; i < mem_a.size(); ++i) {
    const std::string& a = mem_a[i].second;
    const std::string& b = mem_b[i].second;
    if (a == kDash && b == kDash) continue;
    out << mem_a[i].first << ": " << a << " -> " << b;
    if (a != kDash && b != kDash) {
      double delta = std::stod(b) - std::stod(a);
      char buf[32];
      std::snprintf(buf, sizeof buf, "%+.2f", delta);
      out << " (" << buf << ")";
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace homebench::render
