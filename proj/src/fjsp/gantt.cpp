#include <algorithm>
#include <sstream>
#include <tuple>

#include "cimtune/fjsp.hpp"

namespace cimtune::fjsp {

namespace {

constexpr int kCell = 4;

struct Block {
  OpRef ref;
  ScheduledOp placed;
};

std::vector<std::vector<Block>> blocks_by_machine(const Instance& inst, const Schedule& schedule, int& horizon) {
  std::vector<std::vector<Block>> rows(static_cast<std::size_t>(inst.machines()));
  horizon = 1;
  for (const OpRef ref : inst.operations()) {
    const auto& p = schedule.at(ref);
    if (!p) continue;
    rows.at(static_cast<std::size_t>(p->machine)).push_back({ref, *p});
    horizon = std::max(horizon, p->end);
  }
  for (auto& row : rows) {
    std::sort(row.begin(), row.end(), [](const Block& a, const Block& b) {
      return std::tie(a.placed.start, a.ref) < std::tie(b.placed.start, b.ref);
    });
  }
  return rows;
}

std::string short_label(OpRef ref) { return std::to_string(ref.job + 1) + "." + std::to_string(ref.op + 1); }

}  // namespace

std::string gantt_text(const Instance& inst, const Schedule& schedule) {
  int horizon = 0;
  const auto rows = blocks_by_machine(inst, schedule, horizon);
  std::ostringstream out;
  out << "time |";
  for (int t = 0; t < horizon; ++t) {
    std::string tick = std::to_string(t);
    out << tick << std::string(static_cast<std::size_t>(kCell) - std::min<std::size_t>(tick.size(), kCell), ' ');
  }
  out << horizon << '\n';
  for (int m = 0; m < inst.machines(); ++m) {
    // Blocks may overlap when the schedule has conflicts; later blocks overwrite.
    std::string line(static_cast<std::size_t>(horizon * kCell), ' ');
    for (int t = 0; t < horizon; ++t) line[static_cast<std::size_t>(t * kCell)] = '.';
    for (const Block& b : rows[static_cast<std::size_t>(m)]) {
      const std::size_t begin = static_cast<std::size_t>(b.placed.start * kCell);
      const std::size_t width = static_cast<std::size_t>((b.placed.end - b.placed.start) * kCell);
      std::string cell(width, '=');
      cell.front() = '[';
      cell.back() = ']';
      const std::string text = short_label(b.ref);
      for (std::size_t k = 0; k < text.size() && k + 1 < width - 1; ++k) cell[k + 1] = text[k];
      line.replace(begin, width, cell);
    }
    std::string name = "M" + std::to_string(m + 1);
    name.resize(5, ' ');
    out << name << '|' << line << '\n';
  }
  return out.str();
}

std::string gantt_svg(const Instance& inst, const Schedule& schedule, const std::string& title) {
  static const char* kPalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
                                   "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"};
  constexpr int kUnit = 40, kRow = 36, kLeft = 60, kTop = 40, kBar = 26;
  int horizon = 0;
  const auto rows = blocks_by_machine(inst, schedule, horizon);
  const int width = kLeft + horizon * kUnit + 20;
  const int height = kTop + inst.machines() * kRow + 40;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  if (!title.empty()) {
    std::string escaped;
    for (char c : title) {
      switch (c) {
        case '<': escaped += "&lt;"; break;
        case '>': escaped += "&gt;"; break;
        case '&': escaped += "&amp;"; break;
        case '"': escaped += "&quot;"; break;
        default: escaped += c;
      }
    }
    svg << "<text x=\"" << kLeft << "\" y=\"20\" font-size=\"14\">" << escaped << "</text>\n";
  }
  const int axis_y = kTop + inst.machines() * kRow + 4;
  for (int t = 0; t <= horizon; ++t) {
    const int x = kLeft + t * kUnit;
    svg << "<line x1=\"" << x << "\" y1=\"" << kTop << "\" x2=\"" << x << "\" y2=\"" << axis_y
        << "\" stroke=\"#dddddd\"/>\n";
    svg << "<text x=\"" << x << "\" y=\"" << axis_y + 16 << "\" text-anchor=\"middle\">" << t << "</text>\n";
  }
  for (int m = 0; m < inst.machines(); ++m) {
    const int y = kTop + m * kRow;
    svg << "<text x=\"10\" y=\"" << y + kBar / 2 + 5 << "\">M" << m + 1 << "</text>\n";
    for (const Block& b : rows[static_cast<std::size_t>(m)]) {
      const int x = kLeft + b.placed.start * kUnit;
      const int w = (b.placed.end - b.placed.start) * kUnit;
      svg << "<rect class=\"op\" data-op=\"" << label(b.ref) << "\" x=\"" << x << "\" y=\"" << y << "\" width=\"" << w
          << "\" height=\"" << kBar << "\" fill=\"" << kPalette[b.ref.job % 10]
          << "\" stroke=\"black\" fill-opacity=\"0.85\"/>\n";
      svg << "<text x=\"" << x + w / 2 << "\" y=\"" << y + kBar / 2 + 4 << "\" text-anchor=\"middle\" fill=\"white\">"
          << label(b.ref) << "</text>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace cimtune::fjsp
