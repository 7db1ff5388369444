#include "knowcat/plot.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "knowcat/jsonl.hpp"

namespace knowcat {
namespace {

std::string num(double v) { return Json(round4(v)).dump(); }

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// White-to-red ramp for heatmap cells.
std::string heat_color(double v) {
  v = std::clamp(v, 0.0, 1.0);
  const int g = static_cast<int>(255.0 - 206.0 * v + 0.5);
  const int b = static_cast<int>(255.0 - 219.0 * v + 0.5);
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02X%02X%02X", 255 - static_cast<int>(36 * v + 0.5), g, b);
  return buf;
}

}  // namespace

std::string category_bars_csv(const std::vector<LabeledDistribution>& series) {
  std::ostringstream ss;
  ss << "series,category_index,category,name,color,count,ratio\n";
  for (const auto& [label, d] : series) {
    for (Category c : kAllCategories) {
      ss << csv_field(label) << ',' << index_of(c) << ',' << label_of(c) << ','
         << full_name_of(c) << ',' << color_of(c) << ',' << d.counts[slot_of(c)]
         << ',' << num(d.ratio(c)) << '\n';
    }
  }
  return ss.str();
}

std::string transition_bars_csv(const TransitionMatrix& matrix) {
  const auto rows = per_category_ratios(matrix);
  const auto overall = transition_ratios(matrix);
  std::ostringstream ss;
  ss << "source_category,name,color,support,upgrade,downgrade,stable\n";
  for (Category c : kAllCategories) {
    const auto slot = slot_of(c);
    std::size_t support = 0;
    for (auto n : matrix.counts[slot]) support += n;
    ss << label_of(c) << ',' << full_name_of(c) << ',' << color_of(c) << ','
       << support << ',';
    if (rows[slot]) {
      ss << num(rows[slot]->upgrade) << ',' << num(rows[slot]->downgrade) << ','
         << num(rows[slot]->stable) << '\n';
    } else {
      ss << ",,\n";
    }
  }
  ss << "all,All categories,," << matrix.total << ',' << num(overall.upgrade)
     << ',' << num(overall.downgrade) << ',' << num(overall.stable) << '\n';
  return ss.str();
}

std::string heatmap_csv(const LayerHeatmap& heatmap) {
  std::ostringstream ss;
  ss << "layer,category_index,category,support,mean_p_truth\n";
  for (int l = 0; l < heatmap.layer_count; ++l) {
    for (Category c : kAllCategories) {
      const auto row = static_cast<std::size_t>(l);
      ss << l << ',' << index_of(c) << ',' << label_of(c) << ','
         << heatmap.support[row][slot_of(c)] << ',';
      if (auto v = heatmap.cells[row][slot_of(c)]) ss << num(*v);
      ss << '\n';
    }
  }
  return ss.str();
}

std::string stacked_bars_svg(const std::vector<LabeledDistribution>& series,
                             const std::string& title) {
  constexpr int kBarWidth = 60, kGap = 30, kPlotHeight = 300, kLeft = 60,
                kTop = 40, kLegendWidth = 200;
  const int width = kLeft + static_cast<int>(series.size()) * (kBarWidth + kGap) +
                    kLegendWidth;
  const int height = kTop + kPlotHeight + 60;
  std::ostringstream ss;
  ss << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
     << "\" height=\"" << height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  ss << "<text x=\"" << kLeft << "\" y=\"20\" font-size=\"14\">" << xml_escape(title)
     << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& [label, d] = series[s];
    const int x = kLeft + static_cast<int>(s) * (kBarWidth + kGap);
    double y = kTop;
    for (Category c : kAllCategories) {
      const double h = d.ratio(c) * kPlotHeight;
      if (h > 0) {
        ss << "<rect x=\"" << x << "\" y=\"" << num(y) << "\" width=\"" << kBarWidth
           << "\" height=\"" << num(h) << "\" fill=\"" << color_of(c)
           << "\" stroke=\"#333\" stroke-width=\"0.5\"><title>" << label_of(c) << ' '
           << num(d.ratio(c)) << "</title></rect>\n";
        if (h >= 12) {
          ss << "<text x=\"" << x + kBarWidth / 2 << "\" y=\"" << num(y + h / 2 + 4)
             << "\" text-anchor=\"middle\">" << num(d.ratio(c)) << "</text>\n";
        }
      }
      y += h;
    }
    ss << "<text x=\"" << x + kBarWidth / 2 << "\" y=\"" << kTop + kPlotHeight + 16
       << "\" text-anchor=\"middle\">" << xml_escape(label) << "</text>\n";
  }
  const int lx = width - kLegendWidth + 20;
  for (Category c : kAllCategories) {
    const int ly = kTop + (index_of(c) - 1) * 20;
    ss << "<rect x=\"" << lx << "\" y=\"" << ly << "\" width=\"14\" height=\"14\" fill=\""
       << color_of(c) << "\" stroke=\"#333\" stroke-width=\"0.5\"/>\n";
    ss << "<text x=\"" << lx + 20 << "\" y=\"" << ly + 11 << "\">" << label_of(c) << ' '
       << full_name_of(c) << "</text>\n";
  }
  ss << "</svg>\n";
  return ss.str();
}

std::string heatmap_svg(const LayerHeatmap& heatmap, const std::string& title) {
  constexpr int kCell = 36, kLeft = 70, kTop = 40;
  const int width = kLeft + static_cast<int>(kNumCategories) * kCell + 20;
  const int height = kTop + heatmap.layer_count * kCell + 40;
  std::ostringstream ss;
  ss << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
     << "\" height=\"" << height << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
  ss << "<text x=\"10\" y=\"20\" font-size=\"14\">" << xml_escape(title) << "</text>\n";
  // Highest layer on top.
  for (int l = heatmap.layer_count - 1; l >= 0; --l) {
    const int y = kTop + (heatmap.layer_count - 1 - l) * kCell;
    ss << "<text x=\"" << kLeft - 6 << "\" y=\"" << y + kCell / 2 + 4
       << "\" text-anchor=\"end\">layer " << l << "</text>\n";
    for (Category c : kAllCategories) {
      const int x = kLeft + (index_of(c) - 1) * kCell;
      const auto v = heatmap.cells[static_cast<std::size_t>(l)][slot_of(c)];
      ss << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << kCell
         << "\" height=\"" << kCell << "\" fill=\"" << (v ? heat_color(*v) : "#DDDDDD")
         << "\" stroke=\"#FFF\"/>\n";
      ss << "<text x=\"" << x + kCell / 2 << "\" y=\"" << y + kCell / 2 + 4
         << "\" text-anchor=\"middle\">" << (v ? num(*v) : std::string("-"))
         << "</text>\n";
    }
  }
  for (Category c : kAllCategories) {
    const int x = kLeft + (index_of(c) - 1) * kCell + kCell / 2;
    ss << "<text x=\"" << x << "\" y=\"" << kTop + heatmap.layer_count * kCell + 16
       << "\" text-anchor=\"middle\">" << label_of(c) << "</text>\n";
  }
  ss << "</svg>\n";
  return ss.str();
}

}  // namespace knowcat
