#pragma once

#include <string>
#include <utility>
#include <vector>

#include "knowcat/metrics.hpp"
#include "knowcat/transitions.hpp"

namespace knowcat {

// Plot-ready tables. Every table lists categories in display order 1.HK..6.CU
// and carries the category label, name and color so an external plotter
// needs nothing else.

using LabeledDistribution = std::pair<std::string, CategoryDistribution>;

// Tidy rows: series,category_index,category,name,color,count,ratio
std::string category_bars_csv(const std::vector<LabeledDistribution>& series);

// Tidy rows: source_category,name,color,support,upgrade,downgrade,stable
std::string transition_bars_csv(const TransitionMatrix& matrix);

// Tidy rows: layer,category_index,category,support,mean_p_truth
std::string heatmap_csv(const LayerHeatmap& heatmap);

// Static vector images.
std::string stacked_bars_svg(const std::vector<LabeledDistribution>& series,
                             const std::string& title);
std::string heatmap_svg(const LayerHeatmap& heatmap, const std::string& title);

}  // namespace knowcat
