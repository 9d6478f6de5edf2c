#pragma once

#include "relfix/ebm.hpp"
#include "relfix/relmodel.hpp"

namespace relfix {
namespace viz {

struct GridPoint {
    std::string object;
    int x = 0;  // rank on the X axis, 1..N
    int y = 0;  // rank on the Y axis, 1..N
};

// Place each object at (rank_x, rank_y); graph fixing yields only orders, so
// the map is a rank grid.
std::vector<GridPoint> reconstruct_map(const std::vector<std::string>& nodes,
                                       const NodeOrdering& x_order, const NodeOrdering& y_order);

struct MapComparison {
    double spearman_x = 0.0;
    double spearman_y = 0.0;
};

MapComparison compare_maps(const std::vector<GridPoint>& recon,
                           const std::vector<GridPoint>& reference);

std::string map_csv(const std::vector<GridPoint>& points);
// Deterministic labeled scatter; byte-identical for identical inputs.
std::string map_svg(const std::vector<GridPoint>& points, const std::string& title);

std::string energy_trace_csv(const std::vector<std::pair<int, double>>& trace);
std::string sweep_csv(const std::vector<ebm::SweepPoint>& curve);
std::string sweep_svg(const std::vector<ebm::SweepPoint>& curve, const std::string& title);

}  // namespace viz
}  // namespace relfix
