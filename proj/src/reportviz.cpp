#include "relfix/reportviz.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "relfix/score.hpp"

namespace relfix {
namespace viz {

std::vector<GridPoint> reconstruct_map(const std::vector<std::string>& nodes,
                                       const NodeOrdering& x_order, const NodeOrdering& y_order) {
    if (x_order.rank.size() != nodes.size() || y_order.rank.size() != nodes.size())
        throw DomainError("reconstruct_map: node-set mismatch");
    std::vector<GridPoint> out;
    for (size_t i = 0; i < nodes.size(); ++i)
        out.push_back({nodes[i], x_order.rank[i], y_order.rank[i]});
    return out;
}

MapComparison compare_maps(const std::vector<GridPoint>& recon,
                           const std::vector<GridPoint>& reference) {
    if (recon.size() < 2) throw DomainError("compare_maps: need at least 2 points");
    std::map<std::string, const GridPoint*> ref;
    for (const auto& p : reference) ref[p.object] = &p;
    std::vector<double> rx, ry, fx, fy;
    for (const auto& p : recon) {
        auto it = ref.find(p.object);
        if (it == ref.end()) throw DomainError("compare_maps: node-set mismatch: " + p.object);
        rx.push_back(p.x);
        ry.push_back(p.y);
        fx.push_back(it->second->x);
        fy.push_back(it->second->y);
    }
    // Ranks are permutations (no ties), so Spearman is Pearson on the ranks.
    return {pearson(rx, fx), pearson(ry, fy)};
}

std::string map_csv(const std::vector<GridPoint>& points) {
    std::ostringstream os;
    os << "object,rank_x,rank_y\n";
    for (const auto& p : points) os << p.object << "," << p.x << "," << p.y << "\n";
    return os.str();
}

namespace {
constexpr int kCell = 24;
constexpr int kMargin = 60;
}  // namespace

std::string map_svg(const std::vector<GridPoint>& points, const std::string& title) {
    int n = static_cast<int>(points.size());
    int size = 2 * kMargin + (n > 0 ? n * kCell : kCell);
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
       << "\">\n";
    os << "<text x=\"" << kMargin << "\" y=\"24\" font-size=\"14\">" << title << "</text>\n";
    for (const auto& p : points) {
        int cx = kMargin + (p.x - 1) * kCell + kCell / 2;
        int cy = size - kMargin - (p.y - 1) * kCell - kCell / 2;  // y grows upward
        os << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"3\" fill=\"steelblue\"/>\n";
        os << "<text x=\"" << cx + 5 << "\" y=\"" << cy - 4 << "\" font-size=\"8\">" << p.object
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string energy_trace_csv(const std::vector<std::pair<int, double>>& trace) {
    std::ostringstream os;
    os << "iteration,energy\n";
    char buf[64];
    for (const auto& [it, e] : trace) {
        std::snprintf(buf, sizeof(buf), "%.9g", e);
        os << it << "," << buf << "\n";
    }
    return os.str();
}

std::string sweep_csv(const std::vector<ebm::SweepPoint>& curve) {
    std::ostringstream os;
    os << "reverse_ratio,mean_error_rate\n";
    char buf[64];
    for (const auto& p : curve) {
        std::snprintf(buf, sizeof(buf), "%.4f,%.6f", p.ratio, p.mean_error_rate);
        os << buf << "\n";
    }
    return os.str();
}

std::string sweep_svg(const std::vector<ebm::SweepPoint>& curve, const std::string& title) {
    const int w = 480, h = 320, m = 50;
    double max_x = 0.0, max_y = 0.0;
    for (const auto& p : curve) {
        max_x = std::max(max_x, p.ratio);
        max_y = std::max(max_y, p.mean_error_rate);
    }
    if (max_x <= 0) max_x = 1.0;
    if (max_y <= 0) max_y = 1.0;
    auto px = [&](double x) { return m + x / max_x * (w - 2 * m); };
    auto py = [&](double y) { return h - m - y / max_y * (h - 2 * m); };
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
       << "\">\n";
    os << "<text x=\"" << m << "\" y=\"24\" font-size=\"14\">" << title << "</text>\n";
    os << "<line x1=\"" << m << "\" y1=\"" << h - m << "\" x2=\"" << w - m << "\" y2=\"" << h - m
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << m << "\" y1=\"" << h - m << "\" x2=\"" << m << "\" y2=\"" << m
       << "\" stroke=\"black\"/>\n";
    os << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
    char buf[64];
    for (const auto& p : curve) {
        std::snprintf(buf, sizeof(buf), "%.1f,%.1f ", px(p.ratio), py(p.mean_error_rate));
        os << buf;
    }
    os << "\"/>\n";
    for (const auto& p : curve) {
        std::snprintf(buf, sizeof(buf), "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"3\" fill=\"steelblue\"/>\n",
                      px(p.ratio), py(p.mean_error_rate));
        os << buf;
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace viz
}  // namespace relfix
