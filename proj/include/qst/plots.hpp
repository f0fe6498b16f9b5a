#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "qst/analysis.hpp"
#include "qst/config.hpp"
#include "qst/errors.hpp"
#include "qst/fractal.hpp"
#include "qst/json_io.hpp"
#include "qst/svg.hpp"
#include "qst/topology.hpp"

namespace qst {

// name -> content pairs ready to be written to the output directory
using PlotFiles = std::vector<std::pair<std::string, std::string>>;

namespace detail {

// Curves are sampled on dyadic abscissae where the series are finite and
// exact. Configs without an extension get the unit geometric tail, one
// admissible representative of the infinite family.
inline RatioSequence plot_ratios(const StructureConfig& config) {
    return mu_ratios(config);
}

inline std::string curve_csv(const std::string& header,
                             const std::vector<std::pair<double, double>>& pts) {
    std::string out = header + '\n';
    for (const auto& [x, y] : pts)
        out += csv_number(x) + ',' + csv_number(y) + '\n';
    return out;
}

inline SvgBuilder curve_canvas(const std::vector<std::pair<double, double>>& pts) {
    double lo = 0.0, hi = 0.0;
    for (const auto& [x, y] : pts) {
        (void)x;
        lo = std::min(lo, y);
        hi = std::max(hi, y);
    }
    if (hi - lo < 1e-12) {
        hi += 0.5;
        lo -= 0.5;
    }
    // normalize the value axis onto a unit-wide viewport
    return SvgBuilder(0.0, lo, 1.0, hi, 720.0);
}

} // namespace detail

// Takagi-class curve of the configured ratio family.
inline PlotFiles plot_takagi(const StructureConfig& config, int depth) {
    const RatioSequence ratios = detail::plot_ratios(config);
    std::vector<std::pair<double, double>> pts;
    const std::uint64_t count = std::uint64_t{1} << depth;
    pts.reserve(count + 1);
    for (std::uint64_t k = 0; k <= count; ++k) {
        const DyadicPoint x(k, depth);
        pts.emplace_back(x.value(), takagi_class(x, ratios));
    }
    SvgBuilder svg = detail::curve_canvas(pts);
    svg.line(0.0, 0.0, 1.0, 0.0, "#888888", 0.5);
    svg.polyline(pts, "#1f4e9c", 1.2);
    return {{"takagi.csv", detail::curve_csv("x,g", pts)}, {"takagi.svg", svg.str()}};
}

// Cantor pseudo-inverse staircase over the bases (2r, 2).
inline PlotFiles plot_cantor(double r, int depth) {
    std::vector<std::pair<double, double>> pts;
    const std::uint64_t count = std::uint64_t{1} << depth;
    for (std::uint64_t k = 0; k <= count; ++k) {
        const DyadicPoint x(k, depth);
        if (x.is_one() && !(2.0 * r > 1.0))
            continue; // series diverges at 1 for r <= 1/2
        pts.emplace_back(x.value(), cantor_pseudo_inverse(x, r));
    }
    SvgBuilder svg = detail::curve_canvas(pts);
    svg.line(0.0, 0.0, 1.0, 0.0, "#888888", 0.5);
    svg.polyline(pts, "#9c1f1f", 1.2);
    return {{"cantor.csv", detail::curve_csv("x,c", pts)}, {"cantor.svg", svg.str()}};
}

// J staircase of the configured ratio family.
inline PlotFiles plot_j(const StructureConfig& config, int depth) {
    const RatioSequence ratios = detail::plot_ratios(config);
    std::vector<std::pair<double, double>> pts;
    const std::uint64_t count = std::uint64_t{1} << depth;
    for (std::uint64_t k = 0; k <= count; ++k) {
        const DyadicPoint x(k, depth);
        if (x.is_one()) {
            const auto* tail = std::get_if<GeometricTail>(&ratios.extension());
            if (tail == nullptr || !(2.0 * tail->ratio > 1.0))
                continue;
        }
        pts.emplace_back(x.value(), j_function(x, ratios));
    }
    SvgBuilder svg = detail::curve_canvas(pts);
    svg.line(0.0, 0.0, 1.0, 0.0, "#888888", 0.5);
    svg.polyline(pts, "#1f7a3c", 1.2);
    return {{"j.csv", detail::curve_csv("x,j", pts)}, {"j.svg", svg.str()}};
}

// Undeformed shape in gray, deformed shape in red. Displacements are
// physical (dimensionless values times Y) scaled by `magnify`.
inline PlotFiles plot_deformed(const Topology& topo, const AnalysisResult& analysis, double magnify) {
    std::vector<std::array<double, 2>> moved(topo.nodes.size());
    double min_x = 0.0, max_x = topo.width, min_y = 0.0, max_y = topo.height;
    for (std::size_t i = 0; i < topo.nodes.size(); ++i) {
        const Node& n = topo.nodes[i];
        const std::size_t lvl = static_cast<std::size_t>(n.id.level - 1);
        const std::size_t t = static_cast<std::size_t>(n.id.ordinal - 1);
        moved[i][0] = n.x + magnify * topo.height * analysis.mu[lvl][t];
        moved[i][1] = n.y + magnify * topo.height * analysis.epsilon[lvl][t];
        min_x = std::min(min_x, moved[i][0]);
        max_x = std::max(max_x, moved[i][0]);
        min_y = std::min(min_y, moved[i][1]);
        max_y = std::max(max_y, moved[i][1]);
    }

    SvgBuilder svg(min_x, min_y, max_x, max_y, 960.0);
    for (const Member& m : topo.members) {
        const Node& a = topo.nodes[static_cast<std::size_t>(m.node_a)];
        const Node& b = topo.nodes[static_cast<std::size_t>(m.node_b)];
        svg.line(a.x, a.y, b.x, b.y, "#b0b0b0", 1.0);
    }
    for (const Member& m : topo.members) {
        const auto& a = moved[static_cast<std::size_t>(m.node_a)];
        const auto& b = moved[static_cast<std::size_t>(m.node_b)];
        svg.line(a[0], a[1], b[0], b[1], "#cc2222", 1.2);
    }
    for (const Support& s : topo.supports)
        svg.circle(topo.nodes[static_cast<std::size_t>(s.node)].x,
                   topo.nodes[static_cast<std::size_t>(s.node)].y, 2.5, "#555555");

    std::string csv = "level,ordinal,x_mm,y_mm,x_deformed_mm,y_deformed_mm\n";
    for (std::size_t i = 0; i < topo.nodes.size(); ++i) {
        const Node& n = topo.nodes[i];
        csv += std::to_string(n.id.level) + ',' + std::to_string(n.id.ordinal) + ',' +
               detail::csv_number(n.x) + ',' + detail::csv_number(n.y) + ',' +
               detail::csv_number(moved[i][0]) + ',' + detail::csv_number(moved[i][1]) + '\n';
    }
    return {{"deformed.csv", csv}, {"deformed.svg", svg.str()}};
}

// The per-level families f_epsilon and f_mu drawn over their level axes,
// with the node grid values marked.
inline PlotFiles plot_displacement_functions(const StructureConfig& config,
                                             const AnalysisResult& analysis, int depth,
                                             double magnify) {
    const RatioSequence ratios = detail::plot_ratios(config);
    const int n_levels = config.levels;
    const double width = config.width();
    const double height = config.height;

    std::string csv = "level,x,f_epsilon,f_mu\n";
    SvgBuilder eps_svg(0.0, -0.6 * height, width, 1.1 * height, 960.0);
    SvgBuilder mu_svg(0.0, -0.6 * height, width, 1.1 * height, 960.0);

    for (int n = 1; n <= n_levels + 1; ++n) {
        const double baseline = n <= n_levels ? std::ldexp(height, 1 - n) : 0.0;
        std::vector<std::pair<double, double>> eps_pts, mu_pts;
        const std::uint64_t count = std::uint64_t{1} << depth;
        for (std::uint64_t k = 0; k <= count; ++k) {
            const DyadicPoint x(k, depth);
            // member levels only span [1/2^n, 1 - 1/2^n]
            if (n <= n_levels) {
                const DyadicPoint lo(1, n);
                if (x.value() < lo.value() || x.value() > 1.0 - lo.value())
                    continue;
            }
            const double fe = f_epsilon(n, x, config, ratios);
            const double fm = f_mu(n, x, config, ratios);
            csv += std::to_string(n) + ',' + detail::csv_number(x.value()) + ',' +
                   detail::csv_number(fe) + ',' + detail::csv_number(fm) + '\n';
            eps_pts.emplace_back(x.value() * width, baseline + magnify * height * fe);
            mu_pts.emplace_back(x.value() * width, baseline + magnify * height * fm);
        }
        eps_svg.line(0.0, baseline, width, baseline, "#cccccc", 0.5);
        mu_svg.line(0.0, baseline, width, baseline, "#cccccc", 0.5);
        eps_svg.polyline(eps_pts, "#1f4e9c", 1.0);
        mu_svg.polyline(mu_pts, "#9c1f9c", 1.0);

        // node markers
        const int per_level = n <= n_levels ? (1 << (n - 1)) : (1 << (n_levels - 1)) + 1;
        for (int t = 1; t <= per_level; ++t) {
            const DyadicPoint x = node_abscissa(n_levels, n, t);
            const std::size_t lvl = static_cast<std::size_t>(n - 1);
            const std::size_t ti = static_cast<std::size_t>(t - 1);
            eps_svg.circle(x.value() * width, baseline + magnify * height * analysis.epsilon[lvl][ti],
                           2.0, "#1f4e9c");
            mu_svg.circle(x.value() * width, baseline + magnify * height * analysis.mu[lvl][ti], 2.0,
                          "#9c1f9c");
        }
    }
    return {{"displacements.csv", csv},
            {"f_epsilon.svg", eps_svg.str()},
            {"f_mu.svg", mu_svg.str()}};
}

} // namespace qst
