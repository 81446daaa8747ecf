#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qmegs/bench.hpp"

namespace qmegs::bench {

namespace {

// fixed two-decimal pixel coordinates keep the output byte-deterministic
std::string px(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 2);
    return std::string(buf, res.ptr);
}

double quantile(std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    if (v.empty()) return std::nan("");
    if (v.size() == 1) return v[0];
    const double pos = p * (v.size() - 1);
    const std::size_t i = static_cast<std::size_t>(pos);
    if (i + 1 >= v.size()) return v.back();
    const double frac = pos - static_cast<double>(i);
    return v[i] * (1 - frac) + v[i + 1] * frac;
}

struct SeriesPoint {
    double x;
    double y;
    double y_lo;
    double y_hi;
};

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf"};

std::string tick_label(int exp10) {
    std::ostringstream os;
    os << "1e" << exp10;
    return os.str();
}

} // namespace

std::string records_to_svg(const std::vector<SweepRecord>& records, CostAxis axis) {
    // group records by algorithm and schedule depth
    std::map<std::string, std::map<double, std::vector<const SweepRecord*>>> groups;
    for (const SweepRecord& r : records) groups[r.algorithm][r.depth].push_back(&r);

    const double floor_val = 1e-16; // log scale cannot show exact zeros
    std::map<std::string, std::vector<SeriesPoint>> series;
    std::vector<std::string> skipped;

    for (const auto& [algo, by_depth] : groups) {
        std::vector<SeriesPoint> pts;
        for (const auto& [depth, recs] : by_depth) {
            std::vector<double> errs, costs;
            for (const SweepRecord* r : recs) {
                const double c = (axis == CostAxis::TMax) ? r->t_max : r->t_total;
                if (std::isfinite(r->error) && std::isfinite(c) && c > 0)
                    errs.push_back(std::max(r->error, floor_val)), costs.push_back(c);
            }
            if (errs.empty()) continue;
            SeriesPoint p;
            p.x = quantile(costs, 0.5);
            p.y = quantile(errs, 0.5);
            p.y_lo = quantile(errs, 0.25);
            p.y_hi = quantile(errs, 0.75);
            pts.push_back(p);
        }
        if (pts.empty())
            skipped.push_back(algo);
        else
            series[algo] = std::move(pts);
    }

    const double width = 720, height = 520;
    const double ml = 80, mr = 170, mt = 45, mb = 65;
    const double pw = width - ml - mr, ph = height - mt - mb;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    const std::string axis_name = (axis == CostAxis::TMax) ? "T_max" : "T_total";
    svg << "<text x=\"" << px(ml) << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">"
        << "median error vs " << axis_name << " (band: interquartile range)</text>\n";

    if (series.empty()) {
        svg << "<text x=\"" << px(width / 2 - 40) << "\" y=\"" << px(height / 2)
            << "\" font-family=\"sans-serif\" font-size=\"14\">no data</text>\n";
        for (std::size_t i = 0; i < skipped.size(); ++i)
            svg << "<text x=\"" << px(ml) << "\" y=\"" << px(height - 12 - 14.0 * i)
                << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#a00\">warning: series '"
                << skipped[i] << "' skipped (all records failed)</text>\n";
        svg << "</svg>\n";
        return svg.str();
    }

    double lx_min = 1e300, lx_max = -1e300, ly_min = 1e300, ly_max = -1e300;
    for (const auto& [algo, pts] : series)
        for (const SeriesPoint& p : pts) {
            lx_min = std::min(lx_min, std::log10(p.x));
            lx_max = std::max(lx_max, std::log10(p.x));
            ly_min = std::min(ly_min, std::log10(p.y_lo));
            ly_max = std::max(ly_max, std::log10(p.y_hi));
        }
    if (lx_max - lx_min < 0.5) {
        lx_min -= 0.25;
        lx_max += 0.25;
    }
    if (ly_max - ly_min < 0.5) {
        ly_min -= 0.25;
        ly_max += 0.25;
    }
    lx_min -= 0.05 * (lx_max - lx_min);
    lx_max += 0.05 * (lx_max - lx_min);
    ly_min -= 0.05 * (ly_max - ly_min);
    ly_max += 0.05 * (ly_max - ly_min);

    auto sx = [&](double x) { return ml + pw * (std::log10(x) - lx_min) / (lx_max - lx_min); };
    auto sy = [&](double y) { return mt + ph * (ly_max - std::log10(y)) / (ly_max - ly_min); };

    // frame
    svg << "<rect x=\"" << px(ml) << "\" y=\"" << px(mt) << "\" width=\"" << px(pw)
        << "\" height=\"" << px(ph) << "\" fill=\"none\" stroke=\"#333\"/>\n";

    // decade ticks
    for (int e = static_cast<int>(std::ceil(lx_min)); e <= static_cast<int>(std::floor(lx_max));
         ++e) {
        const double x = sx(std::pow(10.0, e));
        svg << "<line x1=\"" << px(x) << "\" y1=\"" << px(mt) << "\" x2=\"" << px(x) << "\" y2=\""
            << px(mt + ph) << "\" stroke=\"#ddd\"/>\n";
        svg << "<text x=\"" << px(x - 12) << "\" y=\"" << px(mt + ph + 18)
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << tick_label(e) << "</text>\n";
    }
    for (int e = static_cast<int>(std::ceil(ly_min)); e <= static_cast<int>(std::floor(ly_max));
         ++e) {
        const double y = sy(std::pow(10.0, e));
        svg << "<line x1=\"" << px(ml) << "\" y1=\"" << px(y) << "\" x2=\"" << px(ml + pw)
            << "\" y2=\"" << px(y) << "\" stroke=\"#ddd\"/>\n";
        svg << "<text x=\"" << px(ml - 42) << "\" y=\"" << px(y + 4)
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << tick_label(e) << "</text>\n";
    }
    svg << "<text x=\"" << px(ml + pw / 2 - 24) << "\" y=\"" << px(height - 16)
        << "\" font-family=\"sans-serif\" font-size=\"14\">" << axis_name << "</text>\n";
    svg << "<text x=\"18\" y=\"" << px(mt + ph / 2)
        << "\" font-family=\"sans-serif\" font-size=\"14\" transform=\"rotate(-90 18 "
        << px(mt + ph / 2) << ")\">error</text>\n";

    int color_idx = 0;
    double legend_y = mt + 10;
    for (const auto& [algo, pts] : series) {
        const char* color = kPalette[color_idx % 7];
        ++color_idx;

        if (pts.size() >= 2) {
            svg << "<path d=\"M";
            for (const SeriesPoint& p : pts) svg << " " << px(sx(p.x)) << " " << px(sy(p.y_hi));
            for (auto it = pts.rbegin(); it != pts.rend(); ++it)
                svg << " L " << px(sx(it->x)) << " " << px(sy(it->y_lo));
            svg << " Z\" fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
        }

        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (const SeriesPoint& p : pts) svg << px(sx(p.x)) << "," << px(sy(p.y)) << " ";
        svg << "\"/>\n";
        for (const SeriesPoint& p : pts)
            svg << "<circle cx=\"" << px(sx(p.x)) << "\" cy=\"" << px(sy(p.y))
                << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";

        svg << "<rect x=\"" << px(ml + pw + 14) << "\" y=\"" << px(legend_y - 9)
            << "\" width=\"12\" height=\"12\" fill=\"" << color << "\"/>\n";
        svg << "<text x=\"" << px(ml + pw + 32) << "\" y=\"" << px(legend_y + 2)
            << "\" font-family=\"sans-serif\" font-size=\"13\">" << algo << "</text>\n";
        legend_y += 20;
    }

    for (std::size_t i = 0; i < skipped.size(); ++i)
        svg << "<text x=\"" << px(ml) << "\" y=\"" << px(height - 34 - 14.0 * i)
            << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#a00\">warning: series '"
            << skipped[i] << "' skipped (all records failed)</text>\n";

    svg << "</svg>\n";
    return svg.str();
}

} // namespace qmegs::bench
