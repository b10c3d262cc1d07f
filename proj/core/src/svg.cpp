#include "fairsim/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace fairsim {

namespace {

constexpr double kWidth = 880.0;
constexpr double kHeight = 520.0;
constexpr double kLeft = 72.0;
constexpr double kRight = 648.0;  // plot area right edge; legend sits beyond
constexpr double kTop = 46.0;
constexpr double kBottom = 462.0;

const char* variant_color(ModelVariant v) {
    switch (v) {
        case ModelVariant::BayesAnalytic: return "#7f7f7f";
        case ModelVariant::BayesDataDriven: return "#2ca02c";
        case ModelVariant::Biased: return "#d62728";
        case ModelVariant::Intervened: return "#1f77b4";
    }
    return "#000000";
}

const char* group_dash(GroupScope g) {
    switch (g) {
        case GroupScope::All: return "";
        case GroupScope::A: return "8,4";
        case GroupScope::B: return "2,3";
    }
    return "";
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

struct SeriesPoint {
    double level;
    double mean;
    double stddev;
};

struct Series {
    ModelVariant variant;
    GroupScope group;
    std::vector<SeriesPoint> points;
};

}  // namespace

std::string figure_svg_text(const std::string& experiment,
                            const std::vector<AggregateRecord>& aggregates, MetricName metric,
                            const std::string& x_label) {
    const bool fidelity_chart = metric == MetricName::Fidelity;
    std::vector<Series> series;
    for (ModelVariant v : {ModelVariant::BayesDataDriven, ModelVariant::Biased,
                           ModelVariant::Intervened}) {
        if (fidelity_chart && v == ModelVariant::BayesDataDriven) continue;
        for (GroupScope g : {GroupScope::All, GroupScope::A, GroupScope::B}) {
            Series s{v, g, {}};
            for (const AggregateRecord& a : aggregates) {
                if (a.metric != metric || a.split != Split::Test) continue;
                if (a.variant != v || a.group != g) continue;
                if (a.count == 0 || !std::isfinite(a.mean)) continue;
                s.points.push_back({a.bias_level, a.mean, a.stddev});
            }
            std::sort(s.points.begin(), s.points.end(),
                      [](const SeriesPoint& x, const SeriesPoint& y) {
                          return x.level < y.level;
                      });
            if (!s.points.empty()) series.push_back(std::move(s));
        }
    }

    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
    double y_lo = std::numeric_limits<double>::infinity(), y_hi = -y_lo;
    for (const Series& s : series) {
        for (const SeriesPoint& p : s.points) {
            x_lo = std::min(x_lo, p.level);
            x_hi = std::max(x_hi, p.level);
            y_lo = std::min(y_lo, p.mean - p.stddev);
            y_hi = std::max(y_hi, p.mean + p.stddev);
        }
    }
    if (series.empty()) {
        x_lo = 0.0;
        x_hi = 1.0;
        y_lo = 0.0;
        y_hi = 1.0;
    }
    if (x_hi == x_lo) {
        x_lo -= 0.5;
        x_hi += 0.5;
    }
    if (y_hi == y_lo) {
        y_lo -= 0.05;
        y_hi += 0.05;
    }
    const double y_pad = 0.05 * (y_hi - y_lo);
    y_lo -= y_pad;
    y_hi += y_pad;

    auto px = [&](double v) { return kLeft + (v - x_lo) / (x_hi - x_lo) * (kRight - kLeft); };
    auto py = [&](double v) { return kBottom - (v - y_lo) / (y_hi - y_lo) * (kBottom - kTop); };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
           num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
           "\" fill=\"white\"/>\n";
    svg += "<text x=\"" + num((kLeft + kRight) / 2) +
           "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">" +
           experiment + ": test " + to_string(metric) + "</text>\n";

    // axes
    svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kBottom) + "\" x2=\"" + num(kRight) +
           "\" y2=\"" + num(kBottom) + "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(kLeft) +
           "\" y2=\"" + num(kBottom) + "\" stroke=\"black\" stroke-width=\"1\"/>\n";

    for (int i = 0; i <= 5; ++i) {
        const double frac = static_cast<double>(i) / 5.0;
        const double xv = x_lo + frac * (x_hi - x_lo);
        const double yv = y_lo + frac * (y_hi - y_lo);
        svg += "<line x1=\"" + num(px(xv)) + "\" y1=\"" + num(kBottom) + "\" x2=\"" +
               num(px(xv)) + "\" y2=\"" + num(kBottom + 5) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + num(px(xv)) + "\" y=\"" + num(kBottom + 20) +
               "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" +
               tick_label(xv) + "</text>\n";
        svg += "<line x1=\"" + num(kLeft - 5) + "\" y1=\"" + num(py(yv)) + "\" x2=\"" +
               num(kLeft) + "\" y2=\"" + num(py(yv)) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + num(kLeft - 9) + "\" y=\"" + num(py(yv) + 4) +
               "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" +
               tick_label(yv) + "</text>\n";
    }
    svg += "<text x=\"" + num((kLeft + kRight) / 2) + "\" y=\"" + num(kBottom + 42) +
           "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">" + x_label +
           "</text>\n";
    svg += "<text x=\"20\" y=\"" + num((kTop + kBottom) / 2) +
           "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
           "transform=\"rotate(-90 20 " +
           num((kTop + kBottom) / 2) + ")\">mean " + std::string(to_string(metric)) +
           "</text>\n";

    for (const Series& s : series) {
        const std::string color = variant_color(s.variant);
        const std::string dash = group_dash(s.group);
        // error bars first so the lines draw over them
        for (const SeriesPoint& p : s.points) {
            const double x = px(p.level);
            const double lo = py(p.mean - p.stddev);
            const double hi = py(p.mean + p.stddev);
            svg += "<line x1=\"" + num(x) + "\" y1=\"" + num(lo) + "\" x2=\"" + num(x) +
                   "\" y2=\"" + num(hi) + "\" stroke=\"" + color +
                   "\" stroke-width=\"1\" opacity=\"0.6\"/>\n";
            svg += "<line x1=\"" + num(x - 3) + "\" y1=\"" + num(lo) + "\" x2=\"" + num(x + 3) +
                   "\" y2=\"" + num(lo) + "\" stroke=\"" + color +
                   "\" stroke-width=\"1\" opacity=\"0.6\"/>\n";
            svg += "<line x1=\"" + num(x - 3) + "\" y1=\"" + num(hi) + "\" x2=\"" + num(x + 3) +
                   "\" y2=\"" + num(hi) + "\" stroke=\"" + color +
                   "\" stroke-width=\"1\" opacity=\"0.6\"/>\n";
        }
        std::string points_attr;
        for (const SeriesPoint& p : s.points) {
            if (!points_attr.empty()) points_attr += ' ';
            points_attr += num(px(p.level)) + "," + num(py(p.mean));
        }
        svg += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.8\"";
        if (!dash.empty()) svg += " stroke-dasharray=\"" + dash + "\"";
        svg += " points=\"" + points_attr + "\"/>\n";
        for (const SeriesPoint& p : s.points)
            svg += "<circle cx=\"" + num(px(p.level)) + "\" cy=\"" + num(py(p.mean)) +
                   "\" r=\"2.5\" fill=\"" + color + "\"/>\n";
    }

    // legend
    double ly = kTop + 6.0;
    for (const Series& s : series) {
        const std::string color = variant_color(s.variant);
        const std::string dash = group_dash(s.group);
        svg += "<line x1=\"" + num(kRight + 16) + "\" y1=\"" + num(ly) + "\" x2=\"" +
               num(kRight + 52) + "\" y2=\"" + num(ly) + "\" stroke=\"" + color +
               "\" stroke-width=\"1.8\"";
        if (!dash.empty()) svg += " stroke-dasharray=\"" + dash + "\"";
        svg += "/>\n";
        svg += "<text x=\"" + num(kRight + 58) + "\" y=\"" + num(ly + 4) +
               "\" font-family=\"sans-serif\" font-size=\"12\">" +
               std::string(to_string(s.variant)) + " (" + to_string(s.group) + ")</text>\n";
        ly += 20.0;
    }

    svg += "</svg>\n";
    return svg;
}

void emit_figure(const std::string& experiment,
                 const std::vector<AggregateRecord>& aggregates, MetricName metric,
                 const std::string& path, const std::string& x_label) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << figure_svg_text(experiment, aggregates, metric, x_label);
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace fairsim
