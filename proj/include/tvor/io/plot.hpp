#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tvor/error.hpp"
#include "tvor/io/csv.hpp"
#include "tvor/io/report.hpp"

namespace tvor::io {

enum class PlotKind { dtv_vs_n, digit_profile, sweep, gc_curve };
enum class PlotFormat { csv, svg };

inline std::optional<PlotKind> parse_plot_kind(std::string_view s) noexcept {
    if (s == "dtv-vs-n") return PlotKind::dtv_vs_n;
    if (s == "digit-profile") return PlotKind::digit_profile;
    if (s == "sweep") return PlotKind::sweep;
    if (s == "gc-curve") return PlotKind::gc_curve;
    return std::nullopt;
}

inline std::string_view to_string(PlotKind k) noexcept {
    switch (k) {
    case PlotKind::dtv_vs_n: return "dtv-vs-n";
    case PlotKind::digit_profile: return "digit-profile";
    case PlotKind::sweep: return "sweep";
    case PlotKind::gc_curve: return "gc-curve";
    }
    return "unknown";
}

inline constexpr std::size_t fitted_curve_samples = 64;

namespace detail {

inline const Json& require_block(const Json& report, const char* name, PlotKind kind) {
    if (!report.contains(name) || report[name].is_null()) {
        throw InvalidArgument("report has no '" + std::string(name) + "' block needed for the " +
                              std::string(to_string(kind)) + " plot");
    }
    return report[name];
}

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf) == "-0.00" ? "0.00" : buf;
}

inline std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    bool log = false;

    double map(double v, double px_lo, double px_hi) const {
        double t;
        if (log) {
            t = (std::log10(std::max(v, 1e-300)) - std::log10(lo)) / (std::log10(hi) - std::log10(lo));
        } else {
            t = (v - lo) / (hi - lo);
        }
        return px_lo + t * (px_hi - px_lo);
    }
};

inline Axis make_axis(const std::vector<double>& values, bool log) {
    Axis a;
    a.log = log;
    if (values.empty()) return a;
    auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    a.lo = *lo;
    a.hi = *hi;
    if (log) {
        a.lo = std::max(a.lo, 1e-12);
        a.hi = std::max(a.hi, a.lo * 10.0);
        a.lo = std::pow(10.0, std::floor(std::log10(a.lo)));
        a.hi = std::pow(10.0, std::ceil(std::log10(a.hi)));
    } else {
        if (a.lo > 0.0) a.lo = 0.0;
        if (a.hi <= a.lo) a.hi = a.lo + 1.0;
    }
    return a;
}

/// Fixed-size canvas with a plot frame and axis captions.
class SvgCanvas {
public:
    static constexpr double width = 640, height = 400;
    static constexpr double left = 70, right = 620, top = 40, bottom = 340;

    SvgCanvas(std::string_view title, std::string_view xlabel, std::string_view ylabel) {
        out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n";
        out_ << "<rect x=\"0\" y=\"0\" width=\"640\" height=\"400\" fill=\"white\"/>\n";
        out_ << "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
             << xml_escape(title) << "</text>\n";
        out_ << "<rect x=\"70\" y=\"40\" width=\"550\" height=\"300\" fill=\"none\" stroke=\"black\"/>\n";
        out_ << "<text x=\"345\" y=\"385\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
             << xml_escape(xlabel) << "</text>\n";
        out_ << "<text x=\"16\" y=\"190\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
                "transform=\"rotate(-90 16 190)\">"
             << xml_escape(ylabel) << "</text>\n";
    }

    double x(const Axis& a, double v) const { return a.map(v, left, right); }
    double y(const Axis& a, double v) const { return a.map(v, bottom, top); }

    void axis_labels(const Axis& ax, const Axis& ay) {
        tick_text(left, bottom + 16, "middle", ax.lo);
        tick_text(right, bottom + 16, "middle", ax.hi);
        tick_text(left - 6, bottom + 4, "end", ay.lo);
        tick_text(left - 6, top + 4, "end", ay.hi);
    }

    void circle(double cx, double cy, double r, std::string_view fill) {
        out_ << "<circle cx=\"" << fmt(cx) << "\" cy=\"" << fmt(cy) << "\" r=\"" << fmt(r) << "\" fill=\"" << fill
             << "\" stroke=\"black\" stroke-width=\"0.5\"/>\n";
    }

    void rect(double x0, double y0, double w, double h, std::string_view fill) {
        out_ << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y0) << "\" width=\"" << fmt(w) << "\" height=\""
             << fmt(h) << "\" fill=\"" << fill << "\"/>\n";
    }

    void polyline(const std::vector<std::pair<double, double>>& pts, std::string_view stroke) {
        out_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i) out_ << ' ';
            out_ << fmt(pts[i].first) << ',' << fmt(pts[i].second);
        }
        out_ << "\"/>\n";
    }

    void text(double tx, double ty, std::string_view anchor, std::string_view s) {
        out_ << "<text x=\"" << fmt(tx) << "\" y=\"" << fmt(ty) << "\" text-anchor=\"" << anchor
             << "\" font-family=\"sans-serif\" font-size=\"10\">" << xml_escape(s) << "</text>\n";
    }

    std::string finish() {
        out_ << "</svg>\n";
        return out_.str();
    }

private:
    void tick_text(double tx, double ty, std::string_view anchor, double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", v);
        text(tx, ty, anchor, buf);
    }

    std::ostringstream out_;
};

// dtv-vs-n ------------------------------------------------------------------

struct Point {
    double x, y;
};

inline std::vector<Point> fitted_curve(double a, double b, double n_min, double n_max) {
    std::vector<Point> pts;
    const double lo = std::log(std::max(n_min, 1.0));
    const double hi = std::log(std::max(n_max, n_min + 1.0));
    for (std::size_t k = 0; k < fitted_curve_samples; ++k) {
        const double n = std::exp(lo + (hi - lo) * static_cast<double>(k) / (fitted_curve_samples - 1));
        pts.push_back({n, a * n + b * std::sqrt(n)});
    }
    return pts;
}

inline std::string plot_dtv_vs_n(const Json& report, PlotFormat format) {
    const auto& scores = require_block(report, "scores", PlotKind::dtv_vs_n);
    const auto& model = require_block(report, "model", PlotKind::dtv_vs_n);
    std::vector<Point> obs;
    for (const auto& s : scores) obs.push_back({s["N"].get<double>(), s["dtv"].get<double>()});
    if (obs.empty()) throw InvalidArgument("dtv-vs-n plot needs at least one score");
    const double a = model["a"].get<double>(), b = model["b"].get<double>();
    double n_min = obs.front().x, n_max = obs.front().x;
    for (const auto& p : obs) {
        n_min = std::min(n_min, p.x);
        n_max = std::max(n_max, p.x);
    }
    const auto curve = fitted_curve(a, b, n_min, n_max);

    if (format == PlotFormat::csv) {
        std::ostringstream out;
        out << "series,N,value\n";
        for (const auto& p : obs) out << "observed," << format_number(p.x) << ',' << format_number(p.y) << '\n';
        for (const auto& p : curve) out << "fitted," << format_number(p.x) << ',' << format_number(p.y) << '\n';
        return out.str();
    }
    std::vector<double> xs, ys;
    for (const auto& p : obs) {
        xs.push_back(p.x);
        ys.push_back(p.y);
    }
    for (const auto& p : curve) ys.push_back(p.y);
    const auto ax = make_axis(xs, true);
    const auto ay = make_axis(ys, false);
    SvgCanvas svg("DTV against histogram size", "N (log scale)", "DTV");
    svg.axis_labels(ax, ay);
    for (const auto& p : obs) svg.circle(svg.x(ax, p.x), svg.y(ay, p.y), 2.5, "steelblue");
    std::vector<std::pair<double, double>> line;
    for (const auto& p : curve) line.emplace_back(svg.x(ax, p.x), svg.y(ay, p.y));
    svg.polyline(line, "firebrick");
    return svg.finish();
}

// digit-profile ----------------------------------------------------------------

inline std::vector<std::pair<std::string, std::vector<double>>> digit_series(const Json& report) {
    std::vector<std::pair<std::string, std::vector<double>>> series;
    const auto take = [](const Json& profile) {
        std::vector<double> v;
        for (const auto& c : profile["counts_by_last_digit"]) v.push_back(c.get<double>());
        return v;
    };
    if (report.contains("digit_profile")) {
        series.emplace_back("count", take(report["digit_profile"]));
    } else if (report.contains("substitution")) {
        series.emplace_back("before", take(report["substitution"]["digit_profile_before"]));
        series.emplace_back("after", take(report["substitution"]["digit_profile_after"]));
    } else {
        require_block(report, "digit_profile", PlotKind::digit_profile);
    }
    return series;
}

inline std::string plot_digit_profile(const Json& report, PlotFormat format) {
    const auto series = digit_series(report);
    if (format == PlotFormat::csv) {
        std::ostringstream out;
        out << "digit";
        for (const auto& [name, v] : series) out << ',' << name;
        out << '\n';
        for (std::size_t d = 0; d < 10; ++d) {
            out << d;
            for (const auto& [name, v] : series) out << ',' << format_number(v[d]);
            out << '\n';
        }
        return out.str();
    }
    std::vector<double> all{0.0};
    for (const auto& [name, v] : series) all.insert(all.end(), v.begin(), v.end());
    const auto ay = make_axis(all, false);
    const Axis ax{0.0, 10.0, false};
    SvgCanvas svg("Last-digit profile", "last digit", "count");
    svg.axis_labels(ax, ay);
    static constexpr const char* colors[] = {"steelblue", "darkorange"};
    const double slot = (SvgCanvas::right - SvgCanvas::left) / 10.0;
    const double bar = slot * 0.8 / static_cast<double>(series.size());
    for (std::size_t d = 0; d < 10; ++d) {
        for (std::size_t s = 0; s < series.size(); ++s) {
            const double x0 = SvgCanvas::left + slot * d + slot * 0.1 + bar * s;
            const double y0 = svg.y(ay, series[s].second[d]);
            svg.rect(x0, y0, bar, SvgCanvas::bottom - y0, colors[s % 2]);
        }
        svg.text(SvgCanvas::left + slot * (d + 0.5), SvgCanvas::bottom + 28, "middle", std::to_string(d));
    }
    return svg.finish();
}

// sweep -------------------------------------------------------------------------

inline std::string plot_sweep(const Json& report, PlotFormat format) {
    const auto& sweep = require_block(report, "sweep", PlotKind::sweep);
    if (format == PlotFormat::csv) {
        std::ostringstream out;
        out << "threshold,included,top_label\n";
        for (const auto& e : sweep) {
            out << e["threshold"].get<Count>() << ',' << e["included"].get<std::size_t>() << ',';
            if (!e["top_label"].is_null()) out << csv_escape(e["top_label"].get<std::string>());
            out << '\n';
        }
        return out.str();
    }
    std::vector<double> xs, ys;
    std::string leader;
    for (const auto& e : sweep) {
        xs.push_back(e["threshold"].get<double>());
        ys.push_back(e["included"].get<double>());
        if (leader.empty() && !e["top_label"].is_null()) leader = e["top_label"].get<std::string>();
    }
    const auto ax = make_axis(xs, true);
    const auto ay = make_axis(ys, false);
    SvgCanvas svg("Threshold sweep (filled: top label is " + leader + ")", "size threshold (log scale)",
                  "histograms kept");
    svg.axis_labels(ax, ay);
    for (const auto& e : sweep) {
        const bool skipped = e["top_label"].is_null();
        const bool is_leader = !skipped && e["top_label"].get<std::string>() == leader;
        svg.circle(svg.x(ax, e["threshold"].get<double>()), svg.y(ay, e["included"].get<double>()), 3.0,
                   skipped ? "lightgray" : (is_leader ? "firebrick" : "white"));
    }
    return svg.finish();
}

// gc-curve ----------------------------------------------------------------------

inline std::string plot_gc_curve(const Json& report, PlotFormat format) {
    const auto& curve = require_block(report, "convergence", PlotKind::gc_curve);
    if (format == PlotFormat::csv) {
        std::ostringstream out;
        out << "N,mean_abs_deviation,std_error\n";
        for (const auto& p : curve) {
            out << p["N"].get<Count>() << ',' << format_number(p["mean_abs_deviation"].get<double>()) << ','
                << format_number(p["std_error"].get<double>()) << '\n';
        }
        return out.str();
    }
    std::vector<double> xs, ys;
    for (const auto& p : curve) {
        xs.push_back(p["N"].get<double>());
        ys.push_back(p["mean_abs_deviation"].get<double>());
    }
    const auto ax = make_axis(xs, true);
    const auto ay = make_axis(ys, true);
    SvgCanvas svg("Mean |DTV/N - theoretical DTV| against sample size", "N (log scale)", "deviation (log scale)");
    svg.axis_labels(ax, ay);
    std::vector<std::pair<double, double>> line;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        line.emplace_back(svg.x(ax, xs[i]), svg.y(ay, ys[i]));
        svg.circle(line.back().first, line.back().second, 3.0, "steelblue");
    }
    svg.polyline(line, "steelblue");
    return svg.finish();
}

}  // namespace detail

/// Renders one block of a report as plot data.
inline std::string emit_plot_data(const Json& report, PlotKind kind, PlotFormat format) {
    switch (kind) {
    case PlotKind::dtv_vs_n: return detail::plot_dtv_vs_n(report, format);
    case PlotKind::digit_profile: return detail::plot_digit_profile(report, format);
    case PlotKind::sweep: return detail::plot_sweep(report, format);
    case PlotKind::gc_curve: return detail::plot_gc_curve(report, format);
    }
    throw InvalidArgument("unknown plot kind");
}

}  // namespace tvor::io
