#include "hardyflow/portrait.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "hardyflow/exponents.hpp"

namespace hardyflow {

using std::numbers::pi;

namespace {

const char* color(Side s)
{
    switch (s) {
    case Side::unstable_plus: return "#d62728";
    case Side::unstable_minus: return "#ff7f0e";
    case Side::stable_plus: return "#1f77b4";
    case Side::stable_minus: return "#17becf";
    }
    return "#000000";
}

constexpr const char* path_color = "#7f7f7f";

std::string escape(const std::string& s)
{
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

struct Frame {
    double x0, x1, y0, y1;  // data window
    double left, top, w, h;  // pixel box

    double px(double x) const { return left + (x - x0) / (x1 - x0) * w; }
    double py(double y) const { return top + h - (y - y0) / (y1 - y0) * h; }
    bool inside(double x, double y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
};

using Pts = std::vector<std::pair<double, double>>;

// One polyline per run of in-window points.
void polylines(std::string& svg, const Frame& f, const Pts& pts, const std::string& cls, const char* stroke)
{
    std::string run;
    int count = 0;
    const auto flush = [&] {
        if (count >= 2)
            svg += fmt::format("<polyline class=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                               cls, stroke, run);
        run.clear();
        count = 0;
    };
    for (const auto& [x, y] : pts) {
        if (!std::isfinite(x) || !std::isfinite(y) || !f.inside(x, y)) {
            flush();
            continue;
        }
        if (count)
            run += ' ';
        run += fmt::format("{:.2f},{:.2f}", f.px(x), f.py(y));
        ++count;
    }
    flush();
}

}  // namespace

std::string render_portrait(const std::vector<ManifoldCurve>& curves, const std::vector<PortraitPath>& paths,
                            const PortraitStyle& style)
{
    if (curves.empty() && paths.empty())
        throw DomainError("portrait needs at least one curve or trajectory");
    if (style.width < 100 || style.height < 100 || !(style.clip_radius > 0.0))
        throw DomainError("portrait size must be at least 100 px and clip radius positive");

    const bool stripe = style.mode == PortraitMode::stripe;
    Frame f{};
    f.left = 60;
    f.top = style.title.empty() ? 20 : 40;
    f.w = style.width - 200;
    f.h = style.height - f.top - 50;
    if (stripe) {
        f.x0 = -pi;
        f.x1 = pi;
        f.y0 = 0.0;
        f.y1 = style.clip_radius;
    } else {
        double ext = 1e-3;
        const auto grow = [&](double x, double y) {
            if (std::hypot(x, y) <= style.clip_radius)
                ext = std::max({ext, std::fabs(x), std::fabs(y)});
        };
        for (const auto& c : curves)
            for (const auto& s : c.samples)
                grow(s.state.x, s.state.y);
        for (const auto& p : paths)
            for (const auto& s : p.states)
                grow(s.x, s.y);
        for (const auto& m : style.marks)
            grow(m.x, m.y);
        ext *= 1.05;
        f.x0 = f.y0 = -ext;
        f.x1 = f.y1 = ext;
    }

    std::string svg;
    svg += fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
                       style.width, style.height, style.width, style.height);
    svg += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>\n", style.width,
                       style.height);
    if (!style.title.empty())
        svg += fmt::format("<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">{}</text>\n", f.left,
                           escape(style.title));
    svg += fmt::format("<defs><clipPath id=\"plot\"><rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\"/>"
                       "</clipPath></defs>\n",
                       f.left, f.top, f.w, f.h);
    svg += fmt::format("<rect class=\"frame\" x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" "
                       "stroke=\"#000000\"/>\n",
                       f.left, f.top, f.w, f.h);

    // axes
    const auto axis_line = [&](double x0, double y0, double x1, double y1, const char* dash) {
        svg += fmt::format("<line class=\"axis\" x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#999999\"{}/>\n",
                           f.px(x0), f.py(y0), f.px(x1), f.py(y1), dash);
    };
    if (stripe) {
        axis_line(-pi / 2, f.y0, -pi / 2, f.y1, " stroke-dasharray=\"4 3\"");
        axis_line(pi / 2, f.y0, pi / 2, f.y1, " stroke-dasharray=\"4 3\"");
        axis_line(0.0, f.y0, 0.0, f.y1, "");
    } else {
        axis_line(f.x0, 0.0, f.x1, 0.0, "");
        axis_line(0.0, f.y0, 0.0, f.y1, "");
    }
    const auto label = [&](double x, double y, const std::string& text, const char* anchor) {
        svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"11\" "
                           "text-anchor=\"{}\">{}</text>\n",
                           x, y, anchor, escape(text));
    };
    const double bottom = f.top + f.h;
    label(f.left, bottom + 16, fmt::format("{:.3g}", f.x0), "start");
    label(f.left + f.w, bottom + 16, fmt::format("{:.3g}", f.x1), "end");
    label(f.left - 4, bottom, fmt::format("{:.3g}", f.y0), "end");
    label(f.left - 4, f.top + 10, fmt::format("{:.3g}", f.y1), "end");
    label(f.left + f.w / 2, bottom + 32, stripe ? "Theta" : "x", "middle");
    label(f.left - 30, f.top + f.h / 2, stripe ? "R" : "y", "middle");

    svg += "<g clip-path=\"url(#plot)\">\n";
    for (const auto& p : paths) {
        Pts pts;
        for (const auto& s : p.states)
            pts.emplace_back(stripe ? s.phi : s.x, stripe ? s.rho() : s.y);
        polylines(svg, f, pts, "path", path_color);
    }
    for (const auto& c : curves) {
        const std::string side = to_string(c.side);
        if (stripe && !is_unstable(c.side)) {
            for (int j = branch_sign(c.side) > 0 ? 0 : 1; j <= style.shifts; j += 2) {
                const double shift = 2.0 * pi * (j / 2);
                Pts pts;
                for (const auto& s : c.samples)
                    pts.emplace_back(s.theta - shift, s.R);
                polylines(svg, f, pts, fmt::format("curve {} shift-{}", side, j), color(c.side));
            }
            continue;
        }
        Pts pts;
        for (const auto& s : c.samples)
            pts.emplace_back(stripe ? s.theta : s.state.x, stripe ? s.R : s.state.y);
        polylines(svg, f, pts, "curve " + side, color(c.side));
    }
    svg += "</g>\n";

    for (const auto& m : style.marks) {
        const double x = stripe ? std::atan2(m.y, m.x) : m.x;
        const double y = stripe ? std::hypot(m.x, m.y) : m.y;
        if (!f.inside(x, y))
            continue;
        svg += fmt::format("<circle class=\"mark\" cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3.5\" fill=\"#000000\"/>\n", f.px(x),
                           f.py(y));
        label(f.px(x) + 6, f.py(y) - 6, m.label, "start");
    }

    // legend, in a fixed order
    std::vector<std::pair<std::string, const char*>> entries;
    for (Side s : {Side::unstable_plus, Side::unstable_minus, Side::stable_plus, Side::stable_minus})
        if (std::any_of(curves.begin(), curves.end(), [&](const auto& c) { return c.side == s; }))
            entries.emplace_back(to_string(s), color(s));
    if (!paths.empty())
        entries.emplace_back("trajectory", path_color);
    svg += "<g class=\"legend\">\n";
    double ly = f.top + 10;
    for (const auto& [name, col] : entries) {
        const double lx = f.left + f.w + 16;
        svg += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                           lx, ly, lx + 20, ly, col);
        label(lx + 26, ly + 4, name, "start");
        ly += 18;
    }
    svg += "</g>\n</svg>\n";
    return svg;
}

}  // namespace hardyflow
