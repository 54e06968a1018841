// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "jumplab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace jumplab {

namespace {

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

}  // namespace

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label, bool log_x)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)), log_x_(log_x)
{
}

void SvgPlot::line(std::vector<double> x, std::vector<double> y, std::string color, double width, double opacity)
{
    series_.push_back({Series::line, std::move(x), std::move(y), {}, {}, std::move(color), width, opacity});
}

void SvgPlot::scatter(std::vector<double> x, std::vector<double> y, std::string color, double radius)
{
    series_.push_back({Series::scatter, std::move(x), std::move(y), {}, {}, std::move(color), radius, 0.6});
}

void SvgPlot::hline(double y, std::string color, std::string label, bool dashed)
{
    hlines_.push_back({y, std::move(color), std::move(label), dashed});
}

void SvgPlot::bars(std::vector<double> x, std::vector<double> y, std::vector<double> lo, std::vector<double> hi,
                   std::string color)
{
    series_.push_back({Series::bars, std::move(x), std::move(y), std::move(lo), std::move(hi), std::move(color), 3.0, 1.0});
}

std::string SvgPlot::render(int width, int height) const
{
    const double ml = 70, mr = 20, mt = 40, mb = 50;
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    auto tx = [&](double x) { return log_x_ ? std::log10(x) : x; };
    auto take_x = [&](double x) {
        if (!std::isfinite(x) || (log_x_ && !(x > 0))) return;
        x0 = std::min(x0, tx(x));
        x1 = std::max(x1, tx(x));
    };
    auto take_y = [&](double y) {
        if (!std::isfinite(y)) return;
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
    };
    for (const auto& s : series_) {
        for (double x : s.x) take_x(x);
        for (double y : s.y) take_y(y);
        for (double y : s.lo) take_y(y);
        for (double y : s.hi) take_y(y);
    }
    for (const auto& h : hlines_) take_y(h.y);
    if (!(x1 >= x0)) x0 = 0, x1 = 1;
    if (!(y1 >= y0)) y0 = 0, y1 = 1;
    if (x1 == x0) x0 -= 0.5, x1 += 0.5;
    if (y1 == y0) y0 -= 0.5, y1 += 0.5;
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    const double pw = width - ml - mr, ph = height - mt - mb;
    auto px = [&](double x) { return ml + (tx(x) - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return mt + (y1 - y) / (y1 - y0) * ph; };
    auto ok = [&](double x, double y) { return std::isfinite(x) && std::isfinite(y) && (!log_x_ || x > 0); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << num(width / 2.0) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title_)
       << "</text>\n";
    os << "<rect x=\"" << num(ml) << "\" y=\"" << num(mt) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double fx = x0 + (x1 - x0) * k / 4, fy = y0 + (y1 - y0) * k / 4;
        const double sx = ml + pw * k / 4, sy = mt + ph - ph * k / 4;
        os << "<text x=\"" << num(sx) << "\" y=\"" << num(mt + ph + 16) << "\" text-anchor=\"middle\">"
           << tick(log_x_ ? std::pow(10.0, fx) : fx) << "</text>\n";
        os << "<text x=\"" << num(ml - 6) << "\" y=\"" << num(sy + 4) << "\" text-anchor=\"end\">" << tick(fy)
           << "</text>\n";
    }
    os << "<text x=\"" << num(ml + pw / 2) << "\" y=\"" << num(height - 10.0) << "\" text-anchor=\"middle\">"
       << escape(x_label_) << "</text>\n";
    os << "<text x=\"16\" y=\"" << num(mt + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << num(mt + ph / 2) << ")\">" << escape(y_label_) << "</text>\n";

    for (const auto& s : series_) {
        if (s.kind == Series::line) {
            os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"" << num(s.size)
               << "\" stroke-opacity=\"" << num(s.opacity) << "\" points=\"";
            bool first = true;
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!ok(s.x[i], s.y[i])) continue;
                os << (first ? "" : " ") << num(px(s.x[i])) << "," << num(py(s.y[i]));
                first = false;
            }
            os << "\"/>\n";
        } else if (s.kind == Series::scatter) {
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!ok(s.x[i], s.y[i])) continue;
                os << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\"" << num(py(s.y[i])) << "\" r=\"" << num(s.size)
                   << "\" fill=\"" << s.color << "\" fill-opacity=\"" << num(s.opacity) << "\"/>\n";
            }
        } else {
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!ok(s.x[i], s.y[i])) continue;
                const double cx = px(s.x[i]);
                os << "<line x1=\"" << num(cx) << "\" x2=\"" << num(cx) << "\" y1=\"" << num(py(s.lo[i])) << "\" y2=\""
                   << num(py(s.hi[i])) << "\" stroke=\"" << s.color << "\"/>\n";
                os << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(py(s.y[i])) << "\" r=\"" << num(s.size)
                   << "\" fill=\"" << s.color << "\"/>\n";
            }
        }
    }
    for (const auto& h : hlines_) {
        const double y = py(h.y);
        os << "<line x1=\"" << num(ml) << "\" x2=\"" << num(ml + pw) << "\" y1=\"" << num(y) << "\" y2=\"" << num(y)
           << "\" stroke=\"" << h.color << "\"" << (h.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
        os << "<text x=\"" << num(ml + pw - 4) << "\" y=\"" << num(y - 4) << "\" text-anchor=\"end\" fill=\"" << h.color
           << "\">" << escape(h.label) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace jumplab
