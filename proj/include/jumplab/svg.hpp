// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

namespace jumplab {

/// Minimal line/scatter plot written straight to SVG text.
class SvgPlot {
public:
    SvgPlot(std::string title, std::string x_label, std::string y_label, bool log_x = false);

    void line(std::vector<double> x, std::vector<double> y, std::string color, double width = 1.0,
              double opacity = 1.0);
    void scatter(std::vector<double> x, std::vector<double> y, std::string color, double radius = 2.0);
    /// Horizontal reference line across the plot.
    void hline(double y, std::string color, std::string label, bool dashed = true);
    /// Points with vertical bars [lo, hi].
    void bars(std::vector<double> x, std::vector<double> y, std::vector<double> lo, std::vector<double> hi,
              std::string color);

    std::string render(int width = 640, int height = 420) const;

private:
    struct Series {
        enum Kind { line, scatter, bars } kind;
        std::vector<double> x, y, lo, hi;
        std::string color;
        double size = 1.0;
        double opacity = 1.0;
    };
    struct HLine {
        double y;
        std::string color, label;
        bool dashed;
    };
    std::string title_, x_label_, y_label_;
    bool log_x_;
    std::vector<Series> series_;
    std::vector<HLine> hlines_;
};

}  // namespace jumplab
