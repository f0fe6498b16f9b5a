#pragma once

#include <cstdio>
#include <string>
#include <vector>

namespace qst {

// Minimal SVG assembly: world coordinates in, y axis up, fixed decimal
// output so files are reproducible byte for byte.
class SvgBuilder {
public:
    SvgBuilder(double min_x, double min_y, double max_x, double max_y, double px_width = 960.0,
               double margin = 40.0)
        : min_x_(min_x), min_y_(min_y), max_y_(max_y), margin_(margin) {
        const double span_x = max_x - min_x;
        const double span_y = max_y - min_y;
        scale_ = (px_width - 2.0 * margin) / (span_x > 0.0 ? span_x : 1.0);
        width_ = px_width;
        height_ = 2.0 * margin + (span_y > 0.0 ? span_y : 1.0) * scale_;
    }

    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke,
                  double stroke_width = 1.0, const std::string& dash = "") {
        if (pts.size() < 2)
            return;
        body_ += "  <polyline fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" +
                 fmt(stroke_width) + "\"";
        if (!dash.empty())
            body_ += " stroke-dasharray=\"" + dash + "\"";
        body_ += " points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i)
                body_ += ' ';
            body_ += fmt(px(pts[i].first)) + ',' + fmt(py(pts[i].second));
        }
        body_ += "\"/>\n";
    }

    void line(double x0, double y0, double x1, double y1, const std::string& stroke,
              double stroke_width = 1.0) {
        body_ += "  <line x1=\"" + fmt(px(x0)) + "\" y1=\"" + fmt(py(y0)) + "\" x2=\"" + fmt(px(x1)) +
                 "\" y2=\"" + fmt(py(y1)) + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
                 fmt(stroke_width) + "\"/>\n";
    }

    void circle(double x, double y, double radius_px, const std::string& fill) {
        body_ += "  <circle cx=\"" + fmt(px(x)) + "\" cy=\"" + fmt(py(y)) + "\" r=\"" +
                 fmt(radius_px) + "\" fill=\"" + fill + "\"/>\n";
    }

    void text(double x, double y, const std::string& s, double size_px = 12.0) {
        body_ += "  <text x=\"" + fmt(px(x)) + "\" y=\"" + fmt(py(y)) + "\" font-size=\"" +
                 fmt(size_px) + "\" font-family=\"sans-serif\">" + s + "</text>\n";
    }

    std::string str() const {
        std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
        out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width_) + "\" height=\"" +
               fmt(height_) + "\">\n";
        out += body_;
        out += "</svg>\n";
        return out;
    }

private:
    static std::string fmt(double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3f", v);
        return buf;
    }

    double px(double x) const { return margin_ + (x - min_x_) * scale_; }
    double py(double y) const { return margin_ + (max_y_ - y) * scale_; }

    double min_x_, min_y_, max_y_, margin_, scale_, width_ = 0.0, height_ = 0.0;
    std::string body_;
};

} // namespace qst
