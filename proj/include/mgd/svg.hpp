#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "mgd/io.hpp"

namespace mgd {

// Minimal SVG composer; plots stay diffable text with no image dependency.
class SvgBuilder {
public:
    SvgBuilder(double width, double height) : w_(width), h_(height) {}

    void line(double x1, double y1, double x2, double y2, const std::string& stroke, double width = 1.0,
              double opacity = 1.0) {
        body_ << "<line x1=\"" << x1 << "\" y1=\"" << y1 << "\" x2=\"" << x2 << "\" y2=\"" << y2 << "\" stroke=\""
              << stroke << "\" stroke-width=\"" << width << "\" opacity=\"" << opacity << "\"/>\n";
    }

    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke, double width = 1.0,
                  double opacity = 1.0) {
        body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << width << "\" opacity=\""
              << opacity << "\" points=\"";
        for (const auto& [x, y] : pts) body_ << x << ',' << y << ' ';
        body_ << "\"/>\n";
    }

    void polygon(const std::vector<std::pair<double, double>>& pts, const std::string& fill,
                 const std::string& stroke, double opacity = 1.0) {
        body_ << "<polygon fill=\"" << fill << "\" stroke=\"" << stroke << "\" opacity=\"" << opacity
              << "\" points=\"";
        for (const auto& [x, y] : pts) body_ << x << ',' << y << ' ';
        body_ << "\"/>\n";
    }

    void circle(double cx, double cy, double r, const std::string& fill, double opacity = 1.0) {
        body_ << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"" << r << "\" fill=\"" << fill
              << "\" opacity=\"" << opacity << "\"/>\n";
    }

    void rect(double x, double y, double w, double h, const std::string& fill, double opacity = 1.0) {
        body_ << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << w << "\" height=\"" << h << "\" fill=\""
              << fill << "\" opacity=\"" << opacity << "\"/>\n";
    }

    void text(double x, double y, const std::string& s, int size = 12, const std::string& fill = "#333") {
        body_ << "<text x=\"" << x << "\" y=\"" << y << "\" font-size=\"" << size
              << "\" font-family=\"sans-serif\" fill=\"" << fill << "\">" << s << "</text>\n";
    }

    std::string str() const {
        std::ostringstream os;
        os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w_
           << "\" height=\"" << h_ << "\" viewBox=\"0 0 " << w_ << ' ' << h_ << "\">\n"
           << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
           << body_.str() << "</svg>\n";
        return os.str();
    }

    void write(const std::string& path) const { atomic_write_text(path, str()); }

private:
    double w_, h_;
    std::ostringstream body_;
};

// Distinct series/class colors.
inline std::string series_color(int i) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                    "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};
    return palette[i % 10];
}

}  // namespace mgd
