#include "parley/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "parley/csv.hpp"

namespace parley {

namespace {

const char* kPalette[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a",
                          "#66a61e", "#e6ab02", "#a6761d", "#666666"};
const char* kLevelFill[] = {"#cccccc", "#a6d96a", "#ffffbf", "#fdae61", "#d7191c"};

std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&')
            out += "&amp;";
        else if (c == '<')
            out += "&lt;";
        else if (c == '>')
            out += "&gt;";
        else
            out += c;
    }
    return out;
}

std::string num(double v) { return format_fixed(v, 2); }

void header(std::ostringstream& out, int w, int h, const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\""
        << h << "\" viewBox=\"0 0 " << w << " " << h << "\">\n"
        << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n"
        << "<text x=\"16\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">"
        << esc(title) << "</text>\n";
}

}  // namespace

std::string svg_line_chart(
    const std::string& title, const std::vector<std::string>& x_labels,
    const std::vector<std::pair<std::string, std::vector<double>>>& series) {
    const int w = 860, h = 480;
    const double left = 70, right = 180, top = 48, bottom = 60;
    const double plot_w = w - left - right, plot_h = h - top - bottom;

    double lo = 0.0, hi = 1.0;
    bool seen = false;
    for (const auto& [name, values] : series)
        for (double v : values) {
            if (std::isnan(v)) continue;
            if (!seen) lo = hi = v, seen = true;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    if (!seen) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12) hi = lo + 1.0;
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;

    const std::size_t n = x_labels.size();
    auto xpos = [&](std::size_t i) {
        return n <= 1 ? left + plot_w / 2
                      : left + plot_w * static_cast<double>(i) /
                            static_cast<double>(n - 1);
    };
    auto ypos = [&](double v) { return top + plot_h * (1.0 - (v - lo) / (hi - lo)); };

    std::ostringstream out;
    header(out, w, h, title);
    out << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\""
        << num(plot_w) << "\" height=\"" << num(plot_h)
        << "\" fill=\"none\" stroke=\"#999\"/>\n";
    for (int g = 0; g <= 4; ++g) {
        const double v = lo + (hi - lo) * g / 4.0;
        const double y = ypos(v);
        out << "<line x1=\"" << num(left) << "\" y1=\"" << num(y) << "\" x2=\""
            << num(left + plot_w) << "\" y2=\"" << num(y)
            << "\" stroke=\"#eee\"/>\n"
            << "<text x=\"" << num(left - 8) << "\" y=\"" << num(y + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << num(v) << "</text>\n";
    }
    const std::size_t stride = n > 12 ? (n + 11) / 12 : 1;
    for (std::size_t i = 0; i < n; i += stride) {
        out << "<text x=\"" << num(xpos(i)) << "\" y=\"" << num(top + plot_h + 18)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << esc(x_labels[i]) << "</text>\n";
    }
    for (std::size_t s = 0; s < series.size(); ++s) {
        const auto& [name, values] = series[s];
        const char* color = kPalette[s % 8];
        std::string points;
        for (std::size_t i = 0; i < values.size() && i < n; ++i) {
            if (std::isnan(values[i])) {
                if (!points.empty()) {
                    out << "<polyline fill=\"none\" stroke=\"" << color
                        << "\" stroke-width=\"2\" points=\"" << points << "\"/>\n";
                    points.clear();
                }
                continue;
            }
            points += num(xpos(i)) + "," + num(ypos(values[i])) + " ";
            out << "<circle cx=\"" << num(xpos(i)) << "\" cy=\"" << num(ypos(values[i]))
                << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
        if (!points.empty())
            out << "<polyline fill=\"none\" stroke=\"" << color
                << "\" stroke-width=\"2\" points=\"" << points << "\"/>\n";
        const double ly = top + 16.0 * static_cast<double>(s);
        out << "<rect x=\"" << num(left + plot_w + 16) << "\" y=\"" << num(ly)
            << "\" width=\"12\" height=\"12\" fill=\"" << color << "\"/>\n"
            << "<text x=\"" << num(left + plot_w + 34) << "\" y=\"" << num(ly + 10)
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << esc(name)
            << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string svg_bar_chart(const std::string& title,
                          const std::vector<std::string>& labels,
                          const std::vector<double>& values) {
    const int w = 860, h = 480;
    const double left = 80, right = 30, top = 48, bottom = 90;
    const double plot_w = w - left - right, plot_h = h - top - bottom;
    double hi = 1.0;
    for (double v : values)
        if (!std::isnan(v)) hi = std::max(hi, v);

    std::ostringstream out;
    header(out, w, h, title);
    const std::size_t n = std::max<std::size_t>(labels.size(), 1);
    const double slot = plot_w / static_cast<double>(n);
    const double bar = slot * 0.7;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double v = i < values.size() && !std::isnan(values[i]) ? values[i] : 0.0;
        const double bh = plot_h * v / hi;
        const double x = left + slot * static_cast<double>(i) + (slot - bar) / 2;
        out << "<rect x=\"" << num(x) << "\" y=\"" << num(top + plot_h - bh)
            << "\" width=\"" << num(bar) << "\" height=\"" << num(bh)
            << "\" fill=\"" << kPalette[0] << "\"/>\n"
            << "<text x=\"" << num(x + bar / 2) << "\" y=\"" << num(top + plot_h - bh - 4)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
            << format_number(v) << "</text>\n"
            << "<text x=\"" << num(x + bar / 2) << "\" y=\"" << num(top + plot_h + 14)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\" "
               "transform=\"rotate(30 "
            << num(x + bar / 2) << " " << num(top + plot_h + 14) << ")\">"
            << esc(labels[i]) << "</text>\n";
    }
    out << "<line x1=\"" << num(left) << "\" y1=\"" << num(top + plot_h) << "\" x2=\""
        << num(left + plot_w) << "\" y2=\"" << num(top + plot_h)
        << "\" stroke=\"#999\"/>\n</svg>\n";
    return out.str();
}

std::string svg_heatmap_grid(const std::string& title,
                             const std::vector<std::string>& labels,
                             const Eigen::MatrixXd& sims,
                             const Eigen::MatrixXi& levels) {
    const long n = sims.rows();
    const double cell = 80, left = 140, top = 80;
    const int w = static_cast<int>(left + cell * static_cast<double>(n) + 40);
    const int h = static_cast<int>(top + cell * static_cast<double>(n) + 40);

    std::ostringstream out;
    header(out, w, h, title);
    for (long i = 0; i < n; ++i) {
        out << "<text x=\"" << num(left - 8) << "\" y=\"" << num(top + cell * i + cell / 2)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << esc(labels[i]) << "</text>\n"
            << "<text x=\"" << num(left + cell * i + cell / 2) << "\" y=\""
            << num(top - 10)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << esc(labels[i]) << "</text>\n";
        for (long j = 0; j < n; ++j) {
            const int level = levels(i, j);
            const char* fill = kLevelFill[level >= 0 && level <= 4 ? level : 0];
            out << "<rect x=\"" << num(left + cell * j) << "\" y=\"" << num(top + cell * i)
                << "\" width=\"" << num(cell) << "\" height=\"" << num(cell)
                << "\" fill=\"" << fill << "\" stroke=\"white\"/>\n";
            if (!std::isnan(sims(i, j)))
                out << "<text x=\"" << num(left + cell * j + cell / 2) << "\" y=\""
                    << num(top + cell * i + cell / 2 + 4)
                    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
                       "font-size=\"12\">"
                    << num(sims(i, j)) << "</text>\n";
        }
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace parley
