#include "duio/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace duio {

namespace {

constexpr int kWidth = 760;
constexpr int kHeight = 420;
constexpr int kMarginL = 70, kMarginR = 150, kMarginT = 40, kMarginB = 50;
constexpr size_t kMaxPoints = 1500;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
                          "#bcbd22", "#e377c2"};

double nice_step(double span, int target_ticks) {
    if (span <= 0.0) return 1.0;
    const double raw = span / target_ticks;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= m * mag) return m * mag;
    }
    return 10.0 * mag;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

}  // namespace

void SvgPlot::add_series(std::string name, const std::vector<double>& x,
                         const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("series length mismatch");
    Series s;
    s.name = std::move(name);
    const size_t stride = std::max<size_t>(1, x.size() / kMaxPoints);
    for (size_t i = 0; i < x.size(); i += stride) {
        s.x.push_back(x[i]);
        s.y.push_back(y[i]);
    }
    if (!x.empty() && (x.size() - 1) % stride != 0) {
        s.x.push_back(x.back());
        s.y.push_back(y.back());
    }
    series_.push_back(std::move(s));
}

void SvgPlot::write(const std::string& path) const {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    double ylog_floor = std::numeric_limits<double>::infinity();
    if (log_y_) {
        for (const auto& s : series_)
            for (double v : s.y)
                if (v > 0.0) ylog_floor = std::min(ylog_floor, v);
        if (!std::isfinite(ylog_floor)) ylog_floor = 1e-300;
    }
    auto ty = [&](double v) {
        if (!log_y_) return v;
        return std::log10(std::max(v, ylog_floor * 1e-3));
    };
    for (const auto& s : series_) {
        for (size_t i = 0; i < s.x.size(); ++i) {
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, ty(s.y[i]));
            ymax = std::max(ymax, ty(s.y[i]));
        }
    }
    if (!std::isfinite(xmin)) { xmin = 0; xmax = 1; ymin = 0; ymax = 1; }
    if (xmax <= xmin) xmax = xmin + 1;
    if (ymax <= ymin) ymax = ymin + 1;
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    const double pw = kWidth - kMarginL - kMarginR;
    const double ph = kHeight - kMarginT - kMarginB;
    auto px = [&](double x) { return kMarginL + pw * (x - xmin) / (xmax - xmin); };
    auto py = [&](double y) { return kMarginT + ph * (1.0 - (y - ymin) / (ymax - ymin)); };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write plot file '" + path + "'");
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"15\">"
        << title_ << "</text>\n";

    // axes + ticks
    out << "<rect x=\"" << kMarginL << "\" y=\"" << kMarginT << "\" width=\"" << pw
        << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
    const double xstep = nice_step(xmax - xmin, 6);
    for (double x = std::ceil(xmin / xstep) * xstep; x <= xmax + 1e-12; x += xstep) {
        out << "<line x1=\"" << px(x) << "\" y1=\"" << kMarginT + ph << "\" x2=\"" << px(x)
            << "\" y2=\"" << kMarginT + ph + 5 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << px(x) << "\" y=\"" << kMarginT + ph + 18
            << "\" text-anchor=\"middle\">" << fmt(x) << "</text>\n";
    }
    const double ystep = nice_step(ymax - ymin, 6);
    for (double y = std::ceil(ymin / ystep) * ystep; y <= ymax + 1e-12; y += ystep) {
        out << "<line x1=\"" << kMarginL - 5 << "\" y1=\"" << py(y) << "\" x2=\"" << kMarginL
            << "\" y2=\"" << py(y) << "\" stroke=\"black\"/>\n";
        std::string label = log_y_ ? ("1e" + fmt(y)) : fmt(y);
        out << "<text x=\"" << kMarginL - 8 << "\" y=\"" << py(y) + 4
            << "\" text-anchor=\"end\">" << label << "</text>\n";
    }
    out << "<text x=\"" << kMarginL + pw / 2 << "\" y=\"" << kHeight - 10
        << "\" text-anchor=\"middle\">" << xlabel_ << "</text>\n";
    out << "<text x=\"18\" y=\"" << kMarginT + ph / 2
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << kMarginT + ph / 2
        << ")\">" << ylabel_ << (log_y_ ? " (log)" : "") << "</text>\n";

    // series + legend
    for (size_t k = 0; k < series_.size(); ++k) {
        const auto& s = series_[k];
        const char* color = kPalette[k % (sizeof(kPalette) / sizeof(kPalette[0]))];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
        for (size_t i = 0; i < s.x.size(); ++i)
            out << px(s.x[i]) << "," << py(ty(s.y[i])) << " ";
        out << "\"/>\n";
        const double ly = kMarginT + 14.0 * (k + 1);
        out << "<line x1=\"" << kWidth - kMarginR + 10 << "\" y1=\"" << ly << "\" x2=\""
            << kWidth - kMarginR + 30 << "\" y2=\"" << ly << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << kWidth - kMarginR + 35 << "\" y=\"" << ly + 4 << "\">" << s.name
            << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace duio
