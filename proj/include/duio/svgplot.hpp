#pragma once

// Minimal SVG line-plot writer for the simulation outputs. Series are
// downsampled to keep files small; axes get nice-number ticks.

#include <string>
#include <vector>

namespace duio {

class SvgPlot {
public:
    SvgPlot(std::string title, std::string xlabel, std::string ylabel)
        : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {}

    void set_log_y(bool on) { log_y_ = on; }
    void add_series(std::string name, const std::vector<double>& x,
                    const std::vector<double>& y);
    void write(const std::string& path) const;

private:
    struct Series {
        std::string name;
        std::vector<double> x, y;
    };
    std::string title_, xlabel_, ylabel_;
    bool log_y_ = false;
    std::vector<Series> series_;
};

}  // namespace duio
