#pragma once

// Run reports: one row per check, rendered both as human-readable text and
// as JSON carrying the same content.

#include <string>
#include <vector>

namespace duio {

struct ReportRow {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;  // relative unless note says otherwise
    std::string note;
    bool has_values = false;  // rows without numeric content print verdict only
};

struct RunReport {
    std::string command;
    std::vector<ReportRow> rows;
    std::vector<std::string> outputs;  // files written

    void add(std::string name, bool pass, std::string note = "");
    void add_value(std::string name, double measured, double expected,
                   double rel_tol, std::string note = "");
    bool all_pass() const;
    std::string render_text() const;
    std::string render_json() const;
};

}  // namespace duio
