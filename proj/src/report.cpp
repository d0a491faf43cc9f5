#include "duio/report.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

namespace duio {

void RunReport::add(std::string name, bool pass, std::string note) {
    ReportRow row;
    row.name = std::move(name);
    row.pass = pass;
    row.note = std::move(note);
    rows.push_back(std::move(row));
}

void RunReport::add_value(std::string name, double measured, double expected,
                          double rel_tol, std::string note) {
    ReportRow row;
    row.name = std::move(name);
    row.measured = measured;
    row.expected = expected;
    row.tolerance = rel_tol;
    row.has_values = true;
    row.pass = std::abs(measured - expected) <=
               rel_tol * std::max(std::abs(expected), 1e-300);
    row.note = std::move(note);
    rows.push_back(std::move(row));
}

bool RunReport::all_pass() const {
    for (const auto& r : rows)
        if (!r.pass) return false;
    return true;
}

std::string RunReport::render_text() const {
    std::ostringstream os;
    os << "== " << command << " ==\n";
    for (const auto& r : rows) {
        os << (r.pass ? "[PASS] " : "[FAIL] ") << r.name;
        if (r.has_values) {
            os.precision(6);
            os << ": " << r.measured << " (expected " << r.expected
               << ", rel tol " << r.tolerance << ")";
        }
        if (!r.note.empty()) os << "  -- " << r.note;
        os << "\n";
    }
    for (const auto& f : outputs) os << "wrote " << f << "\n";
    os << (all_pass() ? "ALL PASS" : "FAILURES PRESENT") << "\n";
    return os.str();
}

std::string RunReport::render_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["all_pass"] = all_pass();
    nlohmann::json rowsj = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json rj;
        rj["name"] = r.name;
        rj["pass"] = r.pass;
        if (r.has_values) {
            rj["measured"] = r.measured;
            rj["expected"] = r.expected;
            rj["rel_tol"] = r.tolerance;
        }
        if (!r.note.empty()) rj["note"] = r.note;
        rowsj.push_back(std::move(rj));
    }
    j["rows"] = std::move(rowsj);
    j["outputs"] = outputs;
    return j.dump(1);
}

}  // namespace duio
