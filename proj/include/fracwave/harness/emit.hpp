#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "fracwave/report.hpp"

namespace fracwave::harness {

namespace detail {

inline std::string number(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string json_string(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(ch) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", ch);
                    out += buf;
                } else {
                    out += ch;
                }
        }
    }
    return out + "\"";
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return out + "\"";
}

}  // namespace detail

/// JSON array of checks. Field order is fixed so repeated runs are byte-identical.
inline void write_json(std::ostream& os, const Report& report) {
    using detail::json_string;
    using detail::number;
    os << "[\n";
    for (std::size_t i = 0; i < report.size(); ++i) {
        const auto& c = report[i];
        os << "  {\"id\": " << json_string(c.id) << ", \"anchor\": " << json_string(c.anchor)
           << ", \"kind\": " << json_string(c.kind) << ", \"trend\": " << json_string(to_string(c.trend))
           << ", \"pass\": " << (c.pass ? "true" : "false") << ", \"tolerance\": " << number(c.tolerance)
           << ", \"note\": " << json_string(c.note) << ",\n   \"levels\": [";
        for (std::size_t j = 0; j < c.levels.size(); ++j) {
            const auto& l = c.levels[j];
            os << (j ? ", " : "") << "{\"n\": " << l.n << ", \"k\": " << l.k << ", \"lhs\": " << number(l.lhs)
               << ", \"rhs\": " << number(l.rhs) << ", \"value\": " << number(l.value) << "}";
        }
        os << "]}" << (i + 1 < report.size() ? "," : "") << "\n";
    }
    os << "]\n";
}

/// One row per (check, level); checks without levels get a single row with an empty level.
inline void write_csv(std::ostream& os, const Report& report) {
    using detail::csv_field;
    using detail::number;
    os << "id,anchor,kind,level,n,k,lhs,rhs,value,tolerance,trend,pass,note\n";
    for (const auto& c : report) {
        const std::string tail = "," + number(c.tolerance) + "," + to_string(c.trend) + "," +
                                 (c.pass ? "true" : "false") + "," + csv_field(c.note) + "\n";
        const std::string head = csv_field(c.id) + "," + csv_field(c.anchor) + "," + csv_field(c.kind) + ",";
        if (c.levels.empty()) {
            os << head << ",,,,,," << tail;
            continue;
        }
        for (std::size_t j = 0; j < c.levels.size(); ++j) {
            const auto& l = c.levels[j];
            os << head << j << "," << l.n << "," << l.k << "," << number(l.lhs) << "," << number(l.rhs) << ","
               << number(l.value) << tail;
        }
    }
}

inline void write_report(std::ostream& os, const Report& report, const std::string& format) {
    if (format == "csv") {
        write_csv(os, report);
    } else {
        write_json(os, report);
    }
}

}  // namespace fracwave::harness
