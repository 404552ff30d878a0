#pragma once

// Serialization of reports and search results: JSON objects (one per line)
// and RFC-4180-style CSV. All floating output uses 17 significant digits so
// repeated runs are byte-identical.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "reslab/experiments.hpp"
#include "reslab/search.hpp"

namespace reslab::report_io {

inline std::string fmt17(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

// JSON has no NaN literal; ratio of a zero-prediction report serializes null.
inline std::string json_number(double v) {
    if (std::isnan(v) || std::isinf(v)) return "null";
    return fmt17(v);
}

inline std::string to_json_line(const experiments::ExperimentReport& r) {
    std::string s = "{\"name\":\"" + json_escape(r.name) + "\",\"parameters\":{";
    bool first = true;
    for (auto& [k, v] : r.parameters) {
        if (!first) s += ',';
        first = false;
        s += '"' + json_escape(k) + "\":\"" + json_escape(v) + '"';
    }
    s += "},\"observed\":" + json_number(r.observed);
    s += ",\"predicted\":" + json_number(r.predicted);
    s += ",\"ratio\":" + json_number(r.ratio);
    s += ",\"pass\":";
    s += r.pass ? "true" : "false";
    s += ",\"runtime_ms\":" + std::to_string(r.runtime_ms);
    s += ",\"off_paper_regime\":";
    s += r.off_paper_regime ? "true" : "false";
    s += "}";
    return s;
}

inline std::string csv_quote(const std::string& s) {
    bool need = s.find_first_of(",\"\r\n") != std::string::npos;
    if (!need) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

inline std::string reports_to_csv(const std::vector<experiments::ExperimentReport>& reports) {
    std::string out = "name,parameters,observed,predicted,ratio,pass,runtime_ms,off_paper_regime\r\n";
    for (auto& r : reports) {
        std::string params;
        for (auto& [k, v] : r.parameters) {
            if (!params.empty()) params += "; ";
            params += k + "=" + v;
        }
        out += csv_quote(r.name) + ',' + csv_quote(params) + ',' + fmt17(r.observed) + ',' +
               fmt17(r.predicted) + ',' + fmt17(r.ratio) + ',' + (r.pass ? "true" : "false") + ',' +
               std::to_string(r.runtime_ms) + ',' + (r.off_paper_regime ? "true" : "false") + "\r\n";
    }
    return out;
}

inline std::string to_json(const search::SearchResult& r, const search::SearchConfig& cfg) {
    std::string s = "{\"q\":" + std::to_string(cfg.q);
    s += ",\"X\":" + std::to_string(cfg.X);
    s += ",\"threshold_mode\":\"" + std::string(search::threshold_mode_name(cfg.threshold_mode)) + "\"";
    s += ",\"threshold_constant\":" + fmt17(search::threshold_constant_of(cfg));
    s += ",\"threshold\":" + fmt17(r.threshold);
    s += ",\"shortlist_fraction\":" + fmt17(cfg.shortlist_fraction);
    s += ",\"evaluated\":" + std::to_string(r.evaluated);
    s += ",\"S_size\":" + std::to_string(r.S_size);
    s += ",\"coeffs\":{";
    bool first = true;
    for (auto& [label, c] : cfg.coeffs) {
        if (!first) s += ',';
        first = false;
        s += '"' + json_escape(label) + "\":[" + fmt17(c.real()) + ',' + fmt17(c.imag()) + ']';
    }
    s += "},\"exceedances\":[";
    first = true;
    for (auto& [d, v] : r.exceedances) {
        if (!first) s += ',';
        first = false;
        s += "{\"d\":" + std::to_string(d) + ",\"value\":" + fmt17(v) + "}";
    }
    s += "]}";
    return s;
}

inline std::string exceedances_to_csv(const search::SearchResult& r) {
    std::string out = "d,value,threshold\r\n";
    for (auto& [d, v] : r.exceedances)
        out += std::to_string(d) + ',' + fmt17(v) + ',' + fmt17(r.threshold) + "\r\n";
    return out;
}

}  // namespace reslab::report_io
