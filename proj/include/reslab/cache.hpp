#pragma once

// Append-only central-value cache. One record per line:
//   q, psi_label, d, Re L, Im L, Lsq_formula, tol
// "nan" marks a field the producing run did not compute. A record serves a
// request only if it carries the needed fields and its tol <= the requested
// tol. Corrupt lines are skipped and counted, never fatal. Single writer.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "reslab/central.hpp"

namespace reslab::cache {

struct CacheRecord {
    uint32_t q = 0;
    std::string psi_label;
    uint64_t d = 0;
    double re = std::numeric_limits<double>::quiet_NaN();
    double im = std::numeric_limits<double>::quiet_NaN();
    double lsq = std::numeric_limits<double>::quiet_NaN();
    double tol = 0.0;

    bool has_oracle() const { return !std::isnan(re) && !std::isnan(im); }
    bool has_formula() const { return !std::isnan(lsq); }
};

class ValueCache {
public:
    ValueCache() = default;
    explicit ValueCache(std::string path) : path_(std::move(path)) { reload(); }

    const std::string& path() const { return path_; }
    size_t size() const { return records_.size(); }
    size_t corrupt_lines() const { return corrupt_; }

    void reload() {
        records_.clear();
        corrupt_ = 0;
        if (path_.empty()) return;
        std::ifstream in(path_);
        if (!in) return;  // absent cache is an empty cache
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto rec = parse_line(line);
            if (rec)
                records_.push_back(*rec);
            else
                ++corrupt_;
        }
    }

    // Best usable record: needed fields present, tol <= requested, smallest tol.
    std::optional<CacheRecord> lookup(uint32_t q, const std::string& label, uint64_t d, double tol,
                                      bool need_oracle, bool need_formula) const {
        const CacheRecord* best = nullptr;
        for (const auto& r : records_) {
            if (r.q != q || r.d != d || r.psi_label != label) continue;
            if (r.tol > tol) continue;
            if (need_oracle && !r.has_oracle()) continue;
            if (need_formula && !r.has_formula()) continue;
            if (!best || r.tol < best->tol) best = &r;
        }
        if (!best) return std::nullopt;
        return *best;
    }

    void append(const CacheRecord& rec) {
        records_.push_back(rec);
        if (path_.empty()) return;
        std::ofstream out(path_, std::ios::app);
        if (!out) throw error("cache: cannot open '" + path_ + "' for append");
        out << format_line(rec) << '\n';
    }

    static std::string format_line(const CacheRecord& r) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%u, %s, %llu, %.17g, %.17g, %.17g, %.17g", r.q,
                      r.psi_label.c_str(), static_cast<unsigned long long>(r.d), r.re, r.im, r.lsq,
                      r.tol);
        return buf;
    }

    static std::optional<CacheRecord> parse_line(const std::string& line) {
        std::vector<std::string> parts;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                parts.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        parts.push_back(cur);
        if (parts.size() != 7) return std::nullopt;
        auto trim = [](std::string s) {
            size_t a = s.find_first_not_of(" \t");
            size_t b = s.find_last_not_of(" \t");
            if (a == std::string::npos) return std::string();
            return s.substr(a, b - a + 1);
        };
        CacheRecord r;
        try {
            size_t pos = 0;
            std::string f0 = trim(parts[0]);
            unsigned long qv = std::stoul(f0, &pos);
            if (pos != f0.size() || qv == 0) return std::nullopt;
            r.q = static_cast<uint32_t>(qv);
            r.psi_label = trim(parts[1]);
            if (r.psi_label.empty()) return std::nullopt;
            std::string f2 = trim(parts[2]);
            unsigned long long dv = std::stoull(f2, &pos);
            if (pos != f2.size() || dv == 0) return std::nullopt;
            r.d = dv;
            auto num = [&](const std::string& s, double& out) {
                std::string t = trim(s);
                if (t == "nan" || t == "-nan") {
                    out = std::numeric_limits<double>::quiet_NaN();
                    return true;
                }
                size_t p = 0;
                out = std::stod(t, &p);
                return p == t.size();
            };
            if (!num(parts[3], r.re) || !num(parts[4], r.im) || !num(parts[5], r.lsq) ||
                !num(parts[6], r.tol))
                return std::nullopt;
            if (!(r.tol > 0.0)) return std::nullopt;
        } catch (...) {
            return std::nullopt;
        }
        return r;
    }

private:
    std::string path_;
    std::vector<CacheRecord> records_;
    size_t corrupt_ = 0;
};

inline CacheRecord to_cache_record(const central::CentralValueRecord& rec) {
    CacheRecord r;
    r.q = rec.q;
    r.psi_label = rec.psi_label;
    r.d = rec.d;
    if (rec.has_oracle) {
        r.re = rec.value_oracle.real();
        r.im = rec.value_oracle.imag();
    }
    if (rec.has_formula) r.lsq = rec.value_sq_formula;
    r.tol = rec.tol;
    return r;
}

}  // namespace reslab::cache
