#pragma once

// Extreme-value pipeline: rank the twist family by resonator weight |R(d)|^2,
// evaluate |L(1/2, F (x) chi_{8d})| on the top slice, and report the set of d
// exceeding exp(c sqrt(log X / loglog X)) with c = 1/81 (theorem mode), 1/40
// (the section-6 set), or a custom constant.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "reslab/central.hpp"
#include "reslab/characters.hpp"
#include "reslab/errors.hpp"
#include "reslab/parallel.hpp"
#include "reslab/resonator.hpp"

namespace reslab::search {

using characters::CharacterGroup;
using characters::DirichletCharacter;
using cplx = std::complex<double>;

enum class ThresholdMode { theorem, section6, custom };

inline const char* threshold_mode_name(ThresholdMode m) {
    switch (m) {
        case ThresholdMode::theorem: return "theorem";
        case ThresholdMode::section6: return "section6";
        default: return "custom";
    }
}

struct SearchConfig {
    uint64_t q = 0;
    std::map<std::string, cplx> coeffs;  // psi_label -> c_psi
    uint64_t X = 0;
    resonator::ResonatorParams params;
    double shortlist_fraction = 1.0;
    ThresholdMode threshold_mode = ThresholdMode::theorem;
    double threshold_constant = 1.0 / 81.0;  // used in custom mode
    double tol = 1e-8;
    unsigned threads = 1;
};

inline double threshold_constant_of(const SearchConfig& cfg) {
    switch (cfg.threshold_mode) {
        case ThresholdMode::theorem: return 1.0 / 81.0;
        case ThresholdMode::section6: return 1.0 / 40.0;
        default: return cfg.threshold_constant;
    }
}

inline double threshold(const SearchConfig& cfg, uint64_t X) {
    if (X < 16) throw usage_error("threshold: X must be >= 16 (loglog X must be positive)");
    double lX = std::log(static_cast<double>(X));
    return std::exp(threshold_constant_of(cfg) * std::sqrt(lX / std::log(lX)));
}

// psi0 = first character (label order) with a nonzero coefficient; every
// label must name an even, non-quadratic, primitive character mod q.
inline const DirichletCharacter& resolve_psi0(const CharacterGroup& group,
                                              const std::map<std::string, cplx>& coeffs) {
    if (coeffs.empty()) throw usage_error("search: empty coefficient map");
    const DirichletCharacter* psi0 = nullptr;
    for (auto& [label, c] : coeffs) {
        const DirichletCharacter& psi = group.by_label(label);
        characters::require_l_character(psi);
        if (!psi0 && c != cplx(0.0, 0.0)) psi0 = &psi;
    }
    if (!psi0) throw usage_error("search: all coefficients are zero");
    return *psi0;
}

// All valid d in (X, 2X] sorted by |R(d)|^2 descending, ties by ascending d.
inline std::vector<std::pair<uint64_t, double>> rank_by_resonator(const SearchConfig& cfg) {
    CharacterGroup group(static_cast<uint32_t>(cfg.q));
    const DirichletCharacter& psi0 = resolve_psi0(group, cfg.coeffs);
    resonator::ResonatorEval reval(cfg.params, psi0);
    auto d_list = characters::fundamental_d_range(cfg.X, cfg.q);
    std::vector<std::pair<uint64_t, double>> out(d_list.size());
    parallel::for_each_segment(d_list.size(), 4096, cfg.threads, [&](size_t lo, size_t hi) {
        for (size_t i = lo; i < hi; ++i) out[i] = {d_list[i], std::norm(reval.value(d_list[i]))};
    });
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return out;
}

struct SearchResult {
    std::vector<std::pair<uint64_t, double>> exceedances;  // (d, |L_F|), value descending
    double threshold = 0.0;
    uint64_t evaluated = 0;
    uint64_t S_size = 0;
};

inline SearchResult extreme_value_search(const SearchConfig& cfg) {
    if (!(cfg.shortlist_fraction > 0.0) || cfg.shortlist_fraction > 1.0)
        throw usage_error("search: shortlist_fraction must lie in (0, 1]");
    CharacterGroup group(static_cast<uint32_t>(cfg.q));
    auto ranked = rank_by_resonator(cfg);
    if (ranked.empty()) throw usage_error("search: no valid d in (X, 2X]");
    auto n_short = static_cast<size_t>(std::floor(cfg.shortlist_fraction * static_cast<double>(ranked.size())));
    if (cfg.shortlist_fraction == 1.0) n_short = ranked.size();
    if (n_short == 0) throw usage_error("search: empty shortlist");
    if (8 * 2 * cfg.X * cfg.q > central::kOracleConductorMax)
        throw budget_error("search: oracle conductor 8dq exceeds 1e6 at this X");

    SearchResult res;
    res.threshold = threshold(cfg, cfg.X);
    res.evaluated = n_short;
    std::vector<double> values(n_short);
    parallel::for_each_segment(n_short, 16, cfg.threads, [&](size_t lo, size_t hi) {
        for (size_t i = lo; i < hi; ++i)
            values[i] = std::abs(central::combination_value(group, cfg.coeffs, ranked[i].first, cfg.tol));
    });
    for (size_t i = 0; i < n_short; ++i)
        if (values[i] > res.threshold) res.exceedances.emplace_back(ranked[i].first, values[i]);
    std::sort(res.exceedances.begin(), res.exceedances.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    res.S_size = res.exceedances.size();
    return res;
}

}  // namespace reslab::search
