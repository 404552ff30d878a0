#pragma once

// The resonator R(d) = sum_{n <= N} r(n) chi_{8d}(n) psi0(n), where r is
// multiplicative, supported on square-free products of primes in [L^2, L^4]
// with r(p) = L/(sqrt(p) log p), N = X^theta, L = c_L sqrt(log N loglog N).
// Paper schedule: theta = 1/24, c_L = 1/8; desk runs override both and are
// flagged off_paper_regime.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "reslab/characters.hpp"
#include "reslab/errors.hpp"
#include "reslab/parallel.hpp"
#include "reslab/specialfn.hpp"

namespace reslab::resonator {

using cplx = std::complex<double>;
using characters::DirichletCharacter;

struct ResonatorParams {
    uint64_t X = 0;
    double theta = 0.0;
    double c_L = 0.0;
    uint64_t N = 0;
    double L = 0.0;
    double window_lo = 0.0;  // L^2
    double window_hi = 0.0;  // L^4
    std::vector<std::pair<uint32_t, double>> r_table;  // window primes with r(p)
    bool off_paper_regime = false;
};

inline ResonatorParams make_params(uint64_t X, double theta, double c_L) {
    if (X < 16) throw usage_error("make_params: X must be >= 16");
    if (!(theta > 0.0) || !(theta < 0.5)) throw usage_error("make_params: theta must lie in (0, 1/2)");
    if (!(c_L > 0.0)) throw usage_error("make_params: c_L must be positive");
    ResonatorParams p;
    p.X = X;
    p.theta = theta;
    p.c_L = c_L;
    long double n_ld = std::pow(static_cast<long double>(X), static_cast<long double>(theta));
    p.N = static_cast<uint64_t>(std::floor(n_ld + 1e-9L));
    if (p.N < 2) throw degenerate_error("make_params: N = floor(X^theta) < 2");
    double loglogN = std::log(std::log(static_cast<double>(p.N)));
    p.off_paper_regime = std::fabs(theta - 1.0 / 24.0) > 1e-15 || std::fabs(c_L - 0.125) > 1e-15;
    if (p.N < 16) {
        loglogN = std::max(loglogN, 1.0);  // keeps L real in the tiny-N regime
        p.off_paper_regime = true;
    }
    p.L = c_L * std::sqrt(std::log(static_cast<double>(p.N)) * loglogN);
    p.window_lo = p.L * p.L;
    p.window_hi = p.window_lo * p.window_lo;
    if (p.window_lo < 3.0) throw degenerate_error("make_params: L^2 < 3; raise c_L or theta");
    if (p.window_hi > 1e8) throw budget_error("make_params: window top L^4 exceeds 1e8");
    auto ps = primes::simple_sieve(static_cast<uint32_t>(std::floor(p.window_hi)));
    for (uint32_t pr : ps) {
        if (pr < p.window_lo) continue;
        double r = p.L / (std::sqrt(static_cast<double>(pr)) * std::log(static_cast<double>(pr)));
        p.r_table.emplace_back(pr, r);
    }
    return p;
}

// r(n): product of r(p) over p | n if n is square-free and window-smooth,
// else 0. Defined for n <= N.
inline double r_value(const ResonatorParams& params, uint64_t n) {
    if (n == 0) throw usage_error("r_value: n must be positive");
    if (n > params.N) throw usage_error("r_value: n exceeds N");
    double out = 1.0;
    for (auto& [p, rp] : params.r_table) {
        if (uint64_t{p} > n) break;
        if (n % p == 0) {
            n /= p;
            if (n % p == 0) return 0.0;  // square factor
            out *= rp;
        }
    }
    return n == 1 ? out : 0.0;  // leftover factor lies outside the window
}

struct SupportEntry {
    uint64_t n;
    double r;
};

// The support of r below N: all square-free products of window primes,
// ascending. Includes n = 1 with r = 1.
inline std::vector<SupportEntry> support(const ResonatorParams& params) {
    std::vector<SupportEntry> out;
    out.push_back({1, 1.0});
    // DFS over primes in increasing order, product capped at N
    std::vector<std::pair<size_t, std::pair<uint64_t, double>>> stack;
    for (size_t i = 0; i < params.r_table.size(); ++i) {
        auto [p, rp] = params.r_table[i];
        if (uint64_t{p} > params.N) break;
        stack.push_back({i, {p, rp}});
    }
    while (!stack.empty()) {
        auto [idx, nr] = stack.back();
        stack.pop_back();
        out.push_back({nr.first, nr.second});
        for (size_t j = idx + 1; j < params.r_table.size(); ++j) {
            auto [p, rp] = params.r_table[j];
            if (nr.first > params.N / p) break;
            stack.push_back({j, {nr.first * p, nr.second * rp}});
        }
    }
    std::sort(out.begin(), out.end(), [](const SupportEntry& a, const SupportEntry& b) { return a.n < b.n; });
    return out;
}

// Precomputed-support evaluator of R(d).
class ResonatorEval {
public:
    ResonatorEval(const ResonatorParams& params, const DirichletCharacter& psi0) {
        characters::require_l_character(psi0);
        for (const auto& e : support(params)) {
            cplx c = psi0.value(e.n);
            if (c == cplx(0.0, 0.0)) continue;  // q | n terms vanish
            n_.push_back(e.n);
            coef_.push_back(e.r * c);
        }
        q_ = psi0.modulus();
        r_l1_ = 0.0;
        for (const auto& e : support(params)) r_l1_ += e.r;
    }

    uint32_t modulus() const { return q_; }
    size_t support_size() const { return n_.size(); }
    double coefficient_l1() const { return r_l1_; }  // sum_n r(n), a trivial |R| bound

    cplx value(uint64_t d) const {
        cplx s(0.0, 0.0);
        for (size_t i = 0; i < n_.size(); ++i) {
            int ch = characters::kronecker(static_cast<int64_t>(8 * d), static_cast<int64_t>(n_[i]));
            if (ch > 0)
                s += coef_[i];
            else if (ch < 0)
                s -= coef_[i];
        }
        return s;
    }

    double norm2(uint64_t d) const { return std::norm(value(d)); }

private:
    uint32_t q_ = 0;
    std::vector<uint64_t> n_;
    std::vector<cplx> coef_;
    double r_l1_ = 0.0;
};

inline cplx resonator_value(const ResonatorParams& params, const DirichletCharacter& psi0, uint64_t d) {
    characters::require_twist_d(psi0, d);
    return ResonatorEval(params, psi0).value(d);
}

struct MomentResult {
    double empirical = 0.0;
    double reference = 0.0;  // main-term bound (|R|^2) or binomial envelope (|R|^6)
    uint64_t count = 0;      // valid d scanned
};

namespace detail {

template <class F>
MomentResult moment_scan(const ResonatorParams& params, const DirichletCharacter& psi0, uint64_t X,
                         unsigned threads, F&& weight, double reference) {
    if (X > 100000000ull) throw budget_error("resonator moment: X exceeds 1e8");
    ResonatorEval eval(params, psi0);
    auto d_list = characters::fundamental_d_range(X, psi0.modulus());
    MomentResult out;
    out.count = d_list.size();
    out.reference = reference;
    out.empirical = parallel::sum_by_segments(d_list.size(), 4096, threads, [&](size_t i) {
        return weight(std::norm(eval.value(d_list[i])));
    });
    return out;
}

}  // namespace detail

// sum'_{X < d <= 2X} |R(d)|^2 against the main-term bound
// (X/zeta(2)) prod_{L^2 <= p <= L^4} (1 + r(p)^2).
inline MomentResult moment_r2(const ResonatorParams& params, const DirichletCharacter& psi0, uint64_t X,
                              unsigned threads = 1) {
    double bound = static_cast<double>(X) / specialfn::kZeta2;
    for (auto& [p, r] : params.r_table) bound *= 1.0 + r * r;
    return detail::moment_scan(params, psi0, X, threads, [](double w) { return w; }, bound);
}

// sum'_{X < d <= 2X} |R(d)|^6 against the binomial envelope
// X prod (1 + 15 r(p)^2 + 15 r(p)^4 + r(p)^6).
inline MomentResult moment_r6(const ResonatorParams& params, const DirichletCharacter& psi0, uint64_t X,
                              unsigned threads = 1) {
    double env = static_cast<double>(X);
    for (auto& [p, r] : params.r_table) {
        double r2 = r * r;
        env *= 1.0 + r2 * (15.0 + r2 * (15.0 + r2));
    }
    return detail::moment_scan(params, psi0, X, threads, [](double w) { return w * w * w; }, env);
}

}  // namespace reslab::resonator
