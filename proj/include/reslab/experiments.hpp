#pragma once

// Desk-scale empirical checks pairing a brute-force quantity with the
// predicted main term: character sums over the twist family, the fourth
// moment growth gate, prime sums of d_psi, the resonator moments, and the
// mixed moment sum'|L|^2 |R|^2 that exhibits the resonance.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "reslab/central.hpp"
#include "reslab/characters.hpp"
#include "reslab/errors.hpp"
#include "reslab/parallel.hpp"
#include "reslab/resonator.hpp"
#include "reslab/specialfn.hpp"

namespace reslab::experiments {

using characters::DirichletCharacter;
using cplx = std::complex<double>;

// Frozen regression constants, measured once on the reference runs
// (q=7, X=1e4, theta=1/3, c_L=1.2; r6 swept over X in {1e4,1e5,1e6}).
inline constexpr double kCharsumErrorK = 5.0;     // declared in the charsum gate
inline constexpr double kMomentR2SlackK = 1.0;    // slack = K X^{-3/8} (log X)^{3/4}
inline constexpr double kMomentR6C = 1.0;         // empirical <= C * envelope
inline constexpr double kFourthMomentEps = 0.5;   // gate (X'/X)^{1+eps}
inline constexpr double kMixedMomentMinRatio = 1.05;
inline constexpr double kMixedMomentSeparation = 0.02;

struct ExperimentReport {
    std::string name;
    std::vector<std::pair<std::string, std::string>> parameters;
    double observed = 0.0;
    double predicted = 0.0;
    double ratio = std::numeric_limits<double>::quiet_NaN();
    bool pass = false;
    int64_t runtime_ms = 0;
    bool off_paper_regime = false;
};

namespace detail {

inline void finish(ExperimentReport& rep, std::chrono::steady_clock::time_point t0) {
    rep.ratio = rep.predicted != 0.0 ? rep.observed / rep.predicted
                                     : std::numeric_limits<double>::quiet_NaN();
    rep.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
}

inline void add_param(ExperimentReport& rep, const std::string& k, const std::string& v) {
    rep.parameters.emplace_back(k, v);
}

inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

// sum'_{X < d <= 2X, (d,2q)=1} chi_{8d}(u) against the Lemma main term
// (X/zeta(2)) prod_{p | 2uq} p/(p+1) (square u; 0 otherwise), with the
// declared error window K u^{1/4} X^{1/2} (log X)^{3/4}.
inline ExperimentReport charsum_experiment(uint64_t u, uint64_t q, uint64_t X, double K = kCharsumErrorK) {
    auto t0 = std::chrono::steady_clock::now();
    if (u == 0 || (u & 1) == 0) throw usage_error("charsum: u must be odd and positive");
    if ((q & 1) == 0) throw usage_error("charsum: q must be odd");
    if (X == 0) throw usage_error("charsum: X must be positive");
    if (X > 100000000ull) throw budget_error("charsum: X exceeds 1e8");
    int64_t sum = 0;
    characters::for_each_fundamental_d(X, q, [&](uint64_t d) {
        sum += characters::kronecker(static_cast<int64_t>(8 * d), static_cast<int64_t>(u));
    });
    ExperimentReport rep;
    rep.name = "charsum";
    uint64_t su = primes::isqrt(u);
    bool square = su * su == u;
    if (square) {
        double main = static_cast<double>(X) / specialfn::kZeta2;
        for (auto& [p, e] : primes::factorize(2 * u * q))
            main *= static_cast<double>(p) / (static_cast<double>(p) + 1.0);
        rep.predicted = main;
    } else {
        rep.predicted = 0.0;
    }
    rep.observed = static_cast<double>(sum);
    double lX = std::log(static_cast<double>(X));
    double gate = K * std::pow(static_cast<double>(u), 0.25) * std::sqrt(static_cast<double>(X)) *
                  std::pow(lX, 0.75);
    rep.pass = std::fabs(rep.observed - rep.predicted) <= gate;
    detail::add_param(rep, "u", std::to_string(u));
    detail::add_param(rep, "q", std::to_string(q));
    detail::add_param(rep, "X", std::to_string(X));
    detail::add_param(rep, "K", detail::num(K));
    detail::add_param(rep, "gate", detail::num(gate));
    detail::add_param(rep, "u_is_square", square ? "true" : "false");
    detail::finish(rep, t0);
    return rep;
}

// Exact mu^2-expansion of the same sum (the identity inside the Lemma's
// proof): sum_{a <= sqrt(2X), (a,2q)=1} mu(a) (8a^2/u) sum_{X/a^2 < b <= 2X/a^2,
// (b,2q)=1} (b/u). Integer-exact; equals the direct sum term by term.
inline int64_t charsum_mu_expansion(uint64_t u, uint64_t q, uint64_t X) {
    if (u == 0 || (u & 1) == 0) throw usage_error("charsum: u must be odd and positive");
    int64_t total = 0;
    for (uint64_t a = 1; a * a <= 2 * X; ++a) {
        if (std::gcd(a, 2 * q) != 1) continue;
        int mu = primes::mobius(a);
        if (mu == 0) continue;
        int chi_a = characters::kronecker(static_cast<int64_t>(8 * a * a), static_cast<int64_t>(u));
        if (chi_a == 0) continue;
        uint64_t lo = X / (a * a), hi = (2 * X) / (a * a);
        int64_t inner = 0;
        for (uint64_t b = lo + 1; b <= hi; ++b) {
            if (std::gcd(b, 2 * q) != 1) continue;
            inner += characters::kronecker(static_cast<int64_t>(b), static_cast<int64_t>(u));
        }
        total += static_cast<int64_t>(mu) * chi_a * inner;
    }
    return total;
}

// Growth gate on sum' (|L(1/2)|^2)^2 across ascending X: each step must stay
// under (X_{i+1}/X_i)^{1+eps} with eps = 1/2.
inline std::vector<ExperimentReport> fourth_moment_scan(const DirichletCharacter& psi,
                                                        const std::vector<uint64_t>& X_list,
                                                        double tol = 1e-8, unsigned threads = 1) {
    characters::require_l_character(psi);
    std::vector<ExperimentReport> out;
    double prev = 0.0;
    uint64_t prev_X = 0;
    for (uint64_t X : X_list) {
        auto t0 = std::chrono::steady_clock::now();
        if (X == 0) throw usage_error("fourth_moment: X must be positive");
        if (prev_X != 0 && X <= prev_X) throw usage_error("fourth_moment: X_list must be ascending");
        auto d_list = characters::fundamental_d_range(X, psi.modulus());
        auto cvs = central::central_value_squared_scan(psi, d_list, tol, threads);
        double observed = 0.0;
        for (double v : cvs) observed += v * v;
        ExperimentReport rep;
        rep.name = "fourth-moment";
        rep.observed = observed;
        if (prev_X == 0) {
            rep.predicted = observed;  // single point: vacuous gate
            rep.pass = true;
        } else {
            double gate = std::pow(static_cast<double>(X) / static_cast<double>(prev_X),
                                   1.0 + kFourthMomentEps);
            rep.predicted = prev * gate;
            rep.pass = observed <= rep.predicted;
            detail::add_param(rep, "gate_factor", detail::num(gate));
        }
        detail::add_param(rep, "q", std::to_string(psi.modulus()));
        detail::add_param(rep, "psi", psi.label());
        detail::add_param(rep, "X", std::to_string(X));
        detail::add_param(rep, "d_count", std::to_string(d_list.size()));
        detail::add_param(rep, "tol", detail::num(tol));
        detail::finish(rep, t0);
        out.push_back(std::move(rep));
        prev = observed;
        prev_X = X;
    }
    return out;
}

// sum_{p <= x} d_psi(p) d_psi'(p): equals (1+o(1)) 2x/log x for psi' = psi;
// the declared cross gate for psi' != psi is |sum| <= 0.2 x/log x.
inline ExperimentReport prime_sum_check(const DirichletCharacter& psi, const DirichletCharacter& psi2,
                                        uint64_t x) {
    auto t0 = std::chrono::steady_clock::now();
    if (psi.modulus() != psi2.modulus()) throw usage_error("prime_sum: mismatched moduli");
    if (x < 2) throw usage_error("prime_sum: x must be >= 2");
    if (x > 100000000ull) throw budget_error("prime_sum: x exceeds 1e8");
    const uint32_t q = psi.modulus();
    std::vector<cplx> d1(q), d2(q);
    for (uint32_t r = 0; r < q; ++r) {
        d1[r] = psi.value(r) + std::conj(psi.value(r));
        d2[r] = psi2.value(r) + std::conj(psi2.value(r));
    }
    cplx sum(0.0, 0.0);
    primes::for_each_prime(x, [&](uint64_t p) { sum += d1[p % q] * d2[p % q]; });
    if (std::fabs(sum.imag()) > 1e-6 * static_cast<double>(x))
        throw convergence_error("prime_sum: unexpected imaginary part");
    ExperimentReport rep;
    rep.name = "prime-sum";
    rep.observed = sum.real();
    const double xl = static_cast<double>(x) / std::log(static_cast<double>(x));
    const bool same = psi.label() == psi2.label();
    if (same) {
        rep.predicted = 2.0 * xl;
        if (x < 1000) {
            rep.pass = true;  // below the declared floor; gate not evaluated
            rep.off_paper_regime = true;
        } else {
            double r = rep.observed / rep.predicted;
            rep.pass = r >= 0.8 && r <= 1.25;
        }
    } else {
        rep.predicted = 0.0;
        rep.pass = std::fabs(rep.observed) <= 0.2 * xl;
        detail::add_param(rep, "normalized", detail::num(rep.observed / xl));
    }
    detail::add_param(rep, "q", std::to_string(q));
    detail::add_param(rep, "psi", psi.label());
    detail::add_param(rep, "psi2", psi2.label());
    detail::add_param(rep, "x", std::to_string(x));
    detail::finish(rep, t0);
    return rep;
}

// h(p^k) = 1 + 1/p + 1/p^2 - d_psi(p)^2/(p(p+1)), independent of k >= 1;
// at p | q the d_psi term vanishes and the value is 1 + 1/p + 1/p^2.
inline double h_function(const DirichletCharacter& psi, uint64_t p) {
    if (!primes::is_prime(p)) throw usage_error("h_function: p must be prime");
    double dp = 0.0;
    if (psi.modulus() % p != 0) dp = 2.0 * psi.value(p).real();
    double pd = static_cast<double>(p);
    return 1.0 + 1.0 / pd + 1.0 / (pd * pd) - dp * dp / (pd * (pd + 1.0));
}

// Mixed moment sum' |L(1/2, psi (x) chi_{8d})|^2 |R(d)|^2 against the
// no-correlation product (sum'|L|^2)(sum'|R|^2)/count. Resonance (psi = psi0)
// pushes the ratio above 1; the psi != psi0 gate compares against the psi0
// ratio (supplied, or recomputed here).
inline ExperimentReport mixed_moment_experiment(const resonator::ResonatorParams& params,
                                                const DirichletCharacter& psi0,
                                                const DirichletCharacter& psi, uint64_t X,
                                                double tol = 1e-8, unsigned threads = 1,
                                                std::optional<double> psi0_ratio = std::nullopt) {
    auto t0 = std::chrono::steady_clock::now();
    characters::require_l_character(psi0);
    characters::require_l_character(psi);
    if (psi.modulus() != psi0.modulus()) throw usage_error("mixed_moment: mismatched moduli");
    auto d_list = characters::fundamental_d_range(X, psi.modulus());
    if (d_list.empty()) throw usage_error("mixed_moment: empty d range");

    resonator::ResonatorEval reval(params, psi0);
    std::vector<double> R2(d_list.size());
    parallel::for_each_segment(d_list.size(), 4096, threads, [&](size_t lo, size_t hi) {
        for (size_t i = lo; i < hi; ++i) R2[i] = std::norm(reval.value(d_list[i]));
    });

    auto ratio_for = [&](const DirichletCharacter& chr) {
        auto cvs = central::central_value_squared_scan(chr, d_list, tol, threads);
        double mixed = 0.0, sum_cvs = 0.0, sum_R2 = 0.0;
        for (size_t i = 0; i < cvs.size(); ++i) {
            mixed += cvs[i] * R2[i];
            sum_cvs += cvs[i];
            sum_R2 += R2[i];
        }
        double predicted = sum_cvs * (sum_R2 / static_cast<double>(cvs.size()));
        return std::pair<double, double>(mixed, predicted);
    };

    auto [observed, predicted] = ratio_for(psi);
    ExperimentReport rep;
    rep.name = "mixed-moment";
    rep.observed = observed;
    rep.predicted = predicted;
    rep.off_paper_regime = params.off_paper_regime;
    double ratio = observed / predicted;
    const bool same = psi.label() == psi0.label();
    if (same) {
        rep.pass = ratio >= kMixedMomentMinRatio;
    } else {
        double ref;
        if (psi0_ratio) {
            ref = *psi0_ratio;
        } else {
            auto [o0, p0] = ratio_for(psi0);
            ref = o0 / p0;
        }
        rep.pass = ratio <= ref - kMixedMomentSeparation;
        detail::add_param(rep, "psi0_ratio", detail::num(ref));
    }
    detail::add_param(rep, "q", std::to_string(psi.modulus()));
    detail::add_param(rep, "psi0", psi0.label());
    detail::add_param(rep, "psi", psi.label());
    detail::add_param(rep, "X", std::to_string(X));
    detail::add_param(rep, "theta", detail::num(params.theta));
    detail::add_param(rep, "c_L", detail::num(params.c_L));
    detail::add_param(rep, "support", std::to_string(reval.support_size()));
    detail::add_param(rep, "d_count", std::to_string(d_list.size()));
    detail::add_param(rep, "tol", detail::num(tol));
    detail::finish(rep, t0);
    return rep;
}

// Resonator moment reports: the |R|^2 main-term bound with frozen slack, the
// |R|^6 envelope with frozen constant, and the literal character-sum
// expansion identity for sum'|R|^2.
inline std::vector<ExperimentReport> resonator_moment_experiment(const resonator::ResonatorParams& params,
                                                                 const DirichletCharacter& psi0, uint64_t X,
                                                                 unsigned threads = 1) {
    std::vector<ExperimentReport> out;
    const uint64_t q = psi0.modulus();

    {
        auto t0 = std::chrono::steady_clock::now();
        auto m2 = resonator::moment_r2(params, psi0, X, threads);
        ExperimentReport rep;
        rep.name = "resonator-moment-r2";
        rep.observed = m2.empirical;
        rep.predicted = m2.reference;
        double slack = kMomentR2SlackK * std::pow(static_cast<double>(X), -0.375) *
                       std::pow(std::log(static_cast<double>(X)), 0.75);
        rep.pass = m2.empirical <= m2.reference * (1.0 + slack);
        rep.off_paper_regime = params.off_paper_regime;
        detail::add_param(rep, "q", std::to_string(q));
        detail::add_param(rep, "X", std::to_string(X));
        detail::add_param(rep, "slack", detail::num(slack));
        detail::add_param(rep, "d_count", std::to_string(m2.count));
        detail::finish(rep, t0);
        out.push_back(std::move(rep));
    }
    {
        auto t0 = std::chrono::steady_clock::now();
        auto m6 = resonator::moment_r6(params, psi0, X, threads);
        ExperimentReport rep;
        rep.name = "resonator-moment-r6";
        rep.observed = m6.empirical;
        rep.predicted = kMomentR6C * m6.reference;
        rep.pass = m6.empirical <= rep.predicted;
        rep.off_paper_regime = params.off_paper_regime;
        detail::add_param(rep, "q", std::to_string(q));
        detail::add_param(rep, "X", std::to_string(X));
        detail::add_param(rep, "C", detail::num(kMomentR6C));
        detail::finish(rep, t0);
        out.push_back(std::move(rep));
    }
    {
        // sum' |R|^2 expanded through sum_{m,n} r(m) r(n) psi0(m) conj(psi0(n))
        // sum' chi_{8d}(mn), the inner sums by brute force
        auto t0 = std::chrono::steady_clock::now();
        auto m2 = resonator::moment_r2(params, psi0, X, threads);
        auto sup = resonator::support(params);
        cplx expansion(0.0, 0.0);
        for (const auto& a : sup) {
            for (const auto& b : sup) {
                cplx w = a.r * b.r * psi0.value(a.n) * std::conj(psi0.value(b.n));
                if (w == cplx(0.0, 0.0)) continue;
                int64_t cs = 0;
                characters::for_each_fundamental_d(X, q, [&](uint64_t d) {
                    cs += characters::kronecker(static_cast<int64_t>(8 * d),
                                                static_cast<int64_t>(a.n * b.n));
                });
                expansion += w * static_cast<double>(cs);
            }
        }
        ExperimentReport rep;
        rep.name = "resonator-moment-identity";
        rep.observed = m2.empirical;
        rep.predicted = expansion.real();
        rep.pass = std::fabs(rep.observed - rep.predicted) <=
                   1e-9 * std::max(std::fabs(rep.predicted), 1.0);
        rep.off_paper_regime = params.off_paper_regime;
        detail::add_param(rep, "q", std::to_string(q));
        detail::add_param(rep, "X", std::to_string(X));
        detail::add_param(rep, "expansion_im", detail::num(expansion.imag()));
        detail::finish(rep, t0);
        out.push_back(std::move(rep));
    }
    return out;
}

}  // namespace reslab::experiments
