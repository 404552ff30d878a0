#pragma once

// Central values of L(s, psi (x) chi_{8d}) at s = 1/2, two independent ways:
// the smoothed square formula
//   |L(1/2)|^2 = 2 sum_n (8d/n) d_psi(n) n^{-1/2} V(pi n / (8dq)),
// and a Hurwitz-zeta oracle
//   L(1/2) = (8dq)^{-1/2} sum_a (psi chi_{8d})(a) zeta(1/2, a/(8dq)),
// plus the root number eps(d) = psi(8d) (8d/q) tau(psi)/sqrt(q).

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "reslab/characters.hpp"
#include "reslab/errors.hpp"
#include "reslab/parallel.hpp"
#include "reslab/specialfn.hpp"

namespace reslab::central {

using cplx = std::complex<double>;
using characters::CharacterGroup;
using characters::DirichletCharacter;

inline constexpr uint64_t kOracleConductorMax = 1000000;  // oracle cost is linear in 8dq
inline constexpr uint64_t kFormulaDqMax = 300000;         // keeps series arrays desk-sized

inline cplx root_number(const DirichletCharacter& psi, uint64_t d) {
    characters::require_l_character(psi);
    characters::require_twist_d(psi, d);
    const uint32_t q = psi.modulus();
    cplx tau = characters::gauss_sum(psi);
    int chi = characters::kronecker(static_cast<int64_t>(8 * d), static_cast<int64_t>(q));
    return psi.value(8 * d % q) * static_cast<double>(chi) * tau / std::sqrt(static_cast<double>(q));
}

namespace detail {

// chi_{8d}(n) for odd square-free d via one Jacobi table mod d:
// (8d/n) = (2/n) * (-1)^{[n=3 mod 4][d=3 mod 4]} * (n mod d / d) for odd n.
struct Chi8dEval {
    explicit Chi8dEval(uint64_t d_in) : d(d_in), jac(d_in) {
        for (uint64_t m = 0; m < d; ++m)
            jac[m] = static_cast<int8_t>(characters::kronecker(static_cast<int64_t>(m), static_cast<int64_t>(d)));
        int8_t r = (d & 3) == 3 ? -1 : 1;
        sign8[0] = sign8[2] = sign8[4] = sign8[6] = 0;
        sign8[1] = 1;
        sign8[3] = static_cast<int8_t>(-r);
        sign8[5] = -1;
        sign8[7] = r;
    }

    int operator()(uint64_t n) const {
        int8_t s = sign8[n & 7];
        return s == 0 ? 0 : s * jac[n % d];
    }

    uint64_t d;
    int8_t sign8[8];
    std::vector<int8_t> jac;
};

// L(1/2) for coefficient table w (indexed mod q) against chi_{8d}.
inline cplx l_half_oracle(uint64_t q, uint64_t d, const std::vector<cplx>& w_mod_q, double tol) {
    const uint64_t c = 8 * d * q;
    if (c > kOracleConductorMax) throw budget_error("oracle: conductor 8dq exceeds 1e6");
    const double per_term = tol / static_cast<double>(c);
    const Chi8dEval chi(d);
    cplx sum(0.0, 0.0);
    for (uint64_t a = 1; a <= c; a += 2) {  // chi_{8d} kills even a
        const cplx& w = w_mod_q[a % q];
        if (w.real() == 0.0 && w.imag() == 0.0) continue;
        int ch = chi(a);
        if (ch == 0) continue;
        double z = specialfn::hurwitz_zeta_half(static_cast<double>(a) / static_cast<double>(c), per_term);
        sum += (ch > 0 ? z : -z) * w;
    }
    return sum / std::sqrt(static_cast<double>(c));
}

}  // namespace detail

// L(1/2, psi (x) chi_{8d}) via the Hurwitz-zeta oracle; O(8dq) zeta values
// each computed to tol/(8dq).
inline cplx oracle_central_value(const DirichletCharacter& psi, uint64_t d, double tol) {
    characters::require_l_character(psi);
    characters::require_twist_d(psi, d);
    if (!(tol > 0.0)) throw usage_error("oracle: tol must be positive");
    const uint32_t q = psi.modulus();
    std::vector<cplx> w(q);
    for (uint32_t a = 0; a < q; ++a) w[a] = psi.value(a);
    return detail::l_half_oracle(q, d, w, tol);
}

// L(1/2, F (x) chi_{8d}) for F = sum c_psi psi over characters mod one q;
// linear in the coefficients, one Hurwitz pass shared by all terms.
inline cplx combination_value(const CharacterGroup& group, const std::map<std::string, cplx>& coeffs,
                              uint64_t d, double tol) {
    if (coeffs.empty()) throw usage_error("combination: empty coefficient map");
    bool any = false;
    const uint32_t q = group.modulus();
    std::vector<cplx> w(q, cplx(0.0, 0.0));
    for (auto& [label, c] : coeffs) {
        const DirichletCharacter& psi = group.by_label(label);
        characters::require_l_character(psi);
        if (c == cplx(0.0, 0.0)) continue;
        any = true;
        for (uint32_t a = 0; a < q; ++a) w[a] += c * psi.value(a);
    }
    if (!any) throw usage_error("combination: all coefficients are zero");
    characters::require_twist_d(group.principal(), d);
    if (!(tol > 0.0)) throw usage_error("combination: tol must be positive");
    return detail::l_half_oracle(q, d, w, tol);
}

struct CvsResult {
    double value = 0.0;
    bool clamped = false;  // raw sum in [-tol, 0) reported as 0
};

// Series engine for |L(1/2, psi (x) chi_{8d})|^2 over many d <= d_max:
// d_psi(n) sieved once (linear sieve, Chebyshev-style recurrence at prime
// powers), chi_{8d} per d from one Jacobi table, V from the shared table.
// The loop stops at min(v_cutoff, n with pi n/(8dq) > 32): beyond that V is
// under 1e-30 and cannot move the accumulator.
class CvsEngine {
public:
    struct Scratch {
        std::vector<int8_t> jac;
    };

    CvsEngine(const DirichletCharacter& psi, uint64_t d_max, double tol)
        : psi_(psi), q_(psi.modulus()), d_max_(d_max), tol_(tol) {
        characters::require_l_character(psi);
        if (d_max == 0) throw usage_error("CvsEngine: d_max must be positive");
        if (!(tol > 0.0) || tol >= 1.0) throw usage_error("CvsEngine: tol must lie in (0,1)");
        if (tol < 1e-10) throw usage_error("CvsEngine: tol below supported minimum 1e-10");
        const uint64_t dq = q_ * d_max;
        if (dq > kFormulaDqMax) throw budget_error("CvsEngine: dq exceeds series budget");
        n_limit_ = std::min(specialfn::v_cutoff(dq, tol * 0.5), x_cut_terms(dq));
        build_dpsi();
        vtab_ = &specialfn::v_weight_table();
    }

    uint64_t n_limit() const { return n_limit_; }
    const DirichletCharacter& psi() const { return psi_; }

    // d must be a valid twist parameter (odd, square-free, coprime to 2q).
    CvsResult value(uint64_t d, Scratch& scratch) const {
        if (d > d_max_) throw usage_error("CvsEngine: d exceeds d_max");
        const uint64_t dq = q_ * d;
        const uint64_t N = std::min({specialfn::v_cutoff(dq, tol_ * 0.5), x_cut_terms(dq), n_limit_});
        const double delta = specialfn::kPi / (8.0 * static_cast<double>(dq));

        scratch.jac.resize(d);
        for (uint64_t m = 0; m < d; ++m)
            scratch.jac[m] =
                static_cast<int8_t>(characters::kronecker(static_cast<int64_t>(m), static_cast<int64_t>(d)));
        const int8_t* jac = scratch.jac.data();
        int8_t r = (d & 3) == 3 ? -1 : 1;
        const int8_t sign8[8] = {0, 1, 0, static_cast<int8_t>(-r), 0, -1, 0, r};

        const double* dpsi = dpsi_.data();
        const specialfn::VWeightTable& vt = *vtab_;
        double sum = 0.0;
        uint64_t m = 1 % d;
        for (uint64_t n = 1; n <= N; n += 2) {
            int coef = sign8[n & 7] * jac[m];
            if (coef != 0) {
                double x = static_cast<double>(n) * delta;
                double term = dpsi[n] * vt.eval(x) / std::sqrt(static_cast<double>(n));
                sum += coef > 0 ? term : -term;
            }
            m += 2;
            while (m >= d) m -= d;  // at most twice (d = 1)
        }
        double out = 2.0 * sum;
        if (out >= 0.0) return {out, false};
        if (out >= -tol_) return {0.0, true};
        throw convergence_error("central_value_squared: result below -tol");
    }

private:
    static uint64_t x_cut_terms(uint64_t dq) {
        return static_cast<uint64_t>(std::floor(specialfn::VWeightTable::kXCut * 8.0 *
                                                static_cast<double>(dq) / specialfn::kPi)) +
               1;
    }

    void build_dpsi() {
        const size_t n = n_limit_;
        std::vector<uint32_t> spf = primes::spf_sieve(static_cast<uint32_t>(n));
        std::vector<uint32_t> pp(n + 1, 0);  // spf-power part of each n
        dpsi_.assign(n + 1, 0.0);
        if (n >= 1) {
            pp[1] = 1;
            dpsi_[1] = 1.0;
        }
        for (size_t i = 2; i <= n; ++i) {
            uint32_t p = spf[i];
            uint32_t rest = static_cast<uint32_t>(i) / p;
            pp[i] = (spf[rest] == p) ? pp[rest] * p : p;
            if (pp[i] == i) {
                if (q_ % p == 0) {
                    dpsi_[i] = 0.0;
                } else if (rest == 1) {
                    int64_t t = psi_.exponent(p);
                    dpsi_[i] = 2.0 * psi_.root(t).real();
                } else {
                    // d(p^e) = d(p) d(p^{e-1}) - d(p^{e-2})
                    double dp = dpsi_[p];
                    dpsi_[i] = dp * dpsi_[rest] - dpsi_[rest / p];
                }
            } else {
                dpsi_[i] = dpsi_[pp[i]] * dpsi_[i / pp[i]];
            }
        }
    }

    DirichletCharacter psi_;
    uint64_t q_;
    uint64_t d_max_;
    double tol_;
    uint64_t n_limit_ = 0;
    std::vector<double> dpsi_;
    const specialfn::VWeightTable* vtab_ = nullptr;
};

inline CvsResult central_value_squared_ex(const DirichletCharacter& psi, uint64_t d, double tol) {
    characters::require_twist_d(psi, d);
    CvsEngine engine(psi, d, tol);
    CvsEngine::Scratch scratch;
    return engine.value(d, scratch);
}

inline double central_value_squared(const DirichletCharacter& psi, uint64_t d, double tol) {
    return central_value_squared_ex(psi, d, tol).value;
}

// Batch |L|^2 over a pre-validated ascending d list; results keyed by index,
// bit-identical for any thread count.
inline std::vector<double> central_value_squared_scan(const DirichletCharacter& psi,
                                                      const std::vector<uint64_t>& d_list, double tol,
                                                      unsigned threads) {
    std::vector<double> out(d_list.size(), 0.0);
    if (d_list.empty()) return out;
    CvsEngine engine(psi, d_list.back(), tol);
    parallel::for_each_segment(d_list.size(), 64, threads, [&](size_t lo, size_t hi) {
        thread_local CvsEngine::Scratch scratch;
        for (size_t i = lo; i < hi; ++i) out[i] = engine.value(d_list[i], scratch).value;
    });
    return out;
}

// Per-(psi, d) record holding both routes to the central value.
struct CentralValueRecord {
    uint32_t q = 0;
    std::string psi_label;
    uint64_t d = 0;
    cplx value_oracle{0.0, 0.0};
    double value_sq_formula = 0.0;
    cplx epsilon{0.0, 0.0};
    double tol = 0.0;
    bool has_oracle = false;
    bool has_formula = false;
    bool formula_clamped = false;
};

enum class Method { formula, oracle, both };

inline CentralValueRecord compute_record(const DirichletCharacter& psi, uint64_t d, double tol, Method method) {
    CentralValueRecord rec;
    rec.q = psi.modulus();
    rec.psi_label = psi.label();
    rec.d = d;
    rec.tol = tol;
    rec.epsilon = root_number(psi, d);
    if (method == Method::formula || method == Method::both) {
        auto r = central_value_squared_ex(psi, d, tol);
        rec.value_sq_formula = r.value;
        rec.formula_clamped = r.clamped;
        rec.has_formula = true;
    }
    if (method == Method::oracle || method == Method::both) {
        rec.value_oracle = oracle_central_value(psi, d, tol);
        rec.has_oracle = true;
    }
    return rec;
}

}  // namespace reslab::central
