#pragma once

// Dirichlet characters of odd modulus q, built by CRT over the prime-power
// factors of q. Each factor group (Z/p^k)^* is cyclic; characters are labeled
// by their exponent vector at the smallest primitive roots, and values carry
// exact integer exponents k/L (L = lcm of the factor orders) so parity/order
// tests are integer-exact.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "reslab/errors.hpp"
#include "reslab/primes.hpp"

namespace reslab::characters {

using cplx = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Kronecker symbol (a/n), total except (0,0).
inline int kronecker(int64_t a, int64_t n) {
    if (n == 0) {
        if (a == 0) throw usage_error("kronecker: (0/0) undefined");
        return (a == 1 || a == -1) ? 1 : 0;
    }
    int k = 1;
    if (n < 0) {
        n = -n;
        if (a < 0) k = -k;
    }
    int v = 0;
    while ((n & 1) == 0) {
        n >>= 1;
        ++v;
    }
    if (v > 0) {
        if ((a & 1) == 0) return 0;
        // (a/2) = (-1)^((a^2-1)/8); a&7 yields the nonnegative residue mod 8
        if ((v & 1) && ((a & 7) == 3 || (a & 7) == 5)) k = -k;
    }
    a %= n;
    if (a < 0) a += n;
    while (a != 0) {
        v = 0;
        while ((a & 1) == 0) {
            a >>= 1;
            ++v;
        }
        if ((v & 1) && ((n & 7) == 3 || (n & 7) == 5)) k = -k;
        if ((a & 3) == 3 && (n & 3) == 3) k = -k;  // reciprocity flip
        int64_t t = a;
        a = n % t;
        n = t;
    }
    return n == 1 ? k : 0;
}

// chi_{8d}(n) = (8d/n) for odd square-free d.
inline int chi_8d(uint64_t d, uint64_t n) {
    if (d == 0 || (d & 1) == 0) throw usage_error("chi_8d: d must be odd and positive");
    if (!primes::is_squarefree(d)) throw usage_error("chi_8d: d must be square-free");
    return kronecker(static_cast<int64_t>(8 * d), static_cast<int64_t>(n));
}

class CharacterGroup;

class DirichletCharacter {
public:
    uint32_t modulus() const { return q_; }
    const std::string& label() const { return label_; }
    const std::vector<uint32_t>& label_exponents() const { return exp_vec_; }
    uint32_t order() const { return order_; }
    uint32_t conductor() const { return conductor_; }
    bool is_even() const { return even_; }
    bool is_primitive() const { return conductor_ == q_; }
    bool is_principal() const { return order_ == 1; }
    bool is_quadratic() const { return order_ == 2; }

    // Group exponent L: values are exp(2*pi*i * t / L) with t = exponent(n).
    uint32_t group_exponent() const { return group_exponent_; }

    // Exact exponent of psi(n) as a multiple of 1/L, or -1 off the units.
    int64_t exponent(uint64_t n) const { return exps_[n % q_]; }

    cplx value(uint64_t n) const { return values_[n % q_]; }
    cplx value_signed(int64_t n) const {
        int64_t r = n % static_cast<int64_t>(q_);
        if (r < 0) r += q_;
        return values_[static_cast<size_t>(r)];
    }
    const std::vector<cplx>& values() const { return values_; }

    // exp(2*pi*i*k/L) for integer k.
    cplx root(int64_t k) const {
        int64_t r = k % group_exponent_;
        if (r < 0) r += group_exponent_;
        return std::polar(1.0, kTwoPi * static_cast<double>(r) / group_exponent_);
    }

private:
    friend class CharacterGroup;
    uint32_t q_ = 0;
    uint32_t order_ = 1;
    uint32_t conductor_ = 1;
    uint32_t group_exponent_ = 1;
    bool even_ = true;
    std::string label_;
    std::vector<uint32_t> exp_vec_;
    std::vector<int32_t> exps_;  // length q, -1 off units
    std::vector<cplx> values_;   // length q, 0 off units
};

namespace detail {

struct Factor {
    uint32_t p = 0;
    uint32_t pk = 0;        // p^k
    uint32_t phi = 0;       // phi(p^k)
    uint32_t gen = 0;       // smallest primitive root mod p^k
    std::vector<int32_t> dlog;  // residue -> discrete log base gen, -1 off units
};

inline uint32_t find_primitive_root(uint32_t p, uint32_t k) {
    uint32_t phi_p = p - 1;
    auto fac = primes::factorize(phi_p);
    auto is_root_mod_p = [&](uint32_t g) {
        for (auto& [r, e] : fac)
            if (primes::detail::powmod(g, phi_p / r, p) == 1) return false;
        return true;
    };
    uint32_t g = 2;
    while (!is_root_mod_p(g)) ++g;
    if (k > 1) {
        // g generates mod p^k iff g^{p-1} != 1 mod p^2
        uint64_t p2 = uint64_t{p} * p;
        if (primes::detail::powmod(g, p - 1, p2) == 1) g += p;
    }
    return g;
}

inline Factor make_factor(uint32_t p, uint32_t k) {
    Factor f;
    f.p = p;
    f.pk = 1;
    for (uint32_t i = 0; i < k; ++i) f.pk *= p;
    f.phi = (f.pk / p) * (p - 1);
    f.gen = find_primitive_root(p, k);
    f.dlog.assign(f.pk, -1);
    uint64_t pw = 1;
    for (uint32_t e = 0; e < f.phi; ++e) {
        f.dlog[pw] = static_cast<int32_t>(e);
        pw = pw * f.gen % f.pk;
    }
    return f;
}

}  // namespace detail

// The full character group mod odd q > 1, enumerated in ascending label order.
class CharacterGroup {
public:
    explicit CharacterGroup(uint32_t q) : q_(q) {
        if (q <= 1 || (q & 1) == 0) throw usage_error("character group: q must be odd and > 1");
        if (q > 1000000) throw budget_error("character group: q > 1e6");
        for (auto& [p, k] : primes::factorize(q))
            factors_.push_back(detail::make_factor(static_cast<uint32_t>(p), k));
        group_exponent_ = 1;
        phi_ = 1;
        for (auto& f : factors_) {
            group_exponent_ = static_cast<uint32_t>(std::lcm<uint64_t>(group_exponent_, f.phi));
            phi_ *= f.phi;
        }
        // per-residue exponent vectors, then one pass per character
        std::vector<uint32_t> stride(factors_.size());
        build_characters();
    }

    uint32_t modulus() const { return q_; }
    uint32_t size() const { return phi_; }
    uint32_t group_exponent() const { return group_exponent_; }
    const std::vector<DirichletCharacter>& characters() const { return chars_; }

    const DirichletCharacter& principal() const { return chars_.front(); }

    const DirichletCharacter& by_label(const std::string& label) const {
        for (auto& c : chars_)
            if (c.label() == label) return c;
        throw usage_error("no character with label '" + label + "' mod " + std::to_string(q_));
    }

    const DirichletCharacter& conjugate(const DirichletCharacter& psi) const {
        std::vector<uint32_t> e = psi.label_exponents();
        for (size_t i = 0; i < e.size(); ++i)
            e[i] = e[i] == 0 ? 0 : factors_[i].phi - e[i];
        return chars_[index_of(e)];
    }

    std::vector<const DirichletCharacter*> even_nonquadratic_primitive() const {
        std::vector<const DirichletCharacter*> out;
        for (auto& c : chars_)
            if (c.is_even() && !c.is_quadratic() && !c.is_principal() && c.is_primitive())
                out.push_back(&c);
        return out;
    }

private:
    size_t index_of(const std::vector<uint32_t>& e) const {
        size_t idx = 0;
        for (size_t i = 0; i < factors_.size(); ++i) idx = idx * factors_[i].phi + e[i];
        return idx;
    }

    void build_characters() {
        const size_t m = factors_.size();
        // dlogs[i][n] for n mod q reduced into factor i
        std::vector<std::vector<int32_t>> dlogs(m, std::vector<int32_t>(q_));
        for (size_t i = 0; i < m; ++i)
            for (uint32_t n = 0; n < q_; ++n) dlogs[i][n] = factors_[i].dlog[n % factors_[i].pk];
        std::vector<cplx> roots(group_exponent_);
        for (uint32_t j = 0; j < group_exponent_; ++j)
            roots[j] = std::polar(1.0, kTwoPi * static_cast<double>(j) / group_exponent_);

        chars_.resize(phi_);
        std::vector<uint32_t> e(m, 0);
        for (uint32_t idx = 0; idx < phi_; ++idx) {
            DirichletCharacter& c = chars_[idx];
            c.q_ = q_;
            c.group_exponent_ = group_exponent_;
            c.exp_vec_ = e;
            c.label_ = make_label(e);
            c.exps_.assign(q_, -1);
            c.values_.assign(q_, cplx(0.0, 0.0));
            for (uint32_t n = 0; n < q_; ++n) {
                uint64_t t = 0;
                bool unit = true;
                for (size_t i = 0; i < m; ++i) {
                    int32_t dl = dlogs[i][n];
                    if (dl < 0) {
                        unit = false;
                        break;
                    }
                    t += uint64_t{e[i]} * static_cast<uint64_t>(dl) % factors_[i].phi *
                         (group_exponent_ / factors_[i].phi);
                }
                if (!unit) continue;
                auto tt = static_cast<int32_t>(t % group_exponent_);
                c.exps_[n] = tt;
                c.values_[n] = roots[tt];
            }
            // order = lcm over factors of phi_i / gcd(a_i, phi_i)
            uint64_t ord = 1;
            for (size_t i = 0; i < m; ++i)
                ord = std::lcm(ord, uint64_t{factors_[i].phi} / std::gcd<uint64_t>(e[i], factors_[i].phi));
            c.order_ = static_cast<uint32_t>(ord);
            c.even_ = c.exps_[q_ - 1] == 0;
            // conductor = product of local conductors: smallest p^j with
            // local order dividing phi(p^j)
            uint64_t cond = 1;
            for (size_t i = 0; i < m; ++i) {
                uint64_t o = uint64_t{factors_[i].phi} / std::gcd<uint64_t>(e[i], factors_[i].phi);
                if (o == 1) continue;
                uint64_t pj = factors_[i].p, phij = factors_[i].p - 1;
                while (phij % o != 0) {
                    pj *= factors_[i].p;
                    phij *= factors_[i].p;
                }
                cond *= pj;
            }
            c.conductor_ = static_cast<uint32_t>(cond);
            // odometer: last component fastest -> ascending label order
            for (size_t i = m; i-- > 0;) {
                if (++e[i] < factors_[i].phi) break;
                e[i] = 0;
            }
        }
    }

    static std::string make_label(const std::vector<uint32_t>& e) {
        std::string s;
        for (size_t i = 0; i < e.size(); ++i) {
            if (i) s += '.';
            s += std::to_string(e[i]);
        }
        return s;
    }

    uint32_t q_;
    uint32_t phi_ = 1;
    uint32_t group_exponent_ = 1;
    std::vector<detail::Factor> factors_;
    std::vector<DirichletCharacter> chars_;
};

inline std::vector<DirichletCharacter> character_group(uint32_t q) {
    return CharacterGroup(q).characters();
}

// Validation helpers shared by the L-value machinery.

inline void require_twist_d(const DirichletCharacter& psi, uint64_t d) {
    if (d == 0 || (d & 1) == 0) throw usage_error("twist d must be odd and positive");
    if (std::gcd<uint64_t>(d, psi.modulus()) != 1) throw usage_error("twist d must be coprime to q");
    if (!primes::is_squarefree(d)) throw usage_error("twist d must be square-free");
}

inline void require_l_character(const DirichletCharacter& psi) {
    if (!psi.is_even()) throw usage_error("psi must be even");
    if (psi.is_quadratic() || psi.is_principal()) throw usage_error("psi must be non-quadratic and non-principal");
    if (!psi.is_primitive()) throw usage_error("psi must be primitive");
}

// A validated pair (psi, d) naming psi (x) chi_{8d}, of conductor 8dq.
struct TwistSpec {
    DirichletCharacter psi;
    uint64_t d;
    uint64_t conductor;

    TwistSpec(const DirichletCharacter& psi_in, uint64_t d_in) : psi(psi_in), d(d_in) {
        require_twist_d(psi_in, d_in);
        if (!psi_in.is_even()) throw usage_error("TwistSpec: psi must be even");
        conductor = 8 * d * psi.modulus();
    }
};

// Gauss sum tau(psi) = sum_a psi(a) e(a/q); |tau| = sqrt(q) for primitive psi.
inline cplx gauss_sum_raw(const DirichletCharacter& psi) {
    const uint32_t q = psi.modulus();
    cplx s(0.0, 0.0);
    for (uint32_t a = 1; a < q; ++a) {
        cplx v = psi.value(a);
        if (v == cplx(0.0, 0.0)) continue;
        s += v * std::polar(1.0, kTwoPi * static_cast<double>(a) / q);
    }
    return s;
}

inline cplx gauss_sum(const DirichletCharacter& psi) {
    if (!psi.is_primitive()) throw usage_error("gauss_sum: psi must be primitive");
    return gauss_sum_raw(psi);
}

// d_psi(n) = sum_{ab=n} psi(a) conj(psi(b)); multiplicative, real-valued.
// Factors n by trial division; n beyond max_n is rejected.
inline cplx d_psi(const DirichletCharacter& psi, uint64_t n, uint64_t max_n = 10000000) {
    if (n == 0) throw usage_error("d_psi: n must be positive");
    if (n > max_n) throw budget_error("d_psi: n exceeds factorization bound");
    cplx out(1.0, 0.0);
    for (auto& [p, e] : primes::factorize(n)) {
        int64_t t = psi.exponent(p);
        if (t < 0) return cplx(0.0, 0.0);  // p | q kills every divisor pair
        cplx local(0.0, 0.0);
        for (uint32_t j = 0; j <= e; ++j)
            local += psi.root(t * (2 * static_cast<int64_t>(j) - static_cast<int64_t>(e)));
        out *= local;
    }
    return out;
}

// Square-free odd d in (X, 2X] with gcd(d, 2q) = 1, ascending, via a
// segmented sieve of prime squares (2^20-sized segments).
template <class F>
void for_each_fundamental_d(uint64_t X, uint64_t q, F&& f) {
    if (X == 0) throw usage_error("fundamental_d_range: X must be >= 1");
    if ((q & 1) == 0) throw usage_error("fundamental_d_range: q must be odd");
    if (X > 2000000000000ull) throw budget_error("fundamental_d_range: X > 2e12");
    std::vector<uint64_t> q_primes;
    for (auto& [p, e] : primes::factorize(q))
        if (p > 1) q_primes.push_back(p);
    const uint64_t lo_all = X + 1, hi_all = 2 * X;
    auto base = primes::simple_sieve(static_cast<uint32_t>(primes::isqrt(hi_all)) + 1);
    const uint64_t seg = uint64_t{1} << 20;
    std::vector<uint8_t> ok;
    for (uint64_t lo = lo_all; lo <= hi_all; lo += seg) {
        uint64_t hi = std::min(hi_all, lo + seg - 1);
        ok.assign(hi - lo + 1, 1);
        for (uint64_t r : q_primes) {
            for (uint64_t v = ((lo + r - 1) / r) * r; v <= hi; v += r) ok[v - lo] = 0;
        }
        for (uint32_t p : base) {
            if (p == 2) continue;  // odd d cannot be divisible by 4
            uint64_t p2 = uint64_t{p} * p;
            if (p2 > hi) break;
            for (uint64_t v = ((lo + p2 - 1) / p2) * p2; v <= hi; v += p2) ok[v - lo] = 0;
        }
        uint64_t first = lo | 1;  // odd candidates only
        for (uint64_t v = first; v <= hi; v += 2)
            if (ok[v - lo]) f(v);
    }
}

inline std::vector<uint64_t> fundamental_d_range(uint64_t X, uint64_t q) {
    std::vector<uint64_t> out;
    for_each_fundamental_d(X, q, [&](uint64_t d) { out.push_back(d); });
    return out;
}

inline uint64_t fundamental_d_count(uint64_t X, uint64_t q) {
    uint64_t n = 0;
    for_each_fundamental_d(X, q, [&](uint64_t) { ++n; });
    return n;
}

}  // namespace reslab::characters
