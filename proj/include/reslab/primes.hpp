#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "reslab/errors.hpp"

namespace reslab::primes {

inline uint64_t isqrt(uint64_t n) {
    if (n == 0) return 0;
    auto r = static_cast<uint64_t>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

// All primes <= limit, ascending.
inline std::vector<uint32_t> simple_sieve(uint32_t limit) {
    std::vector<uint32_t> out;
    if (limit < 2) return out;
    std::vector<uint8_t> comp(limit + 1, 0);
    for (uint64_t i = 2; i * i <= limit; ++i)
        if (!comp[i])
            for (uint64_t j = i * i; j <= limit; j += i) comp[j] = 1;
    for (uint32_t i = 2; i <= limit; ++i)
        if (!comp[i]) out.push_back(i);
    return out;
}

// Streams primes <= limit in ascending order through f, in segments: memory
// stays O(sqrt(limit) + segment).
template <class F>
void for_each_prime(uint64_t limit, F&& f) {
    if (limit < 2) return;
    const uint64_t seg = uint64_t{1} << 20;
    auto base = simple_sieve(static_cast<uint32_t>(isqrt(limit)));
    for (uint32_t p : base)
        if (p <= limit) f(static_cast<uint64_t>(p));
    uint64_t lo = base.empty() ? 2 : uint64_t{base.back()} + 1;
    lo = std::max(lo, isqrt(limit) + 1);
    std::vector<uint8_t> comp;
    for (; lo <= limit; lo += seg) {
        uint64_t hi = std::min(limit, lo + seg - 1);
        comp.assign(hi - lo + 1, 0);
        for (uint32_t p : base) {
            uint64_t start = ((lo + p - 1) / p) * p;
            if (start < uint64_t{p} * p) start = uint64_t{p} * p;
            for (uint64_t j = start; j <= hi; j += p) comp[j - lo] = 1;
        }
        for (uint64_t v = lo; v <= hi; ++v)
            if (!comp[v - lo]) f(v);
    }
}

// Smallest-prime-factor table for 1..n (spf[1] = 1), linear sieve.
inline std::vector<uint32_t> spf_sieve(uint32_t n) {
    std::vector<uint32_t> spf(static_cast<size_t>(n) + 1, 0);
    std::vector<uint32_t> ps;
    if (n >= 1) spf[1] = 1;
    for (uint32_t i = 2; i <= n; ++i) {
        if (spf[i] == 0) {
            spf[i] = i;
            ps.push_back(i);
        }
        for (uint32_t p : ps) {
            uint64_t v = uint64_t{p} * i;
            if (p > spf[i] || v > n) break;
            spf[v] = p;
        }
    }
    return spf;
}

namespace detail {

inline uint64_t mulmod(uint64_t a, uint64_t b, uint64_t m) {
    return static_cast<uint64_t>((__uint128_t)a * b % m);
}

inline uint64_t powmod(uint64_t a, uint64_t e, uint64_t m) {
    uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

}  // namespace detail

// Deterministic Miller-Rabin for 64-bit inputs.
inline bool is_prime(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull})
        if (n % p == 0) return n == p;
    uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) d >>= 1, ++s;
    for (uint64_t a : {2ull, 325ull, 9375ull, 28178ull, 450775ull, 9780504ull, 1795265022ull}) {
        uint64_t x = detail::powmod(a % n, d, n);
        if (x <= 1 || x == n - 1) continue;
        bool comp = true;
        for (int r = 1; r < s; ++r) {
            x = detail::mulmod(x, x, n);
            if (x == n - 1) {
                comp = false;
                break;
            }
        }
        if (comp) return false;
    }
    return true;
}

// Trial-division factorization, (prime, exponent) pairs ascending.
inline std::vector<std::pair<uint64_t, uint32_t>> factorize(uint64_t n) {
    if (n == 0) throw usage_error("factorize: n must be positive");
    std::vector<std::pair<uint64_t, uint32_t>> out;
    for (uint64_t p : {2ull, 3ull, 5ull}) {
        if (n % p == 0) {
            uint32_t e = 0;
            while (n % p == 0) n /= p, ++e;
            out.emplace_back(p, e);
        }
    }
    // 2,3,5-wheel
    static constexpr uint32_t wheel[8] = {4, 2, 4, 2, 4, 6, 2, 6};
    uint64_t p = 7;
    int wi = 0;
    while (p * p <= n) {
        if (n % p == 0) {
            uint32_t e = 0;
            while (n % p == 0) n /= p, ++e;
            out.emplace_back(p, e);
        }
        p += wheel[wi];
        wi = (wi + 1) & 7;
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

inline bool is_squarefree(uint64_t n) {
    if (n == 0) return false;
    for (auto& [p, e] : factorize(n))
        if (e > 1) return false;
    return true;
}

inline int mobius(uint64_t n) {
    if (n == 0) throw usage_error("mobius: n must be positive");
    int m = 1;
    for (auto& [p, e] : factorize(n)) {
        if (e > 1) return 0;
        m = -m;
    }
    return m;
}

inline uint64_t euler_phi(uint64_t n) {
    uint64_t r = n;
    for (auto& [p, e] : factorize(n)) r -= r / p;
    return r;
}

}  // namespace reslab::primes
