#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <numeric>

#include "reslab/characters.hpp"

using namespace reslab;
using characters::CharacterGroup;
using characters::chi_8d;
using characters::kronecker;
using cplx = std::complex<double>;

namespace {

// Euler-criterion oracle for (a/p), p an odd prime.
int legendre_oracle(int64_t a, uint64_t p) {
    int64_t r = a % static_cast<int64_t>(p);
    if (r < 0) r += p;
    if (r == 0) return 0;
    uint64_t e = primes::detail::powmod(static_cast<uint64_t>(r), (p - 1) / 2, p);
    return e == 1 ? 1 : -1;
}

uint64_t rng_state = 0x9e3779b97f4a7c15ull;
uint64_t next_u64() {
    rng_state ^= rng_state << 13;
    rng_state ^= rng_state >> 7;
    rng_state ^= rng_state << 17;
    return rng_state;
}

}  // namespace

TEST_CASE("character group q=7", "[characters]") {
    CharacterGroup G(7);
    REQUIRE(G.size() == 6);
    int even_nonquad_prim = 0;
    for (const auto& c : G.characters())
        if (c.is_even() && !c.is_quadratic() && !c.is_principal() && c.is_primitive()) {
            ++even_nonquad_prim;
            CHECK(c.order() == 3);
        }
    CHECK(even_nonquad_prim == 2);
    // psi with label "2" satisfies psi(3) = e^{2 pi i/3}
    const auto& psi = G.by_label("2");
    CHECK(std::abs(psi.value(3) - std::polar(1.0, characters::kTwoPi / 3.0)) < 1e-14);
}

TEST_CASE("character group sizes and parities", "[characters]") {
    CHECK(CharacterGroup(9).size() == 6);
    CharacterGroup G3(3);
    REQUIRE(G3.size() == 2);
    int good = 0;
    for (const auto& c : G3.characters())
        if (c.is_even() && !c.is_quadratic() && !c.is_principal()) ++good;
    CHECK(good == 0);  // the only non-principal character mod 3 is quadratic
    CHECK_THROWS_AS(CharacterGroup(4), usage_error);
    CHECK_THROWS_AS(CharacterGroup(1), usage_error);
}

TEST_CASE("character table invariants", "[characters]") {
    for (uint32_t q : {7u, 9u, 15u, 45u, 121u}) {
        CharacterGroup G(q);
        REQUIRE(G.size() == primes::euler_phi(q));
        for (const auto& c : G.characters()) {
            for (uint32_t n = 0; n < q; ++n) {
                bool unit = std::gcd(n, q) == 1;
                if (!unit) {
                    CHECK(c.value(n) == cplx(0.0, 0.0));
                } else {
                    CHECK(std::abs(std::abs(c.value(n)) - 1.0) < 1e-12);
                }
            }
            // complete multiplicativity on a sample of pairs
            for (int k = 0; k < 200; ++k) {
                uint64_t m = next_u64() % q, n = next_u64() % q;
                cplx lhs = c.value((m * n) % q);
                cplx rhs = c.value(m) * c.value(n);
                CHECK(std::abs(lhs - rhs) < 1e-12);
            }
            CHECK(c.is_even() == (std::abs(c.value(q - 1) - cplx(1.0, 0.0)) < 1e-12));
            // order is the least k with psi^k trivial: integer-exact via exponents
            uint32_t L = c.group_exponent();
            auto trivial_at = [&](uint32_t k) {
                for (uint32_t n = 0; n < q; ++n) {
                    int64_t t = c.exponent(n);
                    if (t >= 0 && (static_cast<uint64_t>(t) * k) % L != 0) return false;
                }
                return true;
            };
            REQUIRE(trivial_at(c.order()));
            for (uint32_t k = 1; k < c.order(); ++k) CHECK_FALSE(trivial_at(k));
        }
    }
}

TEST_CASE("orthogonality over all odd q <= 200", "[characters]") {
    for (uint32_t q = 3; q <= 200; q += 2) {
        CharacterGroup G(q);
        double phi = G.size();
        for (uint32_t n = 0; n < q; ++n) {
            cplx s(0.0, 0.0);
            for (const auto& c : G.characters()) s += c.value(n);
            double expect = (n % q == 1 % q) ? phi : 0.0;
            REQUIRE(std::abs(s - expect) < 1e-9);
        }
    }
}

TEST_CASE("kronecker examples", "[characters]") {
    CHECK(kronecker(8, 1) == 1);
    CHECK(kronecker(8, 3) == -1);
    CHECK(kronecker(8, 7) == 1);
}

TEST_CASE("kronecker properties", "[characters]") {
    CHECK_THROWS_AS(kronecker(0, 0), usage_error);
    CHECK(kronecker(5, 0) == 0);
    CHECK(kronecker(1, 0) == 1);
    CHECK(kronecker(-1, 0) == 1);
    // against the Euler criterion at odd primes
    std::vector<uint64_t> ps;
    primes::for_each_prime(2000, [&](uint64_t p) {
        if (p > 2) ps.push_back(p);
    });
    for (int i = 0; i < 10000; ++i) {
        uint64_t p = ps[next_u64() % ps.size()];
        auto a = static_cast<int64_t>(next_u64() % 100000) - 50000;
        REQUIRE(kronecker(a, static_cast<int64_t>(p)) == legendre_oracle(a, p));
    }
    // complete multiplicativity in the bottom argument
    for (int i = 0; i < 2000; ++i) {
        int64_t a = static_cast<int64_t>(next_u64() % 1000) - 500;
        int64_t m = static_cast<int64_t>(next_u64() % 400) + 1;
        int64_t n = static_cast<int64_t>(next_u64() % 400) + 1;
        REQUIRE(kronecker(a, m * n) == kronecker(a, m) * kronecker(a, n));
    }
    // quadratic reciprocity for odd positive coprime pairs
    for (int i = 0; i < 2000; ++i) {
        int64_t m = 2 * static_cast<int64_t>(next_u64() % 500) + 3;
        int64_t n = 2 * static_cast<int64_t>(next_u64() % 500) + 3;
        if (std::gcd(m, n) != 1) continue;
        int sign = (m % 4 == 3 && n % 4 == 3) ? -1 : 1;
        REQUIRE(kronecker(m, n) * kronecker(n, m) == sign);
    }
}

TEST_CASE("chi_8d", "[characters]") {
    CHECK(chi_8d(1, 3) == -1);
    CHECK(chi_8d(1, 2) == 0);
    CHECK(chi_8d(3, 5) == 1);  // kronecker(24, 5): 24 = 4 mod 5, a square
    CHECK_THROWS_AS(chi_8d(2, 3), usage_error);
    CHECK_THROWS_AS(chi_8d(9, 5), usage_error);
    for (uint64_t d : {1ull, 3ull, 5ull, 7ull, 15ull}) {
        CHECK(chi_8d(d, 8 * d - 1) == 1);  // chi_{8d}(-1) = +1
        for (int i = 0; i < 1000; ++i) {
            uint64_t n = next_u64() % 100000 + 1;
            REQUIRE(chi_8d(d, n) == chi_8d(d, n + 8 * d));
        }
    }
}

TEST_CASE("gauss sums", "[characters]") {
    CharacterGroup G(7);
    const auto& psi = G.by_label("2");
    cplx tau = characters::gauss_sum(psi);
    CHECK(std::abs(std::abs(tau) - std::sqrt(7.0)) < 1e-10);
    CHECK_THROWS_AS(characters::gauss_sum(G.principal()), usage_error);
    // tau(conj(psi)) = psi(-1) conj(tau(psi)), both sides by direct summation
    const auto& psib = G.conjugate(psi);
    cplx lhs = characters::gauss_sum(psib);
    cplx rhs = psi.value(7 - 1) * std::conj(tau);
    CHECK(std::abs(lhs - rhs) < 1e-12);
    // |tau| = sqrt(q) for every primitive character mod 45
    CharacterGroup G45(45);
    for (const auto& c : G45.characters())
        if (c.is_primitive())
            CHECK(std::abs(std::abs(characters::gauss_sum(c)) - std::sqrt(45.0)) < 1e-10);
}

TEST_CASE("d_psi values and convolution identity", "[characters]") {
    CharacterGroup G(7);
    const auto& psi = G.by_label("2");
    CHECK(characters::d_psi(psi, 1) == cplx(1.0, 0.0));
    CHECK(std::abs(characters::d_psi(psi, 3) - cplx(-1.0, 0.0)) < 1e-13);
    CHECK(std::abs(characters::d_psi(psi, 7)) < 1e-15);
    CHECK_THROWS_AS(characters::d_psi(psi, 0), usage_error);
    CHECK_THROWS_AS(characters::d_psi(psi, 20000001), budget_error);

    // d_psi = psi * conj(psi) as a Dirichlet convolution, for all n <= 1e4
    for (uint32_t q : {7u, 9u}) {
        CharacterGroup Gq(q);
        const auto& c = *Gq.even_nonquadratic_primitive().at(0);
        for (uint64_t n = 1; n <= 10000; ++n) {
            cplx direct(0.0, 0.0);
            for (uint64_t a = 1; a * a <= n; ++a) {
                if (n % a != 0) continue;
                uint64_t b = n / a;
                direct += c.value(a) * std::conj(c.value(b));
                if (a != b) direct += c.value(b) * std::conj(c.value(a));
            }
            cplx fast = characters::d_psi(c, n);
            REQUIRE(std::abs(fast - direct) < 1e-10);
            REQUIRE(std::abs(fast.imag()) < 1e-12);  // real-valued
        }
    }
}

TEST_CASE("fundamental_d_range", "[characters]") {
    CHECK(characters::fundamental_d_range(10, 7) == std::vector<uint64_t>({11, 13, 15, 17, 19}));
    CHECK(characters::fundamental_d_range(1, 3).empty());
    CHECK_THROWS_AS(characters::fundamental_d_range(0, 7), usage_error);
    CHECK_THROWS_AS(characters::fundamental_d_range(10, 4), usage_error);

    // independent mu^2 evaluation per d
    uint64_t X = 100000, q = 7;
    uint64_t direct = 0;
    for (uint64_t d = X + 1; d <= 2 * X; ++d)
        if (d % 2 == 1 && std::gcd(d, 2 * q) == 1 && primes::is_squarefree(d)) ++direct;
    CHECK(characters::fundamental_d_count(X, q) == direct);

    // ascending, all members valid
    auto v = characters::fundamental_d_range(5000, 15);
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) REQUIRE(v[i] > v[i - 1]);
        REQUIRE(v[i] % 2 == 1);
        REQUIRE(std::gcd<uint64_t>(v[i], 30) == 1);
        REQUIRE(primes::is_squarefree(v[i]));
        REQUIRE(v[i] > 5000);
        REQUIRE(v[i] <= 10000);
    }
}

TEST_CASE("TwistSpec validation", "[characters]") {
    CharacterGroup G(7);
    const auto& psi = G.by_label("2");
    characters::TwistSpec ts(psi, 15);
    CHECK(ts.conductor == 8 * 15 * 7);
    CHECK_THROWS_AS(characters::TwistSpec(psi, 4), usage_error);   // even
    CHECK_THROWS_AS(characters::TwistSpec(psi, 9), usage_error);   // not square-free
    CHECK_THROWS_AS(characters::TwistSpec(psi, 21), usage_error);  // shares factor with q
    const auto& odd_psi = G.by_label("1");
    CHECK_THROWS_AS(characters::TwistSpec(odd_psi, 3), usage_error);
}
