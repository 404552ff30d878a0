#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "reslab/primes.hpp"
#include "reslab/specialfn.hpp"

using namespace reslab;
using namespace reslab::specialfn;

namespace {

uint64_t rng_state = 0x243f6a8885a308d3ull;
double next_unit() {
    rng_state ^= rng_state << 13;
    rng_state ^= rng_state >> 7;
    rng_state ^= rng_state << 17;
    return static_cast<double>(rng_state >> 11) * 0x1.0p-53;
}

// exact sigma_0 tail of the v_cutoff bound, summed until terms die
double cutoff_tail(uint64_t N, uint64_t dq) {
    double T = 16.0 * static_cast<double>(dq) / kPi;
    double s = 0.0;
    for (uint64_t n = N + 1;; ++n) {
        double sigma0 = 0.0;
        for (auto& [p, e] : primes::factorize(n)) sigma0 = sigma0 == 0.0 ? e + 1.0 : sigma0 * (e + 1.0);
        if (sigma0 == 0.0) sigma0 = 1.0;
        double term = 2.0 * sigma0 / std::sqrt(static_cast<double>(n)) *
                      std::exp(-static_cast<double>(n) / T);
        s += term;
        if (term < 1e-22 && static_cast<double>(n) > T * 40.0) break;
    }
    return s;
}

}  // namespace

TEST_CASE("complex gamma reflection and special values", "[specialfn]") {
    for (int i = 0; i < 500; ++i) {
        cplx s(next_unit() * 40.0 - 20.0, next_unit() * 100.0 - 50.0);
        if (std::abs(s - std::round(s.real())) < 1e-3 && s.imag() == 0.0) continue;
        cplx lhs = gamma(s) * gamma(1.0 - s) * std::sin(kPi * s) / kPi;
        REQUIRE(std::abs(lhs - 1.0) < 1e-12);
    }
    CHECK(std::abs(gamma(cplx(5.0, 0.0)) - 24.0) < 1e-12);
    CHECK(std::abs(gamma(cplx(0.5, 0.0)) - std::sqrt(kPi)) < 1e-14);
    CHECK(std::abs(gamma(cplx(0.25, 0.0)) - kGamma14) < 1e-13);
}

TEST_CASE("v_weight frozen references", "[specialfn]") {
    CHECK(v_weight(0.0) == 1.0);  // exact by definition
    // values pinned by two independent high-precision quadratures
    CHECK(std::fabs(v_weight(1.0) - 0.0126583230362384253) < 1e-13);
    CHECK(std::fabs(v_weight(1e-8) - 0.99879233814730814561) < 1e-9);
    CHECK(std::fabs(v_weight(1e-6) - 0.990726061517424) < 1e-10);
    CHECK(std::fabs(v_weight(10.0) / 2.6369635662431888e-11 - 1.0) < 1e-9);
    CHECK(std::fabs(v_weight(20.0) / 2.7875124957062176e-20 - 1.0) < 1e-9);
    CHECK(std::fabs(v_weight(40.0) / 6.000639462418302589e-38 - 1.0) < 1e-7);
    CHECK_THROWS_AS(v_weight(-1.0), usage_error);
}

TEST_CASE("quadrature config validation", "[specialfn]") {
    QuadratureConfig bad;
    bad.contour_re = 0.4;
    CHECK_THROWS_AS(v_weight(1.0, bad), usage_error);
    QuadratureConfig odd_panels;
    odd_panels.step = 0.07;  // 200/0.07 is not an integer
    CHECK_THROWS_AS(v_weight(1.0, odd_panels), usage_error);
}

TEST_CASE("v_weight real-valued and refinement-stable on a grid", "[specialfn]") {
    QuadratureConfig cfg;          // tol 1e-10; internal check |Im| <= tol
    QuadratureConfig refined = cfg;
    refined.step *= 0.5;
    refined.t_max *= 2.0;
    for (int i = 0; i < 50; ++i) {
        double x = 1e-6 * std::pow(50.0 / 1e-6, i / 49.0);
        double a = v_weight(x, cfg);      // throws if |Im| or refinement drift > tol
        double b = v_weight(x, refined);
        REQUIRE(std::fabs(a - b) <= 1e-8);
    }
}

TEST_CASE("v_weight decay and near-zero envelopes", "[specialfn]") {
    for (double x : {10.0, 20.0, 40.0})
        CHECK(std::fabs(v_weight(x)) <= 10.0 * std::exp(-x / 2.0));
    // |V(x) - 1| <= C' x^{0.45} with frozen C' = 5.0 (measured max 4.7)
    for (int i = 0; i < 50; ++i) {
        double x = 1e-6 * std::pow(0.1 / 1e-6, i / 49.0);
        REQUIRE(std::fabs(v_weight(x) - 1.0) <= 5.0 * std::pow(x, 0.45));
    }
}

TEST_CASE("v_cutoff bound and monotonicity", "[specialfn]") {
    uint64_t n56 = v_cutoff(56, 1e-8);
    CHECK(n56 >= 1000);
    CHECK(n56 <= 20000);  // "low thousands"
    CHECK(cutoff_tail(n56, 56) < 1e-8);
    CHECK(v_cutoff(112, 1e-8) >= 2 * n56);
    CHECK(v_cutoff(56, 1e-9) > n56);
    CHECK(v_cutoff(56, 0.5) >= 1);
    CHECK_THROWS_AS(v_cutoff(0, 1e-8), usage_error);
    CHECK_THROWS_AS(v_cutoff(56, 1.5), usage_error);
}

TEST_CASE("v_weight interpolation table", "[specialfn]") {
    const auto& tbl = v_weight_table();
    CHECK(tbl.eval(0.0) == 1.0);
    CHECK(tbl.eval(32.0) == 0.0);
    CHECK(tbl.eval(100.0) == 0.0);
    CHECK_THROWS_AS(tbl.eval(1e-12), usage_error);
    for (int i = 0; i < 200; ++i) {
        double x = 1e-9 * std::pow(31.9 / 1e-9, next_unit());
        REQUIRE(std::fabs(tbl.eval(x) - v_weight(x)) < 1e-11);
    }
}

TEST_CASE("hurwitz zeta special values", "[specialfn]") {
    CHECK(std::abs(hurwitz_zeta(cplx(2.0, 0.0), 1.0, 1e-12) - kZeta2) < 1e-10);
    CHECK(std::fabs(hurwitz_zeta_half(1.0, 1e-13) - (-1.4603545088095868)) < 1e-12);
    // zeta(s, 1/2) = (2^s - 1) zeta(s), both sides computed independently
    for (double s : {0.5, 2.0}) {
        cplx lhs = hurwitz_zeta(cplx(s, 0.0), 0.5, 1e-12);
        cplx rhs = (std::pow(2.0, s) - 1.0) * hurwitz_zeta(cplx(s, 0.0), 1.0, 1e-12);
        CHECK(std::abs(lhs - rhs) < 1e-9);
    }
    // external reference, complex argument
    cplx ref(1.2389651521246451666, -1.5881852882586363423);
    CHECK(std::abs(hurwitz_zeta(cplx(0.5, 30.0), 0.3, 1e-11) - ref) < 1e-10);
}

TEST_CASE("hurwitz zeta recurrence and fast path", "[specialfn]") {
    for (int i = 0; i < 200; ++i) {
        cplx s(next_unit() * 8.0 - 4.0, next_unit() * 20.0 - 10.0);
        if (std::abs(s - cplx(1.0, 0.0)) < 1e-6) continue;
        double a = next_unit() * 0.98 + 0.01;
        cplx lhs = hurwitz_zeta(s, a, 1e-11);
        cplx rhs = std::exp(-s * std::log(a)) + hurwitz_zeta(s, a + 1.0, 1e-11);
        REQUIRE(std::abs(lhs - rhs) < 1e-9);
    }
    for (int i = 0; i < 100; ++i) {
        double a = next_unit() * 0.99 + 0.005;
        REQUIRE(std::fabs(hurwitz_zeta_half(a, 1e-12) -
                          hurwitz_zeta(cplx(0.5, 0.0), a, 1e-12).real()) < 1e-11);
    }
}

TEST_CASE("hurwitz zeta domain errors", "[specialfn]") {
    CHECK_THROWS_AS(hurwitz_zeta(cplx(1.0, 0.0), 0.5, 1e-10), usage_error);  // pole
    CHECK_THROWS_AS(hurwitz_zeta(cplx(2.0, 0.0), 0.0, 1e-10), usage_error);
    CHECK_THROWS_AS(hurwitz_zeta(cplx(2.0, 0.0), -1.0, 1e-10), usage_error);
    CHECK_THROWS_AS(hurwitz_zeta_half(0.5, -1e-9), usage_error);
}
