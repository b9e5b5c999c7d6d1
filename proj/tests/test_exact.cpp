#include <catch2/catch.hpp>

#include <cmath>
#include <random>

#include "segdim/exact.hpp"

using segdim::exact::sign_sum;
using segdim::exact::Term;

namespace {
int ref_sign(__int128 v) { return v > 0 ? 1 : v < 0 ? -1 : 0; }
}

TEST_CASE("sign_sum on small integer expressions matches int128") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<long long> val(-1000000, 1000000);
    std::uniform_int_distribution<long long> coeff(-1000, 1000);
    for (int iter = 0; iter < 20000; ++iter) {
        Term t[4];
        __int128 ref = 0;
        for (int i = 0; i < 4; ++i) {
            long long a = val(rng), b = val(rng), c = coeff(rng);
            t[i] = {(double)a, (double)b, c};
            ref += (__int128)a * b * c;
        }
        REQUIRE(sign_sum(std::span<const Term>(t, 4)) == ref_sign(ref));
    }
}

TEST_CASE("sign_sum resolves ties that cancel exactly") {
    // a*b - b*a == 0 for awkward doubles
    double a = 0.1, b = 1.0 / 3.0;
    CHECK(sign_sum({Term{a, b, 7}, Term{b, a, -7}}) == 0);
    // x - x + tiny, with a ~350-bit exponent spread
    double x = std::ldexp(1.0, 40);
    CHECK(sign_sum({Term{x, 1.0, 1}, Term{x, 1.0, -1},
                    Term{std::ldexp(1.0, -300), 1.0, 1}}) == 1);
    CHECK(sign_sum({Term{x, 1.0, 1}, Term{x, 1.0, -1},
                    Term{std::ldexp(1.0, -300), 1.0, -1}}) == -1);
}

TEST_CASE("sign_sum separates values differing in the last place") {
    double x = 1.0;
    double y = std::nextafter(x, 2.0);
    CHECK(sign_sum({Term{y, 1.0, 1}, Term{x, 1.0, -1}}) == 1);
    CHECK(sign_sum({Term{x, 1.0, 1}, Term{y, 1.0, -1}}) == -1);
    CHECK(sign_sum({Term{x, y, 1}, Term{y, x, -1}}) == 0);
}

TEST_CASE("sign_sum handles huge exponent spreads or reports overflow") {
    // a near-cancellation with a ~1200-bit spread forces the exact path
    // past its capacity; it must throw rather than return a wrong sign
    double big = std::ldexp(1.0, 300), small = std::ldexp(1.0, -300);
    CHECK_THROWS_AS(sign_sum({Term{big, big, 1}, Term{big, big, -1},
                              Term{small, small, 1}}),
                    std::overflow_error);
    // when the floating filter is decisive the exact path never runs
    CHECK(sign_sum({Term{big, big, 1}, Term{small, small, -1}}) == 1);
}

TEST_CASE("sign_sum of cancelling products of random dyadics is exact") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int iter = 0; iter < 5000; ++iter) {
        double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
        // (a*b)*(c*d) - (c*d)*(a*b) symbolically zero
        CHECK(sign_sum({Term{a, b, 3}, Term{b, a, -2}, Term{a, b, -1}}) == 0);
        int s = sign_sum({Term{a, c, 1}, Term{b, d, 1}});
        // compare against long double as a sanity reference when safe
        long double ref = (long double)a * c + (long double)b * d;
        if (std::fabs(ref) > 1e-10L) CHECK(s == (ref > 0 ? 1 : -1));
        (void)d;
    }
}
