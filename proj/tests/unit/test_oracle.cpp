#include <doctest.h>

#include <numbers>

#include "../oracle/hill_oracle.hpp"
#include "../oracle/reference_values.hpp"
#include "apfront/ap_function.hpp"

using apfront::APFunction;

// The spectral oracle itself must reproduce independently frozen values
// before it is trusted to judge the solver.

TEST_CASE("oracle: Hill eigenvalue of phi'' + cos(x) phi") {
    const APFunction one(1.0), zero(0.0), cosx(0.0, {{1.0, 1.0, 0.0}});
    const double lam = oracle::principal_eigenvalue(one, zero, cosx, 0.0, 1.0);
    CHECK(lam == doctest::Approx(oracle::ref::kHillCos).epsilon(1e-12));
}

TEST_CASE("oracle: Hill eigenvalue of phi'' + 0.5 cos(x) phi") {
    const APFunction one(1.0), zero(0.0), half(0.0, {{1.0, 0.5, 0.0}});
    const double lam = oracle::principal_eigenvalue(one, zero, half, 0.0, 1.0);
    CHECK(lam == doctest::Approx(oracle::ref::kHillHalfCos).epsilon(1e-12));
}

TEST_CASE("oracle: constants reduce to a p^2 - b p + c") {
    const APFunction a(2.0), b(1.0), zero(0.0);
    const APFunction C(3.0);  // C = a p^2 - b p + c with p folded by the caller
    for (double p : {-1.0, 0.0, 0.5, 2.0}) {
        const double lam = oracle::principal_eigenvalue(a, b, C, p, 1.0);
        CHECK(lam == doctest::Approx(2.0 * p * p - 1.0 * p + 3.0).epsilon(1e-10));
    }
}

TEST_CASE("oracle: conjugation shift by exp(px) for the cos potential") {
    // lambda(p) of phi'' - 2p phi' + (p^2 + 1 + cos x) phi is the Bloch
    // eigenvalue; at p = 0 it reduces to 1 + Hill(cos)
    const APFunction one(1.0), zero(0.0);
    const APFunction C(1.0, {{1.0, 1.0, 0.0}});
    const double lam0 = oracle::principal_eigenvalue(one, zero, C, 0.0, 1.0);
    CHECK(lam0 == doctest::Approx(1.0 + oracle::ref::kHillCos).epsilon(1e-12));
    // p != 0 stays above the p = 0 value (convexity, even in p here)
    const double lam1 = oracle::principal_eigenvalue(one, zero, C, 1.0, 1.0);
    CHECK(lam1 > lam0 + 0.5);
}

TEST_CASE("oracle: rescaled period matches the analytic small-L limit trend") {
    // a = 2 + cos(x/L): lambda(L,1) approaches sqrt(3) * 1 + 1 as L -> 0
    const APFunction zero(0.0), c1(1.0);
    for (double L : {0.1, 0.05}) {
        const APFunction aL =
            APFunction(2.0, {{1.0, 1.0, 0.0}}).scaled_argument(1.0 / L);
        const double lam = oracle::principal_eigenvalue(aL, zero, c1, 1.0, 1.0 / L, 160);
        CHECK(lam == doctest::Approx(oracle::ref::kSqrt3 + 1.0).epsilon(5e-3));
    }
}
