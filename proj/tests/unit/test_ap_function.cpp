#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "apfront/ap_function.hpp"

using apfront::APFunction;
using apfront::Harmonic;

namespace {
const APFunction kCos(0.0, {{1.0, 1.0, 0.0}});
const APFunction kQuasi(2.0, {{1.0, 1.0, 0.0}, {std::numbers::sqrt2, 1.0, 0.0}});
}  // namespace

TEST_CASE("eval matches the trigonometric polynomial") {
    CHECK(kCos(0.0) == doctest::Approx(1.0));
    CHECK(kCos(std::numbers::pi / 3) == doctest::Approx(0.5));
    CHECK(kQuasi(0.0) == doctest::Approx(4.0));
    const APFunction f(1.0, {{1.0, 0.0, 0.5}});
    CHECK(f(0.3) == doctest::Approx(1.0 + 0.5 * std::sin(0.3)));
}

TEST_CASE("mean is the constant term") {
    CHECK(kCos.mean() == 0.0);
    CHECK(kQuasi.mean() == 2.0);
    CHECK(APFunction(1.0, {{1.0, 0.0, 0.5}}).mean() == 1.0);
}

TEST_CASE("mean equals long-interval averages") {
    // (1/2R) int_{-R}^{R} f for R past the slow beat scale
    const double R = 4000.0;
    const int n = 1 << 21;
    double s = 0.0;
    const double h = 2 * R / n;
    for (int i = 0; i < n; ++i) s += kQuasi(-R + (i + 0.5) * h);
    CHECK(s / n == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("rational frequencies collapse to one generator") {
    const APFunction f(0.0, {{1.0, 1.0, 0.0}, {0.5, 1.0, 0.0}, {1.5, 0.0, 2.0}});
    CHECK(f.torus_dim() == 1);
    CHECK(f.is_periodic());
    CHECK(f.generators()[0] == doctest::Approx(0.5));
    CHECK(f(1.234) ==
          doctest::Approx(std::cos(1.234) + std::cos(0.5 * 1.234) + 2.0 * std::sin(1.5 * 1.234)));
}

TEST_CASE("sqrt(2) stays independent of 1") {
    CHECK(kQuasi.torus_dim() == 2);
    CHECK_FALSE(kQuasi.is_periodic());
}

TEST_CASE("module cap rejects four independent generators") {
    CHECK_THROWS_AS(APFunction(0.0, {{1.0, 1, 0},
                                     {std::numbers::sqrt2, 1, 0},
                                     {std::numbers::sqrt3, 1, 0},
                                     {std::numbers::pi, 1, 0}}),
                    std::invalid_argument);
}

TEST_CASE("translation is exact within the module") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dy(-20.0, 20.0);
    for (int rep = 0; rep < 10; ++rep) {
        const double y = dy(rng);
        const APFunction shifted = kQuasi.translated(y);
        CHECK(shifted.mean() == kQuasi.mean());
        for (double x : {0.0, 0.7, -3.2, 11.0})
            CHECK(shifted(x) == doctest::Approx(kQuasi(x + y)).epsilon(1e-12));
    }
}

TEST_CASE("argument scaling moves the generators") {
    const APFunction f = kCos.scaled_argument(1.0 / 4.0);  // cos(x/4)
    CHECK(f(2.0) == doctest::Approx(std::cos(0.5)));
    CHECK(f.max_frequency() == doctest::Approx(0.25));
}

TEST_CASE("scaling merges with unit-frequency terms when commensurate") {
    const APFunction a = kCos.scaled_argument(1.0 / 0.5);  // cos(2x)
    auto merged = APFunction::common_module({a, kCos});
    CHECK(merged[0].torus_dim() == 1);
    CHECK(merged[1].torus_dim() == 1);
    CHECK(merged[0].generators()[0] == doctest::Approx(merged[1].generators()[0]));
}

TEST_CASE("derivative and lipschitz bound") {
    const APFunction f(0.0, {{2.0, 1.0, 0.0}});  // cos(2x)
    const APFunction df = f.derivative();
    CHECK(df(0.4) == doctest::Approx(-2.0 * std::sin(0.8)));
    CHECK(f.lipschitz_bound() == doctest::Approx(2.0));
    CHECK(kQuasi.lipschitz_bound() == doctest::Approx(1.0 + std::numbers::sqrt2));
}

TEST_CASE("sum stays in the merged module") {
    APFunction s = kCos;
    s += kQuasi;
    CHECK(s.torus_dim() == 2);
    CHECK(s(0.9) == doctest::Approx(kCos(0.9) + kQuasi(0.9)));
    CHECK(s.mean() == doctest::Approx(2.0));
}
