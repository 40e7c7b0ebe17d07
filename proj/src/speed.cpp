#include "apfront/speed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace apfront {

Bounds sandwich_bounds(const CoefficientSet& cs, double p) {
    CompositeBound map;
    map.value = [p](std::span<const double> v) { return v[0] * p * p - v[1] * p + v[2] + v[3]; };
    map.gradient = [p](std::span<const double>, std::span<double> g) {
        g[0] = p * p;
        g[1] = -p;
        g[2] = 1.0;
        g[3] = 1.0;
    };
    map.partial_bounds = {p * p, std::abs(p), 1.0, 1.0};
    map.hessian_bound = 0.0;  // linear in the coefficients
    return bounds_composite(map, {cs.a, cs.b, cs.c, cs.c_tilde}, 1e-9);
}

SpeedResult minimize_speed(const LambdaCurve& lambda_fn, int e, const CoefficientSet& cs,
                           double tol) {
    if (e != 1 && e != -1) throw std::invalid_argument("minimize_speed: e must be +1 or -1");
    if (!(tol > 0.0)) throw std::invalid_argument("minimize_speed: tol must be positive");

    const double sup_b = std::max(std::abs(cs.b_range.lower), std::abs(cs.b_range.upper));
    const double inf_react = cs.c_range.lower + cs.ct_range.lower;

    double err_bar_max = 0.0;
    auto lam = [&](double q) {  // q = p e > 0, lambda evaluated at signed p
        EigenResult r = lambda_fn(e * q);
        err_bar_max = std::max(err_bar_max, r.error_bar);
        // quadratic sandwich check with v == 1
        Bounds sb = sandwich_bounds(cs, e * q);
        const double slack = 3.0 * r.error_bar + 1e-9;
        if (r.lambda < sb.lower - slack || r.lambda > sb.upper + slack)
            throw SolverError("minimize_speed: sandwich violation at p = " +
                              std::to_string(e * q) + " (lambda " + std::to_string(r.lambda) +
                              " outside [" + std::to_string(sb.lower) + ", " +
                              std::to_string(sb.upper) + "])");
        return r.lambda;
    };

    // probe to get an upper bound on the speed, then bracket from the
    // sandwich: alpha_m q^2 - sup|b| q + inf(c+c~) <= omega_ub q outside the
    // roots, so the minimizer lies between them
    const std::array<double, 3> probes{0.5, 1.0, 2.0};
    double omega_ub = std::numeric_limits<double>::infinity();
    for (double q : probes) omega_ub = std::min(omega_ub, lam(q) / q);
    const double A = cs.alpha_m, B = sup_b + omega_ub, C0 = inf_react;
    double q_lo = 1e-3, q_hi = 8.0;
    const double disc = B * B - 4.0 * A * C0;
    if (disc > 0.0 && C0 > 0.0) {
        q_lo = std::max(q_lo, (B - std::sqrt(disc)) / (2.0 * A));
        q_hi = (B + std::sqrt(disc)) / (2.0 * A);
    } else {
        q_hi = B / A + 1.0;  // inf(c+c~) = 0: quotient still coercive upward
    }

    // golden section on phi(q) = lambda(e q)/q
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = q_lo, b = q_hi;
    double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
    double f1 = lam(x1) / x1, f2 = lam(x2) / x2;
    bool noise_limited = false;
    for (int it = 0; it < 200; ++it) {
        const double width_tol = std::max(tol * std::max(1.0, 0.5 * (a + b)), 1e-12);
        if (b - a < width_tol) break;
        if (std::abs(f1 - f2) < 3.0 * err_bar_max / std::max(x1, 1e-6) &&
            b - a < 64.0 * width_tol) {
            noise_limited = true;  // noise floor: stop refining below 3x error bar
            break;
        }
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = lam(x1) / x1;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = lam(x2) / x2;
        }
    }
    const double q_star = f1 < f2 ? x1 : x2;
    const double lam_star = (f1 < f2 ? f1 : f2) * q_star;

    SpeedResult out;
    out.e = e;
    out.p_star = e * q_star;
    out.omega = lam_star / q_star;
    out.lambda_at_pstar = lam_star;
    out.p_lo = q_lo;
    out.p_hi = q_hi;
    out.error_bar = err_bar_max / std::max(q_star, 1e-6) +
                    std::abs(f1 - f2);  // value noise + bracket flatness
    out.noise_limited = noise_limited;
    // tangency diagnostic lambda'(p*) p* = lambda(p*) by central differences
    const double dq = std::max(1e-4, 0.01 * q_star);
    const double lp = (lam(q_star + dq) - lam(q_star - dq)) / (2.0 * dq);
    out.tangency = std::abs(lp * q_star - lam_star);
    return out;
}

SpeedResult speed_finite(const CoefficientSet& cs, double L, int e, double tol,
                         const EigenOptions& opts) {
    EigenOptions o = opts;
    o.tol = std::min(o.tol, tol);
    return minimize_speed([&](double p) { return lambda_finite(cs, L, p, o); }, e, cs, tol);
}

SpeedResult speed_zero(const CoefficientSet& cs, int e, double tol, const EigenOptions& opts) {
    EigenOptions o = opts;
    o.tol = std::min(o.tol, tol);
    return minimize_speed([&](double p) { return lambda_zero(cs, p, o); }, e, cs, tol);
}

SpeedResult speed_infinity(const CoefficientSet& cs, int e, double tol,
                           const EigenOptions& opts) {
    EigenOptions o = opts;
    o.tol = std::min(o.tol, tol);
    return minimize_speed([&](double p) { return lambda_infinity(cs, p, o); }, e, cs, tol);
}

}  // namespace apfront
