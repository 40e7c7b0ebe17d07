#include "apfront/eigenvalue.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "apfront/means.hpp"
#include "apfront/parallel.hpp"

namespace apfront {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool constant_slow_part(const CoefficientSet& cs) {
    return cs.a.is_constant() && cs.b.is_constant() && cs.c.is_constant();
}

// sup_x (c - b^2 / 4a), certified via the composite branch-and-bound scan
double plateau_level(const CoefficientSet& cs, double tol) {
    const double b2 = std::max(cs.b_range.lower * cs.b_range.lower,
                               cs.b_range.upper * cs.b_range.upper);
    const double bmax = std::max(std::abs(cs.b_range.lower), std::abs(cs.b_range.upper));
    const double am = cs.alpha_m;
    CompositeBound map;
    map.value = [](std::span<const double> v) { return v[2] - v[1] * v[1] / (4.0 * v[0]); };
    map.gradient = [](std::span<const double> v, std::span<double> g) {
        g[0] = v[1] * v[1] / (4.0 * v[0] * v[0]);
        g[1] = -v[1] / (2.0 * v[0]);
        g[2] = 1.0;
    };
    map.partial_bounds = {b2 / (4.0 * am * am), bmax / (2.0 * am), 1.0};
    map.hessian_bound =
        std::max({b2 / (2.0 * am * am * am), bmax / (2.0 * am * am), 1.0 / (2.0 * am)});
    Bounds mb = bounds_composite(map, {cs.a, cs.b, cs.c}, tol);
    return mb.upper;
}

}  // namespace

EigenResult lambda_finite(const CoefficientSet& cs, double L, double p,
                          const EigenOptions& opts) {
    if (!(L > 0.0)) throw SolverError("lambda_finite: L must be positive");
    const APFunction aL = cs.a.scaled_argument(1.0 / L);
    const APFunction bL = cs.b.scaled_argument(1.0 / L);
    APFunction CL = cs.c.scaled_argument(1.0 / L);
    CL += cs.c_tilde;
    EffectiveHamiltonian eh =
        effective_hamiltonian(aL, bL, CL, p, opts.tol, opts.grid, opts.schedule);
    return {eh.lambda, eh.error_bar};
}

IotaTriple iota_triple(const CoefficientSet& cs, double tol) {
    IotaTriple t;
    t.a = iota(cs.a, cs.a, tol);
    t.b = cs.b.is_zero() ? 0.0 : iota(cs.b, cs.a, tol);
    t.c = iota(cs.c, cs.a, tol);
    return t;
}

EigenResult lambda_zero(const CoefficientSet& cs, double p, const EigenOptions& opts) {
    const IotaTriple it = iota_triple(cs, opts.tol);
    const double closed = it.a * p * p - it.b * p + it.c;
    if (cs.c_tilde.is_zero()) {
        // constant-coefficient sanity solve must reproduce the closed form
        EffectiveHamiltonian eh =
            effective_hamiltonian(APFunction(it.a), APFunction(it.b),
                                  APFunction(it.c), p, opts.tol, opts.grid, opts.schedule);
        if (std::abs(eh.lambda - closed) > opts.tol)
            throw SolverError("lambda_zero: closed form vs solver disagreement");
        return {closed, std::max(eh.error_bar, 0.0)};
    }
    APFunction C = cs.c_tilde;
    C += it.c;
    EffectiveHamiltonian eh = effective_hamiltonian(APFunction(it.a), APFunction(it.b), C, p,
                                                    opts.tol, opts.grid, opts.schedule);
    return {eh.lambda, eh.error_bar};
}

EigenResult hbar(const CoefficientSet& cs, double x, double q, const EigenOptions& opts) {
    const double ax = cs.a(x), bx = cs.b(x), cx = cs.c(x);
    if (cs.c_tilde.is_zero()) return {ax * q * q + bx * q + cx, 0.0};
    APFunction C = cs.c_tilde;
    C += cx;
    // inner problem has (psi' + q); the solver convention carries (u' - p)
    EffectiveHamiltonian eh = effective_hamiltonian(APFunction(ax), APFunction(bx), C, -q,
                                                    opts.tol, opts.grid, opts.schedule);
    return {eh.lambda, eh.error_bar};
}

HBarCurve build_hbar_curve(const CoefficientSet& cs, double q_lo, double q_hi,
                           const EigenOptions& opts) {
    HBarCurve curve;
    const bool slow_const = constant_slow_part(cs);
    const int nx = slow_const ? 1 : opts.hbar_x_samples;
    const int nq = opts.hbar_q_samples;
    curve.x_samples.resize(static_cast<std::size_t>(nx));
    if (slow_const) {
        curve.x_samples[0] = 0.0;
    } else {
        // spread the samples over one snapped almost-period of the slow module
        auto merged = APFunction::common_module({cs.a, cs.b, cs.c});
        Grid1D g = build_grid(merged, 0.0, GridChoice{});
        for (int j = 0; j < nx; ++j)
            curve.x_samples[j] = g.x_lo + (j + 0.5) * (g.x_hi - g.x_lo) / nx;
    }
    curve.q_samples.resize(static_cast<std::size_t>(nq));
    for (int j = 0; j < nq; ++j)
        curve.q_samples[j] = q_lo + j * (q_hi - q_lo) / (nq - 1);
    curve.values.assign(static_cast<std::size_t>(nx),
                        std::vector<double>(static_cast<std::size_t>(nq), 0.0));
    std::vector<double> errs(static_cast<std::size_t>(nx) * nq, 0.0);
    parallel_for(static_cast<std::size_t>(nx) * nq, opts.workers, [&](std::size_t idx) {
        const std::size_t ix = idx / nq, iq = idx % nq;
        EigenResult r = hbar(cs, curve.x_samples[ix], curve.q_samples[iq], opts);
        curve.values[ix][iq] = r.lambda;
        errs[idx] = r.error_bar;
    });
    curve.error_bar = *std::max_element(errs.begin(), errs.end());
    curve.M = -std::numeric_limits<double>::infinity();
    curve.m_x.resize(static_cast<std::size_t>(nx));
    curve.q_star.resize(static_cast<std::size_t>(nx));
    for (int ix = 0; ix < nx; ++ix) {
        const auto& row = curve.values[static_cast<std::size_t>(ix)];
        std::size_t best = 0;
        for (std::size_t iq = 1; iq < row.size(); ++iq)
            if (row[iq] < row[best]) best = iq;
        curve.m_x[ix] = row[best];
        curve.q_star[ix] = curve.q_samples[best];
        curve.M = std::max(curve.M, row[best]);
        for (std::size_t iq = 1; iq + 1 < row.size(); ++iq)
            if (row[iq + 1] - 2.0 * row[iq] + row[iq - 1] <
                -(opts.tol + 3.0 * curve.error_bar))
                curve.convex_ok = false;
    }
    // quadratic growth certificate on the sampled range
    {
        const double bmax = std::max(std::abs(cs.b_range.lower), std::abs(cs.b_range.upper));
        const double c_lo = cs.c_range.lower + cs.ct_range.lower;
        const double c_hi = cs.c_range.upper + cs.ct_range.upper;
        const double slack = opts.tol + 3.0 * curve.error_bar;
        for (int ix = 0; ix < nx && curve.growth_ok; ++ix)
            for (int iq = 0; iq < nq; ++iq) {
                const double q = curve.q_samples[iq];
                const double v = curve.values[ix][iq];
                const double lo = 0.5 * cs.alpha_m * q * q -
                                  (bmax * bmax / (2.0 * cs.alpha_m) - c_lo);
                const double hi = 2.0 * cs.alpha_M * q * q +
                                  (bmax * bmax / (2.0 * cs.alpha_m) + c_hi);
                if (v < lo - slack || v > hi + slack) {
                    curve.growth_ok = false;
                    break;
                }
            }
    }
    return curve;
}

namespace {

// Root of the sampled convex row H(q) = lambda on one side of the minimum:
// bracket on the grid, then invert the parabola through the three nodes
// around the bracket (O(dq^3) against the linear chord's O(dq^2)).
double interp_branch_root(const std::vector<double>& qs, const std::vector<double>& H,
                          std::size_t i_min, double lambda, bool plus_side) {
    const std::size_t n = H.size();
    auto parabola_root = [&](std::size_t i0, std::size_t lo, std::size_t hi) {
        // nodes i0, i0+1, i0+2; root inside [qs[lo], qs[hi]]
        const double x0 = qs[i0], x1 = qs[i0 + 1], x2 = qs[i0 + 2];
        const double y0 = H[i0] - lambda, y1 = H[i0 + 1] - lambda, y2 = H[i0 + 2] - lambda;
        // Newton on the quadratic through the three points, from the chord root
        const double d01 = (y1 - y0) / (x1 - x0), d12 = (y2 - y1) / (x2 - x1);
        const double c2 = (d12 - d01) / (x2 - x0);
        double x = (y0 * y1 <= 0.0) ? x0 - y0 * (x1 - x0) / (y1 - y0)
                                    : x1 - y1 * (x2 - x1) / (y2 - y1);
        for (int it = 0; it < 8; ++it) {
            const double f = y0 + d01 * (x - x0) + c2 * (x - x0) * (x - x1);
            const double fp = d01 + c2 * (2.0 * x - x0 - x1);
            if (fp == 0.0) break;
            x -= f / fp;
        }
        return std::clamp(x, qs[lo], qs[hi]);
    };
    if (plus_side) {
        for (std::size_t i = i_min; i + 1 < n; ++i) {
            if ((H[i] - lambda) * (H[i + 1] - lambda) <= 0.0) {
                const std::size_t i0 = (i + 2 < n) ? i : i - 1;
                return parabola_root(i0, i, i + 1);
            }
        }
        throw SolverError("hbar branch root: lambda above sampled range");
    }
    for (std::size_t i = i_min; i-- > 0;) {
        if ((H[i] - lambda) * (H[i + 1] - lambda) <= 0.0) {
            const std::size_t i0 = (i >= 1) ? i - 1 : i;
            return parabola_root(i0, i, i + 1);
        }
    }
    throw SolverError("hbar branch root: lambda above sampled range");
}

}  // namespace

EigenResult lambda_infinity(const CoefficientSet& cs, double p, const EigenOptions& opts) {
    const double tol = opts.tol;
    if (cs.c_tilde.is_zero()) {
        // analytic inner Hamiltonian a q^2 + b q + c
        const double M = plateau_level(cs, std::min(tol, 1e-9));
        auto branch_mean = [&](double lambda, int sign) {
            // p_branch(lambda) = -< q_sign(., lambda) >
            return -mean_composite(
                [lambda, sign](std::span<const double> v) {
                    const double a = v[0], b = v[1], c = v[2];
                    const double disc = b * b - 4.0 * a * (c - lambda);
                    if (disc < -1e-8 * (1.0 + std::abs(lambda)))
                        throw std::domain_error("sqrt of negative (lambda < M)");
                    const double s = std::sqrt(std::max(0.0, disc));
                    return (-b + sign * s) / (2.0 * a);
                },
                std::vector<APFunction>{cs.a, cs.b, cs.c}, tol * 0.1);
        };
        const double band = std::max(tol, 1e-9);
        const double edge_plus = branch_mean(M + band, -1);   // j_+(M), right edge
        const double edge_minus = branch_mean(M + band, +1);  // j_-(M), left edge
        if (p >= edge_minus && p <= edge_plus) return {M, tol};
        const int sign = p > edge_plus ? -1 : +1;  // right branch uses the minus root
        double lo = M + band, hi = std::max(2.0 * std::abs(M) + 1.0, M + 1.0);
        auto g = [&](double lam) { return branch_mean(lam, sign) - p; };
        const double glo = g(lo);
        int guard = 0;
        while (g(hi) * glo > 0.0) {
            hi = M + (hi - M) * 2.0;
            if (++guard > 60) throw SolverError("lambda_infinity: branch does not reach p");
        }
        while (hi - lo > std::max(tol * 0.25, 1e-13 * std::abs(hi))) {
            const double mid = 0.5 * (lo + hi);
            if (g(mid) * glo > 0.0)
                lo = mid;
            else
                hi = mid;
        }
        return {0.5 * (lo + hi), tol};
    }

    // c~ != 0: sampled inner Hamiltonian
    const double ct_inf = cs.ct_range.lower;
    auto q_range_for = [&](double lambda_max) {
        const double bmax = std::max(std::abs(cs.b_range.lower), std::abs(cs.b_range.upper));
        const double r = bmax / (2.0 * cs.alpha_m);
        const double C0 = lambda_max - cs.c_range.lower - ct_inf;
        return r + std::sqrt(std::max(0.0, C0 / cs.alpha_m + r * r)) + 1.0;
    };
    double lambda_hi =
        std::max(1.0 + std::abs(p), cs.alpha_M * p * p +
                                        std::max(std::abs(cs.b_range.lower),
                                                 std::abs(cs.b_range.upper)) *
                                            std::abs(p) +
                                        cs.c_range.upper + cs.ct_range.upper) +
        1.0;
    for (int attempt = 0; attempt < 4; ++attempt) {
        const double Q = q_range_for(lambda_hi);
        HBarCurve curve = build_hbar_curve(cs, -Q, Q, opts);
        if (!curve.convex_ok)
            throw SolverError("lambda_infinity: convexity certificate failed for Hbar");
        const double M = curve.M;
        const int nx = static_cast<int>(curve.x_samples.size());
        std::vector<std::size_t> i_min(static_cast<std::size_t>(nx));
        for (int ix = 0; ix < nx; ++ix) {
            const auto& row = curve.values[static_cast<std::size_t>(ix)];
            i_min[ix] = static_cast<std::size_t>(
                std::min_element(row.begin(), row.end()) - row.begin());
        }
        auto branch_mean = [&](double lambda, bool plus_side) {
            double s = 0.0;
            for (int ix = 0; ix < nx; ++ix)
                s += interp_branch_root(curve.q_samples, curve.values[ix], i_min[ix], lambda,
                                        plus_side);
            return -s / nx;  // p_branch = -<q_branch>
        };
        const double band = std::max({tol, 2.0 * curve.error_bar, 1e-7});
        double cover = M + band;
        bool covered = true;
        try {
            const double edge_plus = branch_mean(cover, false);   // -<q_minus>, right edge
            const double edge_minus = branch_mean(cover, true);   // -<q_plus>, left edge
            if (p >= edge_minus && p <= edge_plus)
                return {M, std::max(band, curve.error_bar)};
            const bool plus_side = p < edge_minus;  // left branch uses the plus root
            double lo = cover, hi = cover;
            double glo = branch_mean(lo, plus_side) - p;
            int guard = 0;
            while (true) {
                hi = M + (hi - M) * 2.0;
                if (hi > lambda_hi) {
                    covered = false;
                    break;
                }
                if ((branch_mean(hi, plus_side) - p) * glo <= 0.0) break;
                if (++guard > 60) throw SolverError("lambda_infinity: branch search stalled");
            }
            if (covered) {
                while (hi - lo > std::max(tol * 0.25, 1e-13 * std::abs(hi))) {
                    const double mid = 0.5 * (lo + hi);
                    if ((branch_mean(mid, plus_side) - p) * glo > 0.0)
                        lo = mid;
                    else
                        hi = mid;
                }
                return {0.5 * (lo + hi), std::max(band, curve.error_bar)};
            }
        } catch (const SolverError&) {
            covered = false;  // sampled range too small, grow lambda_hi
        }
        if (!covered) lambda_hi *= 2.0;
    }
    throw SolverError("lambda_infinity: p outside computed branch range after retries");
}

JCurves::JCurves(CoefficientSet cs, double lambda_max, int n_grid, double tol)
    : cs_(std::move(cs)), tol_(tol), lambda_max_(lambda_max) {
    if (!cs_.c_tilde.is_zero())
        throw std::invalid_argument("JCurves: closed form requires c_tilde == 0");
    M_ = plateau_level(cs_, std::min(tol, 1e-9));
    if (!(lambda_max_ > M_)) lambda_max_ = M_ + 1.0;
    lambda_grid_.resize(static_cast<std::size_t>(n_grid));
    j_plus_.resize(lambda_grid_.size());
    j_minus_.resize(lambda_grid_.size());
    for (int i = 0; i < n_grid; ++i) {
        lambda_grid_[i] = M_ + (lambda_max_ - M_) * static_cast<double>(i) / (n_grid - 1);
        j_plus_[i] = plus_at(lambda_grid_[i]);
        j_minus_[i] = minus_at(lambda_grid_[i]);
    }
    for (std::size_t i = 1; i < lambda_grid_.size(); ++i) {
        if (!(j_plus_[i] > j_plus_[i - 1]) || !(j_minus_[i] < j_minus_[i - 1]))
            monotone_ok_ = false;
    }
}

namespace {
// The certified M may sit a hair below the true sup; negatives within the
// certification noise are clamped, anything worse is a caller error.
double sqrt_arg_guard(double arg, double lambda) {
    if (arg < -1e-8 * (1.0 + std::abs(lambda)))
        throw std::domain_error("j_curves: sqrt of negative (lambda < M)");
    return std::max(0.0, arg);
}
}  // namespace

double JCurves::plus_at(double lambda) const {
    if (lambda < M_ - 1e-8) throw std::domain_error("j_curves: lambda < M (sqrt of negative)");
    return mean_composite(
        [lambda](std::span<const double> v) {
            const double a = v[0], b = v[1], c = v[2];
            const double arg = (lambda - c) / a + b * b / (4.0 * a * a);
            return b / (2.0 * a) + std::sqrt(sqrt_arg_guard(arg, lambda));
        },
        std::vector<APFunction>{cs_.a, cs_.b, cs_.c}, tol_ * 0.1);
}

double JCurves::minus_at(double lambda) const {
    if (lambda < M_ - 1e-8) throw std::domain_error("j_curves: lambda < M (sqrt of negative)");
    return mean_composite(
        [lambda](std::span<const double> v) {
            const double a = v[0], b = v[1], c = v[2];
            const double arg = (lambda - c) / a + b * b / (4.0 * a * a);
            return b / (2.0 * a) - std::sqrt(sqrt_arg_guard(arg, lambda));
        },
        std::vector<APFunction>{cs_.a, cs_.b, cs_.c}, tol_ * 0.1);
}

double JCurves::invert(double p) const {
    const double band = std::max(tol_, 1e-10);
    const double right_edge = plus_at(M_ + band);
    const double left_edge = minus_at(M_ + band);
    if (p >= left_edge && p <= right_edge) return M_;
    const bool plus_branch = p > right_edge;
    auto val = [&](double lam) { return plus_branch ? plus_at(lam) : minus_at(lam); };
    double lo = M_ + band, hi = std::max(lambda_max_, M_ + 1.0);
    int guard = 0;
    auto g = [&](double lam) { return val(lam) - p; };
    const double glo = g(lo);
    while (g(hi) * glo > 0.0) {
        hi = M_ + (hi - M_) * 2.0;
        if (++guard > 60) throw SolverError("j_curves: inversion range exhausted");
    }
    while (hi - lo > std::max(tol_ * 0.25, 1e-13 * std::abs(hi))) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) * glo > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

JCurves j_curves(const CoefficientSet& cs, double lambda_max, int n_grid, double tol) {
    return JCurves(cs, lambda_max, n_grid, tol);
}

EigenResult positivity_gap(double a0, double b0, const APFunction& c_tilde,
                           const EigenOptions& opts) {
    if (c_tilde.is_zero()) return {0.0, 0.0};
    if (!(a0 > 0.0)) throw SolverError("positivity_gap: a0 must be positive");
    EffectiveHamiltonian eh = effective_hamiltonian(APFunction(a0), APFunction(b0), c_tilde, 0.0,
                                                    opts.tol, opts.grid, opts.schedule);
    if (!(eh.lambda > eh.error_bar))
        throw SolverError("positivity_gap: lambda does not clear its error bar");
    return {eh.lambda, eh.error_bar};
}

}  // namespace apfront
