#include "apfront/cell_problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "apfront/means.hpp"

namespace apfront {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Tridiagonal solve (Thomas, no pivoting; rows are diagonally dominant
// M-matrix rows under the Peclet certificate).
void thomas(std::vector<double>& dl, std::vector<double>& d, std::vector<double>& du,
            std::vector<double>& rhs) {
    const std::size_t n = d.size();
    for (std::size_t i = 1; i < n; ++i) {
        double m = dl[i] / d[i - 1];
        d[i] -= m * du[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    rhs[n - 1] /= d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - du[i] * rhs[i + 1]) / d[i];
}

struct LinearSystem {
    // row i: lower u_{i-1} + diag u_i + upper u_{i+1} (+ cyclic corners)
    std::vector<double> lower, diag, upper;
    bool periodic = false;
    double corner_first = 0.0;  // A[0][n-1]
    double corner_last = 0.0;   // A[n-1][0]

    std::vector<double> solve(std::vector<double> rhs) const {
        const std::size_t n = diag.size();
        if (!periodic) {
            auto dl = lower, d = diag, du = upper;
            thomas(dl, d, du, rhs);
            return rhs;
        }
        // Sherman-Morrison: A = T + u v^T with u = (gamma,0,..,corner_last),
        // v = (1,0,..,corner_first/gamma)
        const double gamma = -diag[0];
        auto d = diag;
        d[0] -= gamma;
        d[n - 1] -= corner_last * corner_first / gamma;
        auto dl = lower, du = upper;
        std::vector<double> q(n, 0.0);
        q[0] = gamma;
        q[n - 1] = corner_last;
        {
            auto d1 = d, dl1 = dl, du1 = du;
            thomas(dl1, d1, du1, rhs);  // rhs <- T^{-1} rhs
        }
        {
            auto d2 = d, dl2 = dl, du2 = du;
            thomas(dl2, d2, du2, q);  // q <- T^{-1} u
        }
        const double vy = rhs[0] + corner_first / gamma * rhs[n - 1];
        const double vq = q[0] + corner_first / gamma * q[n - 1];
        const double f = vy / (1.0 + vq);
        for (std::size_t i = 0; i < n; ++i) rhs[i] -= f * q[i];
        return rhs;
    }
};

// Residual of the discounted problem in shifted form u = s + w:
//   F_i = a D2w + quad a (Dw - p)^2 + b (Dw - p) + C - eps (s + w).
class Residual {
public:
    Residual(const CellCoefficients& cf, const Grid1D& g, double eps, const SolveOptions& o)
        : cf_(cf), g_(g), eps_(eps), o_(o), h_(g.h()) {}

    void eval(const std::vector<double>& w, double s, std::vector<double>& F) const {
        const int n = g_.n;
        F.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const auto [d1, d2] = derivatives(w, i);
            const double q = d1 - o_.p;
            double v = cf_.a[i] * d2 + cf_.b[i] * q + cf_.C[i] - eps_ * (s + w[i]);
            if (o_.quadratic_term) v += cf_.a[i] * q * q;
            F[i] = v;
        }
    }

    LinearSystem jacobian(const std::vector<double>& w) const {
        const int n = g_.n;
        LinearSystem J;
        J.periodic = g_.bc == BoundaryKind::Periodic;
        J.lower.assign(n, 0.0);
        J.diag.assign(n, 0.0);
        J.upper.assign(n, 0.0);
        const double ih2 = 1.0 / (h_ * h_), ih = 1.0 / (2.0 * h_);
        for (int i = 0; i < n; ++i) {
            const auto [d1, d2] = derivatives(w, i);
            const double adv =
                (o_.quadratic_term ? 2.0 * cf_.a[i] * (d1 - o_.p) : 0.0) + cf_.b[i];
            J.diag[i] = -2.0 * cf_.a[i] * ih2 - eps_;
            J.lower[i] = cf_.a[i] * ih2 - adv * ih;
            J.upper[i] = cf_.a[i] * ih2 + adv * ih;
        }
        if (J.periodic) {
            J.corner_first = J.lower[0];
            J.corner_last = J.upper[n - 1];
            J.lower[0] = 0.0;
            J.upper[n - 1] = 0.0;
        } else {
            // zero-Neumann: ghost mirroring u_{-1} = u_1, u_n = u_{n-2};
            // the gradient vanishes at the walls.
            J.diag[0] = -2.0 * cf_.a[0] * ih2 - eps_;
            J.upper[0] = 2.0 * cf_.a[0] * ih2;
            J.lower[0] = 0.0;
            J.diag[n - 1] = -2.0 * cf_.a[n - 1] * ih2 - eps_;
            J.lower[n - 1] = 2.0 * cf_.a[n - 1] * ih2;
            J.upper[n - 1] = 0.0;
        }
        return J;
    }

    double measured_peclet(const std::vector<double>& w) const {
        double pe = 0.0;
        for (int i = 0; i < g_.n; ++i) {
            const auto [d1, d2] = derivatives(w, i);
            const double adv =
                (o_.quadratic_term ? 2.0 * cf_.a[i] * (d1 - o_.p) : 0.0) + cf_.b[i];
            pe = std::max(pe, std::abs(adv) * h_ / (2.0 * cf_.a[i]));
        }
        return pe;
    }

private:
    std::pair<double, double> derivatives(const std::vector<double>& w, int i) const {
        const int n = g_.n;
        double wm, wp;
        if (g_.bc == BoundaryKind::Periodic) {
            wm = w[(i + n - 1) % n];
            wp = w[(i + 1) % n];
        } else {
            wm = i == 0 ? w[1] : w[i - 1];
            wp = i == n - 1 ? w[n - 2] : w[i + 1];
        }
        double d1 = (wp - wm) / (2.0 * h_);
        if (g_.bc == BoundaryKind::Neumann && (i == 0 || i == n - 1)) d1 = 0.0;
        const double d2 = (wp - 2.0 * w[i] + wm) / (h_ * h_);
        return {d1, d2};
    }

    const CellCoefficients& cf_;
    const Grid1D& g_;
    double eps_;
    const SolveOptions& o_;
    double h_;
};

double sup_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

struct MidStats {
    double mean = 0.0, osc = 0.0;
};

MidStats middle_half_stats(const std::vector<double>& w, double s, double eps) {
    const std::size_t n = w.size();
    const std::size_t lo = n / 4, hi = 3 * n / 4;
    double sum = 0.0, mn = std::numeric_limits<double>::infinity(), mx = -mn;
    for (std::size_t i = lo; i < hi; ++i) {
        const double v = eps * (s + w[i]);
        sum += v;
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    return {sum / static_cast<double>(hi - lo), mx - mn};
}

}  // namespace

CellCoefficients sample_coefficients(const APFunction& a, const APFunction& b,
                                     const APFunction& C, const Grid1D& grid) {
    CellCoefficients cf;
    cf.a.resize(static_cast<std::size_t>(grid.n));
    cf.b.resize(static_cast<std::size_t>(grid.n));
    cf.C.resize(static_cast<std::size_t>(grid.n));
    for (int i = 0; i < grid.n; ++i) {
        const double x = grid.x(i);
        cf.a[i] = a(x);
        cf.b[i] = b(x);
        cf.C[i] = C(x);
    }
    return cf;
}

DiscountedSolve solve_discounted(const CellCoefficients& coeffs, const Grid1D& grid, double eps,
                                 const SolveOptions& opts, const std::vector<double>* warm_start) {
    if (!(eps > 0.0)) throw SolverError("solve_discounted: eps must be positive");
    if (grid.n < 64) throw SolverError("solve_discounted: n >= 64 required");
    for (double av : coeffs.a)
        if (!(av > 0.0)) throw SolverError("solve_discounted: non-elliptic coefficient a");

    const int n = grid.n;
    double shift = 0.0;
    std::vector<double> w(static_cast<std::size_t>(n), 0.0);
    if (warm_start && static_cast<int>(warm_start->size()) == n) {
        double m = 0.0;
        for (double v : *warm_start) m += v;
        shift = m / n;
        for (int i = 0; i < n; ++i) w[i] = (*warm_start)[i] - shift;
    } else {
        // constant initial guess at the sandwich midpoint scale
        double m = 0.0;
        for (int i = 0; i < n; ++i)
            m += coeffs.C[i] + (opts.quadratic_term ? coeffs.a[i] * opts.p * opts.p : 0.0) -
                 coeffs.b[i] * opts.p;
        shift = m / n / eps;
    }

    Residual R(coeffs, grid, eps, opts);
    std::vector<double> F, Ftrial, wtrial(w.size());
    R.eval(w, shift, F);
    double fn = sup_norm(F);
    // solvable floor: second differences of w carry O(|w| macheps / h^2) noise
    const double h = grid.h();
    const double noise = 16.0 * (sup_norm(w) + 1.0) * 2.2e-16 / (h * h) +
                         8.0 * std::abs(shift) * eps * 2.2e-16;
    const double tol = std::max(opts.residual_tol, 4.0 * noise);

    int iters = 0;
    bool stalled = false;
    while (fn > tol && iters < opts.max_newton) {
        LinearSystem J = R.jacobian(w);
        std::vector<double> rhs(F.size());
        for (std::size_t i = 0; i < F.size(); ++i) rhs[i] = -F[i];
        std::vector<double> dw = J.solve(std::move(rhs));
        double alpha = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
            for (std::size_t i = 0; i < w.size(); ++i) wtrial[i] = w[i] + alpha * dw[i];
            R.eval(wtrial, shift, Ftrial);
            const double fn_trial = sup_norm(Ftrial);
            if (fn_trial < fn * (1.0 - 1e-4 * alpha) || fn_trial < tol) {
                w.swap(wtrial);
                F.swap(Ftrial);
                fn = fn_trial;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        ++iters;
        if (!accepted) {
            stalled = true;
            break;
        }
    }

    if (fn > tol && (stalled || iters >= opts.max_newton)) {
        // pseudo-time marching fallback: w_t = F, parabolic CFL step
        double amax = 0.0, vmax = 0.0;
        for (int i = 0; i < n; ++i) {
            amax = std::max(amax, coeffs.a[i]);
            vmax = std::max(vmax, std::abs(coeffs.b[i]) + 2.0 * coeffs.a[i] * std::abs(opts.p));
        }
        const double dt = 0.8 / (2.0 * amax / (h * h) + vmax / h + eps);
        for (long step = 0; step < 200000 && fn > tol; ++step) {
            for (std::size_t i = 0; i < w.size(); ++i) w[i] += dt * F[i];
            R.eval(w, shift, F);
            fn = sup_norm(F);
        }
        // polish with Newton again
        int polish = 0;
        while (fn > tol && polish < opts.max_newton) {
            LinearSystem J = R.jacobian(w);
            std::vector<double> rhs(F.size());
            for (std::size_t i = 0; i < F.size(); ++i) rhs[i] = -F[i];
            std::vector<double> dw = J.solve(std::move(rhs));
            for (std::size_t i = 0; i < w.size(); ++i) w[i] += dw[i];
            R.eval(w, shift, F);
            fn = sup_norm(F);
            ++polish;
        }
        iters += polish;
        if (fn > tol)
            throw SolverError("solve_discounted: Newton and pseudo-time marching stalled "
                              "(residual " +
                              std::to_string(fn) + "); grid too coarse?");
    }

    // renormalize the split so |w| stays small for warm starts
    double wm = 0.0;
    for (double v : w) wm += v;
    wm /= n;
    shift += wm;
    for (double& v : w) v -= wm;

    DiscountedSolve out;
    out.eps = eps;
    const MidStats ms = middle_half_stats(w, shift, eps);
    out.lambda_estimate = ms.mean;
    out.osc_eps_u = ms.osc;
    double mn = std::numeric_limits<double>::infinity(), mx = -mn;
    for (double v : w) {
        mn = std::min(mn, eps * (shift + v));
        mx = std::max(mx, eps * (shift + v));
    }
    out.osc_eps_u_full = mx - mn;
    out.residual_norm = fn;
    out.newton_iters = iters;
    out.peclet = R.measured_peclet(w);
    out.u.resize(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) out.u[i] = shift + w[i];
    return out;
}

Grid1D build_grid(const std::vector<APFunction>& merged, double p, const GridChoice& gc) {
    Grid1D g;
    g.bc = gc.bc;
    double wmin = std::numeric_limits<double>::infinity(), wmax = 0.0;
    for (const auto& f : merged) {
        if (f.is_constant()) continue;
        wmin = std::min(wmin, f.min_frequency());
        wmax = std::max(wmax, f.max_frequency());
    }
    if (!(wmax > 0.0)) {
        g.x_lo = 0.0;
        g.x_hi = 1.0;
        g.n = 64;
        return g;
    }
    const double fundamental = kTwoPi / wmin;

    // snap the truncation length to the best almost-period: minimize the
    // coefficient wrap mismatch over candidate multiples of the fundamental
    std::span<const double> gens;
    for (const auto& f : merged)
        if (f.torus_dim() > 0) {
            gens = f.generators();
            break;
        }
    std::vector<double> weight(gens.size(), 0.0);
    for (const auto& f : merged)
        for (std::size_t d = 0; d < gens.size(); ++d) weight[d] += f.lift_lipschitz(static_cast<int>(d));
    int best_k = gc.min_periods;
    double best_mis = std::numeric_limits<double>::infinity();
    for (int k = gc.min_periods; k <= gc.max_periods; ++k) {
        const double T = k * fundamental;
        double mis = 0.0;
        for (std::size_t d = 0; d < gens.size(); ++d) {
            double ph = std::fmod(gens[d] * T, kTwoPi);
            if (ph < 0) ph += kTwoPi;
            ph = std::min(ph, kTwoPi - ph);
            mis += weight[d] * ph;
        }
        if (mis < best_mis - 1e-15) {
            best_mis = mis;
            best_k = k;
        }
        if (best_mis < 1e-9) break;  // exact period found
    }
    const double T = best_k * fundamental;
    g.x_lo = 0.0;
    g.x_hi = T;
    g.snap_mismatch = best_mis;

    // mesh: resolve the fastest merged scale; respect the Peclet certificate
    double h = (kTwoPi / wmax) / gc.points_per_period * gc.grid_scale;
    double inf_a = std::numeric_limits<double>::infinity(), sup_a = 0.0;
    double sup_b = 0.0, inf_C = 0.0, sup_H0 = 0.0;
    {
        const auto& a = merged[0];
        const auto& b = merged[1];
        const auto& C = merged[2];
        Bounds ab = bounds(a, 1e-6), bb = bounds(b, 1e-6), cb = bounds(C, 1e-6);
        inf_a = ab.lower;
        sup_a = ab.upper;
        sup_b = std::max(std::abs(bb.lower), std::abs(bb.upper));
        inf_C = cb.lower;
        sup_H0 = ab.upper * p * p + sup_b * std::abs(p) + cb.upper;
    }
    if (!(inf_a > 0.0)) throw SolverError("build_grid: non-elliptic diffusion coefficient");
    const double r = sup_b / (2.0 * inf_a);
    const double Q = r + std::sqrt(std::max(0.0, (sup_H0 - inf_C) / inf_a + r * r));
    const double v_bound = 2.0 * sup_a * Q + sup_b;
    if (v_bound > 0.0) h = std::min(h, 1.8 * inf_a / v_bound);
    g.peclet = v_bound * h / (2.0 * inf_a);
    g.peclet_ok = g.peclet < 1.0;

    long n = std::lround(std::ceil(T / h));
    if (g.bc == BoundaryKind::Neumann) n += 1;
    n = std::max<long>(n, 64);
    if (n > 4'000'000)
        throw SolverError("build_grid: mesh would exceed 4e6 points; relax tolerances or scales");
    g.n = static_cast<int>(n);
    return g;
}

EffectiveHamiltonian effective_hamiltonian(const APFunction& a, const APFunction& b,
                                           const APFunction& C, double p, double tol,
                                           const GridChoice& gc, const DiscountSchedule& sched,
                                           bool quadratic_term) {
    if (sched.steps < 3) throw SolverError("effective_hamiltonian: schedule too short (< 3)");
    auto merged = APFunction::common_module({a, b, C});
    EffectiveHamiltonian out;
    out.grid = build_grid(merged, p, gc);
    Grid1D fine = out.grid;
    fine.n = out.grid.bc == BoundaryKind::Periodic ? 2 * out.grid.n : 2 * out.grid.n - 1;

    const CellCoefficients cf_c = sample_coefficients(merged[0], merged[1], merged[2], out.grid);
    const CellCoefficients cf_f = sample_coefficients(merged[0], merged[1], merged[2], fine);

    SolveOptions so;
    so.p = p;
    so.quadratic_term = quadratic_term;
    so.residual_tol = std::min(1e-10, tol * 1e-3);

    const double tail_tol = sched.tail_tol > 0 ? sched.tail_tol : tol / 4.0;
    std::vector<double> warm_c, warm_f;
    double prev_lambda_R = 0.0, prev_eps = 0.0;
    double last_osc = 0.0, last_grid_gap = 0.0;
    int tail_hits = 0;
    bool have_prev = false;

    double eps = sched.eps0;
    for (int k = 0; k < sched.max_steps; ++k, eps *= sched.ratio) {
        DiscountedSolve sc = solve_discounted(cf_c, out.grid, eps, so,
                                              warm_c.empty() ? nullptr : &warm_c);
        DiscountedSolve sf =
            solve_discounted(cf_f, fine, eps, so, warm_f.empty() ? nullptr : &warm_f);
        // seed the next (smaller) eps: u grows like lambda/eps
        warm_c = sc.u;
        warm_f = sf.u;
        const double scale = 1.0 / sched.ratio - 1.0;
        for (auto& v : warm_c) v += sc.lambda_estimate / eps * scale;
        for (auto& v : warm_f) v += sf.lambda_estimate / eps * scale;

        const double lambda_R = (4.0 * sf.lambda_estimate - sc.lambda_estimate) / 3.0;
        out.eps_used.push_back(eps);
        out.lambda_estimates.push_back(lambda_R);
        last_osc = sf.osc_eps_u;
        last_grid_gap = std::abs(sf.lambda_estimate - sc.lambda_estimate) / 3.0;

        if (have_prev) {
            // first-order discount model: lambda(eps) ~ lambda + kappa eps
            const double rich =
                (prev_eps * lambda_R - eps * prev_lambda_R) / (prev_eps - eps);
            if (!out.richardson.empty()) {
                const double inc = std::abs(rich - out.richardson.back());
                if (inc < tail_tol)
                    ++tail_hits;
                else
                    tail_hits = 0;
            }
            out.richardson.push_back(rich);
        }
        prev_lambda_R = lambda_R;
        prev_eps = eps;
        have_prev = true;
        if (k + 1 >= sched.steps && tail_hits >= 2) break;
    }

    // discount stability: |lambda(eps) - lambda(eps/2)| should not grow
    for (std::size_t i = 2; i < out.lambda_estimates.size(); ++i) {
        const double d1 = std::abs(out.lambda_estimates[i - 1] - out.lambda_estimates[i - 2]);
        const double d2 = std::abs(out.lambda_estimates[i] - out.lambda_estimates[i - 1]);
        if (d2 > d1 * 1.2 + 1e-13) out.discount_monotone = false;
    }

    if (out.richardson.size() < 2)
        throw SolverError("effective_hamiltonian: schedule too short for extrapolation");
    const double last_inc =
        std::abs(out.richardson.back() - out.richardson[out.richardson.size() - 2]);
    // no silent acceptance of a non-Cauchy discount sequence
    if (out.richardson.size() >= 4) {
        const auto& r = out.richardson;
        const double i1 = std::abs(r[r.size() - 1] - r[r.size() - 2]);
        const double i2 = std::abs(r[r.size() - 2] - r[r.size() - 3]);
        const double i3 = std::abs(r[r.size() - 3] - r[r.size() - 4]);
        if (i1 > i2 && i2 > i3 && i1 > 100.0 * tol)
            throw SolverError("effective_hamiltonian: discount extrapolation is not Cauchy");
    }

    out.lambda = out.richardson.back();
    out.osc_at_smallest_eps = last_osc;
    out.error_bar = std::max({last_osc, last_inc, last_grid_gap});
    return out;
}

double iota(const APFunction& F, const APFunction& a, double tol, bool cross_check) {
    const double aH = harmonic_mean(a, tol * 0.1);
    const double m = mean_composite(
        [](std::span<const double> v) { return v[1] / v[0]; },
        std::vector<APFunction>{a, F}, tol * 0.1 / std::max(1.0, aH));
    const double value = aH * m;
    if (cross_check && !(F.is_constant() && a.is_constant())) {
        // the linear problem eps v = a v'' + F through the same machinery
        EffectiveHamiltonian eh = effective_hamiltonian(a, APFunction(0.0), F, 0.0, tol,
                                                        GridChoice{}, DiscountSchedule{},
                                                        /*quadratic_term=*/false);
        const double budget = std::max(10.0 * tol, 3.0 * eh.error_bar);
        if (std::abs(eh.lambda - value) > budget)
            throw SolverError("iota: closed form and discounted solve disagree: " +
                              std::to_string(value) + " vs " + std::to_string(eh.lambda));
    }
    return value;
}

}  // namespace apfront
