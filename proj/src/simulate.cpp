#include "apfront/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "apfront/cell_problem.hpp"

namespace apfront {

namespace {

// Factored tridiagonal (I - dt (a D2 + b D1)) with Dirichlet walls.
struct ImplicitStep {
    std::vector<double> dl, d, du;  // after elimination
    std::vector<double> m;          // forward multipliers

    ImplicitStep(const std::vector<double>& a, const std::vector<double>& b, double dt,
                 double h) {
        const std::size_t n = a.size();
        dl.assign(n, 0.0);
        d.assign(n, 0.0);
        du.assign(n, 0.0);
        m.assign(n, 0.0);
        const double ih2 = dt / (h * h), ih = dt / (2.0 * h);
        for (std::size_t i = 0; i < n; ++i) {
            const double pe = std::abs(b[i]) * h / (2.0 * a[i]);
            if (pe >= 1.0)
                throw SolverError("simulate: mesh Peclet condition violated (|b| h / 2a = " +
                                  std::to_string(pe) + ")");
            d[i] = 1.0 + 2.0 * a[i] * ih2;
            dl[i] = -(a[i] * ih2 - b[i] * ih);
            du[i] = -(a[i] * ih2 + b[i] * ih);
        }
        // pre-eliminate
        for (std::size_t i = 1; i < n; ++i) {
            m[i] = dl[i] / d[i - 1];
            d[i] -= m[i] * du[i - 1];
        }
    }

    void solve(std::vector<double>& rhs) const {
        const std::size_t n = d.size();
        for (std::size_t i = 1; i < n; ++i) rhs[i] -= m[i] * rhs[i - 1];
        rhs[n - 1] /= d[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - du[i] * rhs[i + 1]) / d[i];
    }
};

double crossing(const std::vector<double>& x, const std::vector<double>& u, double level,
                int side) {
    const std::size_t n = u.size();
    if (side > 0) {
        for (std::size_t i = n - 1; i-- > 0;) {
            if (u[i] >= level && u[i + 1] < level) {
                const double t = (u[i] - level) / (u[i] - u[i + 1]);
                return x[i] + t * (x[i + 1] - x[i]);
            }
        }
    } else {
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (u[i] < level && u[i + 1] >= level) {
                const double t = (level - u[i]) / (u[i + 1] - u[i]);
                return x[i] + t * (x[i + 1] - x[i]);
            }
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

FrontSeries simulate(const CoefficientSet& cs, double L, const SimConfig& cfg) {
    if (cfg.nx < 16) throw std::invalid_argument("simulate: nx too small");
    if (!(cfg.T > 0.0) || !(cfg.X > 0.0)) throw std::invalid_argument("simulate: bad T or X");
    if (!(cfg.bump_height > 0.0) || cfg.bump_height > 1.0)
        throw std::invalid_argument("simulate: bump height must lie in (0, 1]");
    const double react_sup = std::max(std::abs(cs.c_range.upper + cs.ct_range.upper),
                                      std::abs(cs.c_range.lower + cs.ct_range.lower));
    if (!(cs.c_range.lower > 0.0))
        throw CoefficientError("simulate: degenerate reaction (inf c <= 0)");

    const int n = cfg.nx;
    const double h = 2.0 * cfg.X / (n - 1);
    std::vector<double> x(n), a(n), b(n), r(n);
    for (int i = 0; i < n; ++i) {
        x[i] = -cfg.X + i * h;
        a[i] = cs.a(x[i] / L);
        b[i] = cs.b(x[i] / L);
        r[i] = cs.c(x[i] / L) + cs.c_tilde(x[i]);
    }
    double dt = cfg.dt;
    if (!(dt > 0.0)) dt = std::min(0.4 / std::max(react_sup, 1e-9), cfg.T / 400.0);
    if (dt * react_sup > 1.0)
        throw std::invalid_argument("simulate: dt sup(c + c~) > 1 breaks the [0,1] invariant");
    ImplicitStep step(a, b, dt, h);

    std::vector<double> u(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const double z = (x[i] - cfg.bump_center) / cfg.bump_width;
        u[i] = std::abs(z) < 1.0 ? cfg.bump_height * std::exp(1.0 - 1.0 / (1.0 - z * z)) : 0.0;
    }

    const long steps = std::lround(std::ceil(cfg.T / dt));
    int sample_every = cfg.sample_every > 0
                           ? cfg.sample_every
                           : std::max(1, static_cast<int>(steps / 400));
    FrontSeries out;
    out.fit_window = cfg.fit_window;
    out.T = cfg.T;
    out.min_u = 1.0;
    out.max_u = 0.0;
    const double margin = 0.1 * cfg.X;

    auto record = [&](double t) {
        out.times.push_back(t);
        out.front_right.push_back(crossing(x, u, cfg.level, +1));
        out.front_left.push_back(crossing(x, u, cfg.level, -1));
        double mass = 0.0, umax = 0.0;
        for (double v : u) {
            mass += v;
            umax = std::max(umax, v);
        }
        out.masses.push_back(mass * h);
        out.max_values.push_back(umax);
    };
    record(0.0);

    for (long s = 1; s <= steps; ++s) {
        for (int i = 0; i < n; ++i) u[i] = u[i] + dt * r[i] * u[i] * (1.0 - u[i]);
        step.solve(u);
        u.front() = 0.0;
        u.back() = 0.0;
        double lo = 0.0, hi = 0.0;
        for (double v : u) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        out.min_u = std::min(out.min_u, lo);
        out.max_u = std::max(out.max_u, hi);
        if (lo < -1e-12 || hi > 1.0 + 1e-12)
            throw SolverError("simulate: invariant region [0,1] violated at step " +
                              std::to_string(s));
        if (s % sample_every == 0 || s == steps) record(s * dt);
    }

    out.final_x = x;
    out.final_u = u;

    // post hoc: front must stay clear of the walls by 10% of X
    for (std::size_t i = 0; i < out.times.size(); ++i) {
        if (std::isfinite(out.front_right[i]) && out.front_right[i] > cfg.X - margin)
            out.usable = false;
        if (std::isfinite(out.front_left[i]) && out.front_left[i] < -cfg.X + margin)
            out.usable = false;
    }
    return out;
}

SpeedFit empirical_speed(const FrontSeries& series, int side) {
    if (!series.usable)
        throw SolverError("empirical_speed: series flagged unusable (front reached boundary)");
    const auto& pos = side > 0 ? series.front_right : series.front_left;
    const double t0 = series.T * (1.0 - series.fit_window);
    std::vector<double> ts, xs;
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        if (series.times[i] < t0 || !std::isfinite(pos[i])) continue;
        ts.push_back(series.times[i]);
        xs.push_back(pos[i]);
    }
    if (ts.size() < 10) throw SolverError("empirical_speed: fit window shorter than 10 samples");
    const double nn = static_cast<double>(ts.size());
    double mt = 0, mx = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        mt += ts[i];
        mx += xs[i];
    }
    mt /= nn;
    mx /= nn;
    double stt = 0, stx = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        stt += (ts[i] - mt) * (ts[i] - mt);
        stx += (ts[i] - mt) * (xs[i] - mx);
    }
    const double slope = stx / stt;
    double ss_res = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double pred = mx + slope * (ts[i] - mt);
        ss_res += (xs[i] - pred) * (xs[i] - pred);
    }
    SpeedFit fit;
    fit.speed = side > 0 ? slope : -slope;
    fit.stderr_ = std::sqrt(ss_res / std::max(1.0, nn - 2.0) / stt);
    fit.points = static_cast<int>(ts.size());
    return fit;
}

}  // namespace apfront
