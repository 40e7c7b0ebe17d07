#include "apfront/rate_lab.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "apfront/parallel.hpp"

namespace apfront {

FitResult fit_rate(const std::vector<double>& L, const std::vector<double>& err) {
    if (L.size() != err.size()) throw std::invalid_argument("fit_rate: size mismatch");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < L.size(); ++i) {
        if (!(err[i] > 0.0) || !(L[i] > 0.0)) continue;  // nonpositive errors filtered
        lx.push_back(std::log(L[i]));
        ly.push_back(std::log(err[i]));
    }
    if (lx.size() < 5) throw std::invalid_argument("fit_rate: fewer than 5 positive points");
    const double n = static_cast<double>(lx.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    const double slope = sxy / sxx;
    double ss = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double pred = my + slope * (lx[i] - mx);
        ss += (ly[i] - pred) * (ly[i] - pred);
    }
    FitResult fr;
    fr.exponent = slope;
    fr.stderr_ = std::sqrt(ss / std::max(1.0, n - 2.0) / sxx);
    fr.points_used = static_cast<int>(lx.size());
    return fr;
}

namespace {

RateSeries run_sweep(const CoefficientSet& cs, int e, const std::vector<double>& L_grid,
                     double tol, const EigenOptions& opts, RateRegime regime,
                     const SpeedResult& limit,
                     const std::vector<double>& bounds_at_L, double bound_exponent) {
    RateSeries rs;
    rs.regime = regime;
    rs.omega_limit = limit.omega;
    rs.limit_error_bar = limit.error_bar;
    rs.bound_exponent = bound_exponent;
    rs.L_values = L_grid;
    rs.errors.assign(L_grid.size(), 0.0);
    rs.error_bars.assign(L_grid.size(), 0.0);
    rs.dropped.assign(L_grid.size(), "");
    rs.bound_values = bounds_at_L;

    parallel_for(L_grid.size(), opts.workers, [&](std::size_t i) {
        try {
            SpeedResult sr = speed_finite(cs, L_grid[i], e, tol, opts);
            rs.errors[i] = std::abs(sr.omega - limit.omega);
            rs.error_bars[i] = sr.error_bar + limit.error_bar;
        } catch (const std::exception& ex) {
            rs.dropped[i] = ex.what();
            rs.errors[i] = -1.0;  // filtered by the fit
        }
    });

    // a point resolves a nonzero error only when it clears its own budget
    rs.noise_budget = 0.0;
    rs.flat = true;
    for (std::size_t i = 0; i < L_grid.size(); ++i) {
        if (!rs.dropped[i].empty()) continue;
        rs.noise_budget = std::max(rs.noise_budget, 2.0 * rs.error_bars[i]);
        if (rs.errors[i] > 2.0 * rs.error_bars[i]) rs.flat = false;
    }

    rs.ratios.assign(L_grid.size(), 0.0);
    for (std::size_t i = 0; i < L_grid.size(); ++i)
        if (rs.dropped[i].empty() && rs.bound_values[i] > 0.0 && rs.errors[i] >= 0.0)
            rs.ratios[i] = rs.errors[i] / rs.bound_values[i];

    if (!rs.flat) {
        std::vector<double> Ls, errs;
        for (std::size_t i = 0; i < L_grid.size(); ++i)
            if (rs.dropped[i].empty() && rs.errors[i] > 0.0) {
                Ls.push_back(L_grid[i]);
                errs.push_back(rs.errors[i]);
            }
        try {
            rs.fit = fit_rate(Ls, errs);
        } catch (const std::invalid_argument&) {
            rs.fit = std::nullopt;  // too few resolvable points
        }
    }
    return rs;
}

}  // namespace

RateSeries sweep_small_L(const CoefficientSet& cs, int e, const std::vector<double>& L_grid,
                         double tol, double sigma, const EigenOptions& opts) {
    if (L_grid.size() < 2) throw std::invalid_argument("sweep_small_L: need several L points");
    for (double L : L_grid)
        if (!(L > 0.0) || L > 1.0)
            throw std::invalid_argument("sweep_small_L: L grid must lie in (0, 1]");
    EigenOptions tight = opts;
    tight.tol = tol / 10.0;  // the limit is computed once, tighter, and reused
    SpeedResult limit = speed_zero(cs, e, tol / 10.0, tight);

    const double L_min = *std::min_element(L_grid.begin(), L_grid.end());
    // Theta_sigma(L;(A,B,c)) of the stacked triple: max of component moduli
    ModulusEstimate profile =
        rho_profile({cs.a, cs.b, cs.c}, 1.0 / L_min + 1e-9, ScanParams{});
    std::vector<double> bound(L_grid.size());
    bool heterogeneous = !(cs.a.is_constant() && cs.b.is_constant() && cs.c.is_constant());
    for (std::size_t i = 0; i < L_grid.size(); ++i)
        bound[i] = heterogeneous ? theta(profile, sigma, L_grid[i]) : 0.0;

    return run_sweep(cs, e, L_grid, tol, opts, RateRegime::SmallL, limit, bound, sigma);
}

RateSeries sweep_large_L(const CoefficientSet& cs, int e, const std::vector<double>& L_grid,
                         double tol, const EigenOptions& opts) {
    if (L_grid.size() < 2) throw std::invalid_argument("sweep_large_L: need several L points");
    for (double L : L_grid)
        if (!(L >= 1.0)) throw std::invalid_argument("sweep_large_L: L grid must lie in [1, inf)");
    EigenOptions tight = opts;
    tight.tol = tol / 10.0;
    SpeedResult limit = speed_infinity(cs, e, tol / 10.0, tight);

    double exponent = 0.0;
    std::optional<double> tau;
    if (cs.c_tilde.is_constant()) {
        exponent = 0.0;  // no fast heterogeneity: flat reference
    } else if (cs.c_tilde.is_periodic()) {
        exponent = -0.5;
    } else {
        ModulusEstimate prof = rho_profile({cs.c_tilde}, 64.0, ScanParams{});
        tau = prof.tau;
        const double t = tau.value_or(1.0);
        exponent = -t / (2.0 * t + 1.0);
    }
    std::vector<double> bound(L_grid.size());
    for (std::size_t i = 0; i < L_grid.size(); ++i)
        bound[i] = exponent == 0.0 ? 0.0 : std::pow(L_grid[i], exponent);

    RateSeries rs =
        run_sweep(cs, e, L_grid, tol, opts, RateRegime::LargeL, limit, bound, exponent);
    rs.tau = tau;
    return rs;
}

}  // namespace apfront
