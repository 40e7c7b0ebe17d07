#pragma once

#include <optional>
#include <string>
#include <vector>

#include "apfront/modulus.hpp"
#include "apfront/speed.hpp"

namespace apfront {

enum class RateRegime { SmallL, LargeL };

struct FitResult {
    double exponent = 0.0;
    double stderr_ = 0.0;
    int points_used = 0;
};

/// Errors |omega(e;L) - omega(e;limit)| over an L grid with the reference
/// bound values, the per-point dominance ratios, and the fitted log-log
/// exponent. A series whose errors all sit below the noise budget is tagged
/// flat and the fit is skipped.
struct RateSeries {
    RateRegime regime = RateRegime::SmallL;
    std::vector<double> L_values;
    std::vector<double> errors;
    std::vector<double> bound_values;
    std::vector<double> ratios;       // errors / bound (dominance constants)
    std::vector<double> error_bars;   // solver budget per point
    std::vector<std::string> dropped; // per-point failures, recorded
    double omega_limit = 0.0;
    double limit_error_bar = 0.0;
    double noise_budget = 0.0;
    bool flat = false;                // all errors below the noise budget
    std::optional<FitResult> fit;     // skipped for flat series
    std::optional<double> tau;        // fitted rho decay (large-L quasi-periodic)
    double bound_exponent = 0.0;      // reference decay for the large-L bound
};

/// Ordinary least squares of log(err) on log(L); nonpositive errors are
/// filtered and at least five points are required.
FitResult fit_rate(const std::vector<double>& L, const std::vector<double>& err);

/// Small-L sweep: errors against omega(e;0), bounds Theta_sigma(L;(a,b,c)).
RateSeries sweep_small_L(const CoefficientSet& cs, int e, const std::vector<double>& L_grid,
                         double tol, double sigma = 0.9, const EigenOptions& opts = {});

/// Large-L sweep: errors against omega(e;+inf); the bound is C L^{-1/2} for
/// periodic c~ and C L^{-tau/(2tau+1)} with tau fitted from rho(R;c~)
/// otherwise (constant c~ gives a flat reference).
RateSeries sweep_large_L(const CoefficientSet& cs, int e, const std::vector<double>& L_grid,
                         double tol, const EigenOptions& opts = {});

}  // namespace apfront
