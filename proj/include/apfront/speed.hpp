#pragma once

#include <functional>

#include "apfront/eigenvalue.hpp"

namespace apfront {

/// Minimizer data for omega(e;L) = inf_{p e > 0} lambda(L,p) / (p e).
struct SpeedResult {
    double omega = 0.0;
    double p_star = 0.0;  // signed momentum, p_star * e > 0
    int e = +1;
    double p_lo = 0.0, p_hi = 0.0;  // certified bracket (in q = p e > 0)
    double lambda_at_pstar = 0.0;
    double error_bar = 0.0;
    double tangency = 0.0;  // |lambda'(p*) p* - lambda(p*)|, diagnostic
    bool noise_limited = false;
};

using LambdaCurve = std::function<EigenResult(double p)>;

/// Golden-section minimization of lambda(p)/(p e) over the bracket derived
/// from the quadratic sandwich alpha_m q^2 - sup|b| q + inf(c + c~). The
/// lambda values are probed against the sandwich first; a violation aborts.
/// The effective stopping width never resolves below the lambda noise floor
/// (3x the largest error bar seen).
SpeedResult minimize_speed(const LambdaCurve& lambda_fn, int e, const CoefficientSet& cs,
                           double tol);

SpeedResult speed_finite(const CoefficientSet& cs, double L, int e, double tol,
                         const EigenOptions& opts = {});
SpeedResult speed_zero(const CoefficientSet& cs, int e, double tol,
                       const EigenOptions& opts = {});
SpeedResult speed_infinity(const CoefficientSet& cs, int e, double tol,
                           const EigenOptions& opts = {});

/// v == 1 test-function sandwich: certified inf/sup over x of
/// a p^2 - b p + c + c_tilde.
Bounds sandwich_bounds(const CoefficientSet& cs, double p);

}  // namespace apfront
