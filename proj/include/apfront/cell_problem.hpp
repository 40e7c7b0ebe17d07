#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "apfront/ap_function.hpp"

namespace apfront {

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class BoundaryKind { Periodic, Neumann };

/// Uniform 1-D grid on a truncated line. Periodic grids cover [x_lo, x_hi)
/// with n cells of width h = (x_hi - x_lo)/n and wrap the coefficients at
/// the truncation points; Neumann grids cover [x_lo, x_hi] with n points and
/// h = (x_hi - x_lo)/(n-1).
struct Grid1D {
    double x_lo = 0.0;
    double x_hi = 1.0;
    int n = 64;
    BoundaryKind bc = BoundaryKind::Periodic;
    double h() const {
        return bc == BoundaryKind::Periodic ? (x_hi - x_lo) / n : (x_hi - x_lo) / (n - 1);
    }
    double x(int i) const { return x_lo + i * h(); }
    // recorded certificates
    double peclet = 0.0;          // h sup|2 a (u'-p) + b| / (2 inf a), estimated
    double snap_mismatch = 0.0;   // coefficient wrap mismatch at the seam
    bool peclet_ok = true;
};

/// Scalar coefficient samples of the cell Hamiltonian on a grid:
///   H(x, u'-p, u'') = a u'' + a (u'-p)^2 + b (u'-p) + C.
struct CellCoefficients {
    std::vector<double> a;
    std::vector<double> b;
    std::vector<double> C;
};

CellCoefficients sample_coefficients(const APFunction& a, const APFunction& b,
                                     const APFunction& C, const Grid1D& grid);

struct SolveOptions {
    double residual_tol = 1e-10;
    int max_newton = 60;
    bool quadratic_term = true;  // off: the linear problem eps v = a v'' + b v' + C
    double p = 0.0;
};

/// Discrete solution of the discounted problem H(x, Du, D^2u) = eps u.
struct DiscountedSolve {
    std::vector<double> u;
    double eps = 0.0;
    double lambda_estimate = 0.0;  // mean of eps*u over the middle half
    double osc_eps_u = 0.0;        // oscillation of eps*u over the middle half
    double osc_eps_u_full = 0.0;
    double residual_norm = 0.0;
    int newton_iters = 0;
    double peclet = 0.0;  // measured at the solution
};

/// Damped-Newton solve of the discounted cell problem (central second
/// difference, central gradient under a Peclet certificate), with a
/// pseudo-time marching fallback. warm_start, when given, seeds Newton.
DiscountedSolve solve_discounted(const CellCoefficients& coeffs, const Grid1D& grid, double eps,
                                 const SolveOptions& opts,
                                 const std::vector<double>* warm_start = nullptr);

/// How the truncated domain and mesh are chosen for an effective-Hamiltonian
/// solve. The domain is snapped to a near-period of the assembled
/// coefficients (the best almost-period among [min_periods, max_periods]
/// multiples of the slowest fundamental scale), which keeps the periodic
/// wrap mismatch small for quasi-periodic data.
struct GridChoice {
    double points_per_period = 48;  // of the fastest merged frequency
    int min_periods = 40;           // of the slowest merged frequency
    int max_periods = 512;
    BoundaryKind bc = BoundaryKind::Periodic;
    double grid_scale = 1.0;  // <1 refines, >1 coarsens (CLI override)
};

Grid1D build_grid(const std::vector<APFunction>& merged_coeffs, double p, const GridChoice& gc);

struct DiscountSchedule {
    double eps0 = 1.0;
    double ratio = 0.5;
    int steps = 12;       // baseline length
    int max_steps = 26;   // adaptive extension cap
    double tail_tol = 0.0;  // 0: derived from the solve tolerance
};

/// Effective Hamiltonian by vanishing discount: Richardson extrapolation in
/// eps of the grid-extrapolated lambda estimates, with the honest error bar
/// max(osc of eps*u at the smallest eps, last extrapolation increment,
/// coarse/fine grid gap).
struct EffectiveHamiltonian {
    double lambda = 0.0;
    double error_bar = 0.0;
    std::vector<double> eps_used;
    std::vector<double> lambda_estimates;   // per eps, fine grid, h-extrapolated
    std::vector<double> richardson;         // running eps-extrapolants
    double osc_at_smallest_eps = 0.0;
    bool discount_monotone = true;  // |increments| nonincreasing along the schedule
    Grid1D grid;
};

EffectiveHamiltonian effective_hamiltonian(const APFunction& a, const APFunction& b,
                                           const APFunction& C, double p, double tol,
                                           const GridChoice& gc = {},
                                           const DiscountSchedule& sched = {},
                                           bool quadratic_term = true);

/// Homogenization constant of a(x) v'' + F(x) = iota(F): the closed form
/// <a>_H <a^{-1} F>, cross-checked against a discounted solve of the linear
/// problem within 10 tol.
double iota(const APFunction& F, const APFunction& a, double tol, bool cross_check = true);

}  // namespace apfront
