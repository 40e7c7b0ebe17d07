#pragma once

#include <functional>
#include <span>
#include <vector>

#include "apfront/ap_function.hpp"

namespace apfront {

/// Pointwise map of one or more coefficient values, e.g. sqrt((lam-c)/a).
using PointMap = std::function<double(std::span<const double>)>;

/// Bohr mean of map(f_1,...,f_j) over the merged torus, by midpoint tensor
/// quadrature with grid doubling until two successive refinements move the
/// estimate by less than tol. Throws on non-convergence and propagates
/// exceptions thrown by the map (e.g. sqrt of a negative).
double mean_composite(const PointMap& map, const std::vector<APFunction>& fns, double tol);

/// Convenience overload: mean of map(f).
double mean_composite(const std::function<double(double)>& map, const APFunction& f, double tol);

/// Harmonic mean 1 / <1/a>; requires inf a > 0.
double harmonic_mean(const APFunction& a, double tol);

struct Bounds {
    double lower = 0.0;
    double upper = 0.0;
};

/// Certified inf/sup of f over the line: branch-and-bound over the torus
/// fundamental domain with exact lift gradients and a second-order
/// amplitude remainder, so the true values lie within tol of the estimates.
Bounds bounds(const APFunction& f, double tol);

/// Smooth map of several coefficients with the data the certified scan
/// needs: exact partials at a point, and global bounds for the remainder.
struct CompositeBound {
    PointMap value;
    /// writes dmap/df_i at the given coefficient values
    std::function<void(std::span<const double>, std::span<double>)> gradient;
    /// sup |dmap/df_i| over the joint range
    std::vector<double> partial_bounds;
    /// sup over the joint range of max_{i,k} |d2 map / df_i df_k|
    double hessian_bound = 0.0;
};

/// Certified inf/sup of map(f_1,...,f_j) over the line.
Bounds bounds_composite(const CompositeBound& map, const std::vector<APFunction>& fns,
                        double tol);

}  // namespace apfront
