#pragma once

#include <vector>

#include "apfront/coefficients.hpp"

namespace apfront {

struct SimConfig {
    double X = 200.0;        // domain half-width; u = 0 at the walls
    int nx = 4001;           // grid points on [-X, X]
    double dt = 0.0;         // 0: chosen from the reaction bound
    double T = 80.0;         // horizon
    double level = 0.5;      // front threshold
    double bump_center = 0.0;
    double bump_width = 2.0;
    double bump_height = 1.0;
    double fit_window = 0.5;  // trailing fraction of [0,T] used for the speed fit
    int sample_every = 0;     // 0: ~400 samples over [0,T]
};

struct FrontSeries {
    std::vector<double> times;
    std::vector<double> front_right;  // rightmost crossing of the level
    std::vector<double> front_left;
    std::vector<double> masses;
    std::vector<double> max_values;
    double min_u = 0.0, max_u = 0.0;  // over all steps (invariant region record)
    std::vector<double> final_x, final_u;  // snapshot at the horizon
    bool usable = true;               // false if the front reached the margin
    double fit_window = 0.5;
    double T = 0.0;
};

/// IMEX evolution of u_t = a_L u'' + b_L u' + (c_L + c~) u(1-u): implicit
/// centered diffusion+drift (factored once), explicit logistic reaction.
/// The scheme preserves [0,1] for dt sup(c+c~) <= 1 under the mesh Peclet
/// condition; every step is checked.
FrontSeries simulate(const CoefficientSet& cs, double L, const SimConfig& cfg);

struct SpeedFit {
    double speed = 0.0;
    double stderr_ = 0.0;
    int points = 0;
};

/// Least-squares slope of the tracked front position over the fit window.
SpeedFit empirical_speed(const FrontSeries& series, int side);

}  // namespace apfront
