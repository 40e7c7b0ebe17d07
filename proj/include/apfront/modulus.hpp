#pragma once

#include <optional>
#include <vector>

#include "apfront/ap_function.hpp"

namespace apfront {

/// Sampling parameters for the almost-periodicity modulus estimator.
/// rho is an estimate, not a certificate; all grids are reported back.
struct ScanParams {
    int offset_table_n = 128;    // torus offset table resolution per dimension
    int theta_grid_n = 96;       // grid for the sup-norm of a translate difference
    double z_step_factor = 128;  // shift step = (2 pi / max freq) / max(this, table_n)
    int snapshots = 512;         // resolution of the returned R-profile
};

/// rho(R; f) profile over R in [0, R_max] plus the Theta evaluation made
/// from it. rho_values[i] estimates sup_y inf_{|z| <= R_grid[i]}
/// ||f(.+y) - f(.+z)||_inf; nonincreasing by construction.
struct ModulusEstimate {
    std::vector<double> R_grid;
    std::vector<double> rho_values;
    double sigma = 0.0;
    double r = 0.0;
    double theta_value = 0.0;
    std::optional<double> tau;  // fitted decay exponent of rho, if resolvable
    // scan metadata
    int offset_table_n = 0;
    int theta_grid_n = 0;
    double z_step = 0.0;
};

/// Point estimate of rho(R; f).
double rho(const APFunction& f, double R, const ScanParams& scan = {});

/// rho profile for a single function or the max-combined profile of a
/// vector-valued coefficient tuple on a shared R grid up to R_max.
ModulusEstimate rho_profile(const std::vector<APFunction>& fns, double R_max,
                            const ScanParams& scan = {});

/// Theta_sigma(r; f) = min over sampled R in [0, 1/r) of rho(R) + (rR)^sigma.
/// Uses (and records into) the given profile; the profile must extend to 1/r.
double theta(ModulusEstimate& profile, double sigma, double r);

/// One-call convenience: builds the profile to R_max = 1/r and evaluates.
ModulusEstimate theta_estimate(const std::vector<APFunction>& fns, double sigma, double r,
                               const ScanParams& scan = {});

/// Least-squares fit of rho(R) ~ C R^{-tau} on the decaying tail.
std::optional<double> fit_tau(const ModulusEstimate& profile);

}  // namespace apfront
