#pragma once

#include <string>
#include <vector>

#include "apfront/ap_function.hpp"
#include "apfront/means.hpp"

namespace apfront {

/// Coefficient tuple of the two-scale KPP equation
///   u_t - a(x/L) u'' - b(x/L) u' = (c(x/L) + c_tilde(x)) u (1 - u),
/// with certified ellipticity bounds on a.
struct CoefficientSet {
    APFunction a;        // diffusion, length^2 / time
    APFunction b;        // drift, length / time
    APFunction c;        // reaction rate, 1 / time
    APFunction c_tilde;  // fixed-scale reaction perturbation, 1 / time
    double alpha_m = 0.0;  // certified lower bound on a
    double alpha_M = 0.0;  // certified upper bound on a
    Bounds b_range{};
    Bounds c_range{};
    Bounds ct_range{};
};

struct ValidationItem {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationItem> items;
    bool all_pass = true;
    void add(std::string name, bool pass, std::string detail) {
        all_pass = all_pass && pass;
        items.push_back({std::move(name), pass, std::move(detail)});
    }
};

struct CoefficientError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Computes certified coefficient ranges. Does not validate.
CoefficientSet assemble_coefficients(APFunction a, APFunction b, APFunction c,
                                     APFunction c_tilde, double tol = 1e-9);

/// Checks the standing hypotheses: uniform ellipticity of a, inf c > 0, and
/// the spreading certificate sup b^2 < 4 alpha_m (inf c + inf c_tilde), with
/// the one-dimensional relaxation (b identically 0 and inf c > 0) accepted
/// when the strict certificate fails. A mean-zero c_tilde with negative
/// parts is admitted; its range and mean are reported.
ValidationReport validate_coefficients(const CoefficientSet& cs);

/// assemble + validate; throws CoefficientError naming the violated
/// condition when validation fails.
CoefficientSet make_coefficients(APFunction a, APFunction b, APFunction c, APFunction c_tilde,
                                 double tol = 1e-9);

}  // namespace apfront
