#pragma once

#include <vector>

#include "apfront/cell_problem.hpp"
#include "apfront/coefficients.hpp"

namespace apfront {

struct EigenOptions {
    double tol = 1e-6;
    GridChoice grid{};
    DiscountSchedule schedule{};
    int hbar_x_samples = 65;  // torus-equidistributed slow-variable samples
    int hbar_q_samples = 49;
    int workers = 0;  // 0: hardware concurrency
};

struct EigenResult {
    double lambda = 0.0;
    double error_bar = 0.0;
};

/// Generalized principal eigenvalue lambda(L,p): effective Hamiltonian of
///   a(x/L) u'' + a(x/L) (u'-p)^2 + b(x/L) (u'-p) + c(x/L) + c~(x) = lambda.
EigenResult lambda_finite(const CoefficientSet& cs, double L, double p,
                          const EigenOptions& opts = {});

/// Homogenized constants iota(a), iota(b), iota(c).
struct IotaTriple {
    double a = 0.0, b = 0.0, c = 0.0;
};
IotaTriple iota_triple(const CoefficientSet& cs, double tol);

/// L -> 0 limit: effective Hamiltonian of
///   iota(a) u'' + iota(a)(u'-p)^2 + iota(b)(u'-p) + iota(c) + c~(x) = lambda(p);
/// for c~ == 0 both the closed form iota(a) p^2 - iota(b) p + iota(c) and the
/// solver path are evaluated and must agree within tol.
EigenResult lambda_zero(const CoefficientSet& cs, double p, const EigenOptions& opts = {});

/// Inner effective Hamiltonian Hbar(x,q) of the fast cell problem
///   a(x) psi'' + a(x)(psi'+q)^2 + b(x)(psi'+q) + c(x) + c~(y) = Hbar(x,q),
/// solved in y with x frozen; a(x) q^2 + b(x) q + c(x) exactly when c~ == 0.
EigenResult hbar(const CoefficientSet& cs, double x, double q, const EigenOptions& opts = {});

/// Sampled Hbar surface with per-x minima and branch data.
struct HBarCurve {
    std::vector<double> x_samples;
    std::vector<double> q_samples;
    std::vector<std::vector<double>> values;  // [x][q]
    std::vector<double> m_x;      // min over q at each x
    std::vector<double> q_star;   // argmin
    double M = 0.0;               // sup_x m(x)
    double error_bar = 0.0;
    bool convex_ok = true;   // discrete second differences >= -tol
    bool growth_ok = true;   // quadratic sandwich alpha_1 q^2 - C <= Hbar <= alpha_2 q^2 + C
};

HBarCurve build_hbar_curve(const CoefficientSet& cs, double q_lo, double q_hi,
                           const EigenOptions& opts = {});

/// L -> infinity limit Lambda(p): outer first-order effective Hamiltonian of
/// Hbar(x, Du - p), computed by inverting the strictly monotone momentum
/// branch p(lambda) = -<q_branch(., lambda)>; returns M on the plateau.
EigenResult lambda_infinity(const CoefficientSet& cs, double p, const EigenOptions& opts = {});

/// Momentum-level relations for c~ == 0:
///   j_pm(lambda) = <b/2a> +- < sqrt((lambda - c)/a + b^2/(4a^2)) >,
/// strictly monotone on [M, infinity), M = sup(c - b^2/4a).
class JCurves {
public:
    JCurves(CoefficientSet cs, double lambda_max, int n_grid, double tol);

    double M() const { return M_; }
    bool monotone_ok() const { return monotone_ok_; }
    const std::vector<double>& lambda_grid() const { return lambda_grid_; }
    const std::vector<double>& j_plus() const { return j_plus_; }
    const std::vector<double>& j_minus() const { return j_minus_; }

    double plus_at(double lambda) const;   // fresh quadrature evaluation
    double minus_at(double lambda) const;
    /// Lambda(p) via the plateau rule and bisection on the owning branch.
    double invert(double p) const;

private:
    CoefficientSet cs_;
    double tol_;
    double M_ = 0.0;
    double lambda_max_ = 0.0;
    std::vector<double> lambda_grid_, j_plus_, j_minus_;
    bool monotone_ok_ = true;
};

JCurves j_curves(const CoefficientSet& cs, double lambda_max, int n_grid, double tol);

/// Effective Hamiltonian of a0 u'' + a0 (u')^2 + b0 u' + c~ = lambda for a
/// mean-zero c~; throws unless the computed lambda clears its error bar
/// (strict positivity). Returns exactly 0 for c~ == 0.
EigenResult positivity_gap(double a0, double b0, const APFunction& c_tilde,
                           const EigenOptions& opts = {});

}  // namespace apfront
