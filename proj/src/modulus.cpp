#include "apfront/modulus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace apfront {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Sup-norm distance between f and a translate as a function of the torus
// offset: D(delta) = sup_theta |F(theta + delta) - F(theta)|. The difference
// is a trigonometric polynomial whose mode (c,s) pair is rotated by k.delta
// minus itself. When every mode involves a single generator the max
// separates across dimensions and is computed per axis; otherwise a tensor
// grid max is used.
class OffsetDistance {
public:
    OffsetDistance(const APFunction& f, int theta_n) : f_(f), theta_n_(theta_n) {
        separable_ = true;
        for (const auto& m : f.modes()) {
            int nz = 0;
            for (int d = 0; d < f.torus_dim(); ++d)
                if (m.k[d] != 0) ++nz;
            if (nz > 1) separable_ = false;
        }
    }

    double operator()(std::span<const double> delta) const {
        const auto& modes = f_.modes();
        const int dim = f_.torus_dim();
        if (dim == 0 || modes.empty()) return 0.0;
        struct Term {
            APFunction::MultiIndex k;
            double c, s;
        };
        std::vector<Term> terms(modes.size());
        double amp_total = 0.0;
        for (std::size_t i = 0; i < modes.size(); ++i) {
            double ph = 0.0;
            for (int d = 0; d < dim; ++d) ph += modes[i].k[d] * delta[d];
            const double cph = std::cos(ph), sph = std::sin(ph);
            terms[i].k = modes[i].k;
            terms[i].c = modes[i].cos_amp * (cph - 1.0) + modes[i].sin_amp * sph;
            terms[i].s = -modes[i].cos_amp * sph + modes[i].sin_amp * (cph - 1.0);
            amp_total += std::hypot(terms[i].c, terms[i].s);
        }
        if (amp_total < 1e-15) return 0.0;

        if (separable_) {
            // per-axis extrema add up across independent torus directions
            double gmax = 0.0, gmin = 0.0;
            for (int d = 0; d < dim; ++d) {
                int n_here = 0;
                double amp_single = 0.0;
                for (const auto& t : terms)
                    if (t.k[d] != 0) {
                        ++n_here;
                        amp_single = std::hypot(t.c, t.s);
                    }
                if (n_here == 0) continue;
                if (n_here == 1) {
                    gmax += amp_single;
                    gmin -= amp_single;
                    continue;
                }
                double axis_max = -std::numeric_limits<double>::infinity();
                double axis_min = std::numeric_limits<double>::infinity();
                for (int j = 0; j < theta_n_; ++j) {
                    const double th = j * (kTwoPi / theta_n_);
                    double g = 0.0;
                    for (const auto& t : terms)
                        if (t.k[d] != 0)
                            g += t.c * std::cos(t.k[d] * th) + t.s * std::sin(t.k[d] * th);
                    axis_max = std::max(axis_max, g);
                    axis_min = std::min(axis_min, g);
                }
                gmax += axis_max;
                gmin += axis_min;
            }
            return std::max(gmax, -gmin);
        }

        // tensor grid fallback
        double best = 0.0;
        std::vector<double> theta(static_cast<std::size_t>(dim), 0.0);
        long total = 1;
        for (int d = 0; d < dim; ++d) total *= theta_n_;
        for (long cell = 0; cell < total; ++cell) {
            long rem = cell;
            for (int d = 0; d < dim; ++d) {
                theta[d] = (rem % theta_n_) * (kTwoPi / theta_n_);
                rem /= theta_n_;
            }
            double g = 0.0;
            for (const auto& t : terms) {
                double ph = 0.0;
                for (int d = 0; d < dim; ++d) ph += t.k[d] * theta[d];
                g += t.c * std::cos(ph) + t.s * std::sin(ph);
            }
            best = std::max(best, std::abs(g));
        }
        return best;
    }

private:
    const APFunction& f_;
    int theta_n_;
    bool separable_ = false;
};

struct OffsetTable {
    int dim = 0;
    int n = 0;
    std::vector<double> values;
};

OffsetTable build_offset_table(const APFunction& f, int table_n, int theta_n) {
    OffsetTable tab;
    tab.dim = f.torus_dim();
    tab.n = table_n;
    if (tab.dim == 0) {
        tab.values.assign(1, 0.0);
        return tab;
    }
    long total = 1;
    for (int d = 0; d < tab.dim; ++d) total *= table_n;
    tab.values.resize(static_cast<std::size_t>(total));
    OffsetDistance dist(f, theta_n);
    std::vector<double> delta(static_cast<std::size_t>(tab.dim));
    for (long cell = 0; cell < total; ++cell) {
        long rem = cell;
        for (int d = 0; d < tab.dim; ++d) {
            delta[d] = (rem % table_n) * (kTwoPi / table_n);
            rem /= table_n;
        }
        tab.values[static_cast<std::size_t>(cell)] = dist(delta);
    }
    return tab;
}

// For every torus target phi, keep the running min over shifts |z| <= R of
// D(phi - w z); rho(R) is the max over targets, snapshotted on the R grid.
void accumulate_profile(const APFunction& f, const ScanParams& scan, double R_max,
                        std::span<const double> R_grid, std::span<double> rho_out,
                        double& z_step_out) {
    const int dim = f.torus_dim();
    if (dim == 0) {
        for (auto& v : rho_out) v = 0.0;
        z_step_out = 0.0;
        return;
    }
    OffsetTable tab = build_offset_table(f, scan.offset_table_n, scan.theta_grid_n);
    const double wmax = f.max_frequency();
    // the shift step must reach every offset-table cell of the fastest axis
    const double dz =
        (kTwoPi / wmax) / std::max<double>(scan.z_step_factor, scan.offset_table_n);
    z_step_out = dz;
    const long nz = static_cast<long>(std::ceil(R_max / dz - 1e-12));
    const int n = tab.n;
    const long total = static_cast<long>(tab.values.size());
    std::vector<double> running(tab.values.size(), std::numeric_limits<double>::infinity());
    auto gens = f.generators();

    std::array<long, APFunction::kMaxGenerators> strides{};
    long s = 1;
    for (int d = 0; d < dim; ++d) {
        strides[d] = s;
        s *= n;
    }
    std::size_t next_snapshot = 0;
    for (long iz = 0; iz <= nz; ++iz) {
        for (int sign : {1, -1}) {
            if (iz == 0 && sign < 0) continue;
            const double z = sign * iz * dz;
            std::array<long, APFunction::kMaxGenerators> shift{};
            for (int d = 0; d < dim; ++d) {
                double ph = std::fmod(gens[d] * z, kTwoPi);
                if (ph < 0) ph += kTwoPi;
                shift[d] = std::lround(ph / (kTwoPi / n)) % n;
            }
            std::array<int, APFunction::kMaxGenerators> idx{};
            for (long cell = 0; cell < total; ++cell) {
                long rem = cell, src = 0;
                for (int d = 0; d < dim; ++d) {
                    idx[d] = static_cast<int>(rem % n);
                    rem /= n;
                    long j = idx[d] - shift[d];
                    if (j < 0) j += n;
                    src += j * strides[d];
                }
                double dv = tab.values[static_cast<std::size_t>(src)];
                auto& ru = running[static_cast<std::size_t>(cell)];
                if (dv < ru) ru = dv;
            }
        }
        const double R_now = iz * dz;
        while (next_snapshot < R_grid.size() &&
               (R_grid[next_snapshot] <= R_now + 1e-12 || iz == nz)) {
            double worst = 0.0;
            for (double v : running) worst = std::max(worst, v);
            rho_out[next_snapshot] = worst;
            ++next_snapshot;
        }
        if (next_snapshot >= R_grid.size()) break;
    }
}

}  // namespace

double rho(const APFunction& f, double R, const ScanParams& scan) {
    if (R < 0.0) throw std::invalid_argument("rho: R must be nonnegative");
    std::vector<double> grid{R};
    std::vector<double> out{0.0};
    double dz = 0.0;
    accumulate_profile(f, scan, R, grid, out, dz);
    return out[0];
}

ModulusEstimate rho_profile(const std::vector<APFunction>& fns, double R_max,
                            const ScanParams& scan) {
    if (fns.empty()) throw std::invalid_argument("rho_profile: no inputs");
    if (!(R_max > 0.0)) throw std::invalid_argument("rho_profile: R_max must be positive");
    ModulusEstimate est;
    est.offset_table_n = scan.offset_table_n;
    est.theta_grid_n = scan.theta_grid_n;
    est.R_grid.resize(static_cast<std::size_t>(scan.snapshots) + 1);
    for (std::size_t i = 0; i < est.R_grid.size(); ++i)
        est.R_grid[i] = R_max * static_cast<double>(i) / scan.snapshots;
    est.rho_values.assign(est.R_grid.size(), 0.0);
    for (const auto& f : fns) {
        std::vector<double> comp(est.R_grid.size(), 0.0);
        double dz = 0.0;
        accumulate_profile(f, scan, R_max, est.R_grid, comp, dz);
        est.z_step = std::max(est.z_step, dz);
        for (std::size_t i = 0; i < comp.size(); ++i)
            est.rho_values[i] = std::max(est.rho_values[i], comp[i]);
    }
    // guard the nonincreasing shape against snapshot rounding
    for (std::size_t i = 1; i < est.rho_values.size(); ++i)
        est.rho_values[i] = std::min(est.rho_values[i], est.rho_values[i - 1]);
    est.tau = fit_tau(est);
    return est;
}

double theta(ModulusEstimate& profile, double sigma, double r) {
    if (!(sigma > 0.0) || sigma > 1.0) throw std::invalid_argument("theta: sigma in (0,1]");
    if (!(r > 0.0)) throw std::invalid_argument("theta: r must be positive");
    if (profile.R_grid.empty() || profile.R_grid.back() < 1.0 / r - 1e-9)
        throw std::invalid_argument("theta: profile does not extend to R = 1/r");
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < profile.R_grid.size(); ++i) {
        const double R = profile.R_grid[i];
        if (!(R < 1.0 / r)) break;
        best = std::min(best, profile.rho_values[i] + std::pow(r * R, sigma));
    }
    profile.sigma = sigma;
    profile.r = r;
    profile.theta_value = best;
    return best;
}

ModulusEstimate theta_estimate(const std::vector<APFunction>& fns, double sigma, double r,
                               const ScanParams& scan) {
    ModulusEstimate est = rho_profile(fns, 1.0 / r, scan);
    theta(est, sigma, r);
    return est;
}

std::optional<double> fit_tau(const ModulusEstimate& profile) {
    const double head = profile.rho_values.empty() ? 0.0 : profile.rho_values.front();
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < profile.R_grid.size(); ++i) {
        if (profile.R_grid[i] <= 0.0) continue;
        double v = profile.rho_values[i];
        if (v <= 1e-14 || v > 0.5 * head) continue;
        lx.push_back(std::log(profile.R_grid[i]));
        ly.push_back(std::log(v));
    }
    if (lx.size() < 5) return std::nullopt;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(lx.size());
    my /= static_cast<double>(lx.size());
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx <= 0) return std::nullopt;
    return -sxy / sxx;
}

}  // namespace apfront
