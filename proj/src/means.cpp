#include "apfront/means.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <stdexcept>

namespace apfront {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double tensor_midpoint(const PointMap& map, const std::vector<APFunction>& fns, int dim,
                       int n_per_dim) {
    std::vector<double> theta(static_cast<std::size_t>(std::max(dim, 1)), 0.0);
    std::vector<double> vals(fns.size());
    const double h = kTwoPi / n_per_dim;
    long total = 1;
    for (int d = 0; d < dim; ++d) total *= n_per_dim;
    double sum = 0.0;
    std::vector<int> idx(static_cast<std::size_t>(std::max(dim, 1)), 0);
    for (long cell = 0; cell < total; ++cell) {
        long rem = cell;
        for (int d = 0; d < dim; ++d) {
            idx[d] = static_cast<int>(rem % n_per_dim);
            rem /= n_per_dim;
            theta[d] = (idx[d] + 0.5) * h;
        }
        for (std::size_t i = 0; i < fns.size(); ++i) vals[i] = fns[i].lift(theta);
        sum += map(vals);
    }
    return sum / static_cast<double>(total);
}

}  // namespace

double mean_composite(const PointMap& map, const std::vector<APFunction>& fns, double tol) {
    if (fns.empty()) throw std::invalid_argument("mean_composite: no inputs");
    if (!(tol > 0.0)) throw std::invalid_argument("mean_composite: tol must be positive");
    auto merged = APFunction::common_module(fns);
    const int dim = std::max_element(merged.begin(), merged.end(),
                                     [](const APFunction& a, const APFunction& b) {
                                         return a.torus_dim() < b.torus_dim();
                                     })
                        ->torus_dim();
    if (dim == 0) {
        std::vector<double> vals(merged.size());
        for (std::size_t i = 0; i < merged.size(); ++i) vals[i] = merged[i].mean();
        return map(vals);
    }
    const int n_cap = dim == 1 ? (1 << 20) : (dim == 2 ? (1 << 11) : (1 << 8));
    double prev = tensor_midpoint(map, merged, dim, 16);
    int hits = 0;
    for (int n = 32; n <= n_cap; n *= 2) {
        double cur = tensor_midpoint(map, merged, dim, n);
        if (std::abs(cur - prev) < tol) {
            if (++hits >= 2) return cur;
        } else {
            hits = 0;
        }
        prev = cur;
    }
    throw std::runtime_error("mean_composite: quadrature did not converge to tol");
}

double mean_composite(const std::function<double(double)>& map, const APFunction& f, double tol) {
    return mean_composite([&map](std::span<const double> v) { return map(v[0]); },
                          std::vector<APFunction>{f}, tol);
}

double harmonic_mean(const APFunction& a, double tol) {
    Bounds b = bounds(a, std::min(tol, 1e-6));
    if (!(b.lower > 0.0))
        throw std::domain_error("harmonic_mean: inf a must be positive");
    double m = mean_composite([](double v) { return 1.0 / v; }, a, tol);
    return 1.0 / m;
}

namespace {

struct Cell {
    std::array<double, APFunction::kMaxGenerators> lo{};
    std::array<double, APFunction::kMaxGenerators> width{};
};

// Per-mode amplitude and |k| components, for the second-order amplitude
// remainder |F(x) - F(c) - grad F(c).(x-c)| <= remainder(half_widths).
struct ModeAbs {
    double amp = 0.0;
    std::array<double, APFunction::kMaxGenerators> k{};
};

struct Objective {
    const std::vector<APFunction>* fns = nullptr;
    const CompositeBound* map = nullptr;  // null: single function, identity map
    int dim = 0;
    std::vector<std::vector<ModeAbs>> mode_abs;
    std::vector<double> lip;  // first-order per-dim bound, for split scoring

    void init() {
        mode_abs.resize(fns->size());
        lip.assign(static_cast<std::size_t>(std::max(dim, 1)), 0.0);
        for (std::size_t i = 0; i < fns->size(); ++i) {
            for (const auto& m : (*fns)[i].modes()) {
                ModeAbs ma;
                ma.amp = std::hypot(m.cos_amp, m.sin_amp);
                for (int d = 0; d < dim; ++d) ma.k[d] = std::abs(m.k[d]);
                mode_abs[i].push_back(ma);
            }
            const double P = map ? map->partial_bounds[i] : 1.0;
            for (int d = 0; d < dim; ++d) lip[d] += P * (*fns)[i].lift_lipschitz(d);
        }
    }

    // value and exact gradient of the (composed) lift at theta
    double value_grad(std::span<const double> theta, std::span<double> grad) const {
        for (auto& g : grad) g = 0.0;
        thread_local std::vector<double> vals, fgrad, dmap;
        const std::size_t nd = static_cast<std::size_t>(std::max(dim, 1));
        vals.assign(fns->size(), 0.0);
        fgrad.assign(fns->size() * nd, 0.0);
        for (std::size_t i = 0; i < fns->size(); ++i) {
            const auto& f = (*fns)[i];
            double v = f.constant_term();
            for (const auto& m : f.modes()) {
                double ph = 0.0;
                for (int d = 0; d < dim; ++d) ph += m.k[d] * theta[d];
                const double cph = std::cos(ph), sph = std::sin(ph);
                v += m.cos_amp * cph + m.sin_amp * sph;
                const double dv = -m.cos_amp * sph + m.sin_amp * cph;
                for (int d = 0; d < dim; ++d) fgrad[i * nd + d] += m.k[d] * dv;
            }
            vals[i] = v;
        }
        if (!map) {
            for (int d = 0; d < dim; ++d) grad[d] = fgrad[d];
            return vals[0];
        }
        const double out = map->value(vals);
        dmap.assign(fns->size(), 0.0);
        map->gradient(vals, dmap);
        for (std::size_t i = 0; i < fns->size(); ++i)
            for (int d = 0; d < dim; ++d) grad[d] += dmap[i] * fgrad[i * nd + d];
        return out;
    }

    double remainder(std::span<const double> hw) const {
        double sum_P_s2 = 0.0, sum_s1 = 0.0;
        for (std::size_t i = 0; i < mode_abs.size(); ++i) {
            double s1 = 0.0, s2 = 0.0;
            for (const auto& m : mode_abs[i]) {
                double s = 0.0;
                for (int d = 0; d < dim; ++d) s += m.k[d] * hw[d];
                s1 += m.amp * s;
                s2 += m.amp * s * s;
            }
            sum_P_s2 += (map ? map->partial_bounds[i] : 1.0) * s2;
            sum_s1 += s1;
        }
        const double H = map ? map->hessian_bound : 0.0;
        return 0.5 * (sum_P_s2 + H * sum_s1 * sum_s1);
    }
};

Bounds certified_bounds(const Objective& obj, double tol) {
    const int dim = obj.dim;
    std::vector<double> theta(static_cast<std::size_t>(std::max(dim, 1)), 0.0);
    std::vector<double> grad(theta.size(), 0.0);
    if (dim == 0) {
        const double v = obj.value_grad(theta, grad);
        return {v, v};
    }
    std::vector<Cell> cells;
    Cell root;
    for (int d = 0; d < dim; ++d) {
        root.lo[d] = 0.0;
        root.width[d] = kTwoPi;
    }
    cells.push_back(root);
    double best_min = std::numeric_limits<double>::infinity();
    double best_max = -best_min;
    std::vector<double> hw(static_cast<std::size_t>(dim));
    for (int level = 0; level < 64 && !cells.empty(); ++level) {
        std::vector<Cell> next;
        for (const Cell& cell : cells) {
            for (int d = 0; d < dim; ++d) {
                theta[d] = cell.lo[d] + 0.5 * cell.width[d];
                hw[d] = 0.5 * cell.width[d];
            }
            const double v = obj.value_grad(theta, grad);
            best_min = std::min(best_min, v);
            best_max = std::max(best_max, v);
            double slack = obj.remainder(hw);
            for (int d = 0; d < dim; ++d) slack += std::abs(grad[d]) * hw[d];
            if (slack < tol) continue;  // certified within tol
            if (v - slack >= best_min + tol && v + slack <= best_max - tol)
                continue;  // cannot improve either bound
            int sd = 0;
            double score = -1.0;
            for (int d = 0; d < dim; ++d) {
                const double s = (std::abs(grad[d]) + obj.lip[d]) * cell.width[d];
                if (s > score) {
                    score = s;
                    sd = d;
                }
            }
            Cell a = cell, b = cell;
            a.width[sd] *= 0.5;
            b.width[sd] *= 0.5;
            b.lo[sd] += b.width[sd];
            next.push_back(a);
            next.push_back(b);
            if (next.size() > 4'000'000)
                throw std::runtime_error("bounds: branch-and-bound exceeded cell budget");
        }
        cells = std::move(next);
    }
    if (!cells.empty()) throw std::runtime_error("bounds: refinement did not certify tol");
    return {best_min, best_max};
}

}  // namespace

Bounds bounds(const APFunction& f, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("bounds: tol must be positive");
    Objective obj;
    std::vector<APFunction> one{f};
    obj.fns = &one;
    obj.dim = f.torus_dim();
    obj.init();
    return certified_bounds(obj, tol);
}

Bounds bounds_composite(const CompositeBound& map, const std::vector<APFunction>& fns,
                        double tol) {
    if (fns.size() != map.partial_bounds.size())
        throw std::invalid_argument("bounds_composite: one partial bound per input required");
    auto merged = APFunction::common_module(fns);
    int dim = 0;
    for (const auto& g : merged) dim = std::max(dim, g.torus_dim());
    Objective obj;
    obj.fns = &merged;
    obj.map = &map;
    obj.dim = dim;
    obj.init();
    return certified_bounds(obj, tol);
}

}  // namespace apfront
