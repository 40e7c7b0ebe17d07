#include "apfront/ap_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace apfront {

namespace {

constexpr double kAmpEps = 1e-15;

bool lex_positive(const APFunction::MultiIndex& k) {
    for (int v : k) {
        if (v > 0) return true;
        if (v < 0) return false;
    }
    return false;  // all zero
}

APFunction::MultiIndex negate(const APFunction::MultiIndex& k) {
    APFunction::MultiIndex r = k;
    for (int& v : r) v = -v;
    return r;
}

}  // namespace

bool rational_ratio(double r, long& p, long& q, double tol, long max_q) {
    if (!(std::isfinite(r)) || r <= 0.0) return false;
    // continued fraction expansion of r
    double x = r;
    long p0 = 1, q0 = 0, p1 = static_cast<long>(std::floor(x)), q1 = 1;
    if (std::abs(r - static_cast<double>(p1)) <= tol * std::max(1.0, r)) {
        if (p1 == 0) return false;
        p = p1; q = 1;
        return true;
    }
    for (int it = 0; it < 64; ++it) {
        double frac = x - std::floor(x);
        if (frac < 1e-18) break;
        x = 1.0 / frac;
        long a = static_cast<long>(std::floor(x));
        long p2 = a * p1 + p0;
        long q2 = a * q1 + q0;
        if (q2 > max_q || p2 < 0 || q2 < 0) break;  // overflow / cap
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        double approx = static_cast<double>(p1) / static_cast<double>(q1);
        if (std::abs(r - approx) <= tol * std::max(1.0, r)) {
            p = p1; q = q1;
            return true;
        }
    }
    return false;
}

APFunction::APFunction(double constant, const std::vector<Harmonic>& terms)
    : constant_(constant) {
    for (const auto& t : terms) {
        if (!(t.frequency > 0.0) || !std::isfinite(t.frequency))
            throw std::invalid_argument("APFunction: frequencies must be positive finite");
        absorb_frequency(t.frequency, t.cos_amp, t.sin_amp);
    }
    prune();
}

void APFunction::absorb_frequency(double freq, double cos_amp, double sin_amp) {
    // Try to express freq over the existing generators: freq = (p/q) * g_i.
    for (std::size_t i = 0; i < generators_.size(); ++i) {
        long p = 0, q = 0;
        if (!rational_ratio(freq / generators_[i], p, q)) continue;
        if (q > 1) {
            // refine the generator to g/q and remap all existing indices
            generators_[i] /= static_cast<double>(q);
            for (auto& m : modes_) m.k[i] *= static_cast<int>(q);
        }
        MultiIndex k{{0, 0, 0}};
        k[i] = static_cast<int>(p);
        add_mode(k, cos_amp, sin_amp);
        return;
    }
    if (generators_.size() >= kMaxGenerators)
        throw std::invalid_argument(
            "APFunction: more than " + std::to_string(kMaxGenerators) +
            " rationally independent frequencies (desk-scale cap)");
    generators_.push_back(freq);
    MultiIndex k{{0, 0, 0}};
    k[generators_.size() - 1] = 1;
    add_mode(k, cos_amp, sin_amp);
}

void APFunction::add_mode(const MultiIndex& k, double cos_amp, double sin_amp) {
    MultiIndex key = k;
    double c = cos_amp, s = sin_amp;
    if (!lex_positive(key)) {
        bool all_zero = std::all_of(key.begin(), key.end(), [](int v) { return v == 0; });
        if (all_zero) {
            constant_ += cos_amp;  // sin(0) = 0
            return;
        }
        key = negate(key);
        s = -s;  // cos even, sin odd
    }
    for (auto& m : modes_) {
        if (m.k == key) {
            m.cos_amp += c;
            m.sin_amp += s;
            return;
        }
    }
    modes_.push_back(Mode{key, c, s});
}

void APFunction::prune() {
    std::erase_if(modes_, [](const Mode& m) {
        return std::abs(m.cos_amp) < kAmpEps && std::abs(m.sin_amp) < kAmpEps;
    });
    // drop generators no mode uses
    for (int d = static_cast<int>(generators_.size()) - 1; d >= 0; --d) {
        bool used = std::any_of(modes_.begin(), modes_.end(),
                                [&](const Mode& m) { return m.k[d] != 0; });
        if (used) continue;
        generators_.erase(generators_.begin() + d);
        for (auto& m : modes_)
            for (int j = d; j < kMaxGenerators - 1; ++j) m.k[j] = m.k[j + 1];
        for (auto& m : modes_) m.k[kMaxGenerators - 1] = 0;
    }
}

double APFunction::operator()(double x) const {
    double v = constant_;
    for (const auto& m : modes_) {
        double w = 0.0;
        for (std::size_t d = 0; d < generators_.size(); ++d) w += m.k[d] * generators_[d];
        v += m.cos_amp * std::cos(w * x) + m.sin_amp * std::sin(w * x);
    }
    return v;
}

double APFunction::lift(std::span<const double> theta) const {
    double v = constant_;
    for (const auto& m : modes_) {
        double ph = 0.0;
        for (std::size_t d = 0; d < generators_.size(); ++d) ph += m.k[d] * theta[d];
        v += m.cos_amp * std::cos(ph) + m.sin_amp * std::sin(ph);
    }
    return v;
}

double APFunction::min_frequency() const {
    double w = std::numeric_limits<double>::infinity();
    for (const auto& m : modes_) {
        double f = 0.0;
        for (std::size_t d = 0; d < generators_.size(); ++d) f += m.k[d] * generators_[d];
        w = std::min(w, std::abs(f));
    }
    return modes_.empty() ? 0.0 : w;
}

double APFunction::max_frequency() const {
    double w = 0.0;
    for (const auto& m : modes_) {
        double f = 0.0;
        for (std::size_t d = 0; d < generators_.size(); ++d) f += m.k[d] * generators_[d];
        w = std::max(w, std::abs(f));
    }
    return w;
}

double APFunction::amplitude_sum() const {
    double s = 0.0;
    for (const auto& m : modes_) s += std::hypot(m.cos_amp, m.sin_amp);
    return s;
}

double APFunction::lipschitz_bound() const {
    double s = 0.0;
    for (const auto& m : modes_) {
        double f = 0.0;
        for (std::size_t d = 0; d < generators_.size(); ++d) f += m.k[d] * generators_[d];
        s += std::abs(f) * std::hypot(m.cos_amp, m.sin_amp);
    }
    return s;
}

double APFunction::lift_lipschitz(int dim) const {
    double s = 0.0;
    for (const auto& m : modes_) s += std::abs(m.k[dim]) * std::hypot(m.cos_amp, m.sin_amp);
    return s;
}

APFunction APFunction::derivative() const {
    APFunction g;
    g.generators_ = generators_;
    for (const auto& m : modes_) {
        double w = 0.0;
        for (std::size_t d = 0; d < generators_.size(); ++d) w += m.k[d] * generators_[d];
        // d/dx [c cos(wx) + s sin(wx)] = s w cos(wx) - c w sin(wx)
        g.modes_.push_back(Mode{m.k, m.sin_amp * w, -m.cos_amp * w});
    }
    g.prune();
    return g;
}

APFunction APFunction::scaled_argument(double s) const {
    if (!(s > 0.0) || !std::isfinite(s))
        throw std::invalid_argument("scaled_argument: scale must be positive finite");
    APFunction g = *this;
    for (double& w : g.generators_) w *= s;
    return g;
}

APFunction APFunction::translated(double y) const {
    APFunction g = *this;
    for (auto& m : g.modes_) {
        double w = 0.0;
        for (std::size_t d = 0; d < generators_.size(); ++d) w += m.k[d] * generators_[d];
        double cw = std::cos(w * y), sw = std::sin(w * y);
        // cos(w(x+y)) = cos wx cos wy - sin wx sin wy, etc.
        double c = m.cos_amp * cw + m.sin_amp * sw;
        double ssn = -m.cos_amp * sw + m.sin_amp * cw;
        m.cos_amp = c;
        m.sin_amp = ssn;
    }
    return g;
}

APFunction& APFunction::operator*=(double s) {
    constant_ *= s;
    for (auto& m : modes_) {
        m.cos_amp *= s;
        m.sin_amp *= s;
    }
    if (s == 0.0) {
        modes_.clear();
        generators_.clear();
    }
    return *this;
}

struct ModuleMerger {
    APFunction base;  // carries the growing generator set

    // Rewrites f over base's generators (extending them as needed) and
    // returns the remapped copy.
    APFunction remap(const APFunction& f) {
        APFunction out;
        out.constant_ = f.constant_;
        // Absorb each of f's generators into the base module first so the
        // base generator list is stable while remapping the modes.
        std::vector<std::pair<int, long>> gen_map;  // (base index, numerator multiplier)
        for (std::size_t i = 0; i < f.generators_.size(); ++i) {
            double freq = f.generators_[i];
            bool placed = false;
            for (std::size_t j = 0; j < base.generators_.size() && !placed; ++j) {
                long p = 0, q = 0;
                if (!rational_ratio(freq / base.generators_[j], p, q)) continue;
                if (q > 1) {
                    base.generators_[j] /= static_cast<double>(q);
                    for (auto& m : base.modes_) m.k[j] *= static_cast<int>(q);
                    for (auto& gm : gen_map)
                        if (gm.first == static_cast<int>(j)) gm.second *= q;
                }
                gen_map.emplace_back(static_cast<int>(j), p);
                placed = true;
            }
            if (!placed) {
                if (base.generators_.size() >= APFunction::kMaxGenerators)
                    throw std::invalid_argument(
                        "common_module: merged frequency module would exceed 3 generators");
                base.generators_.push_back(freq);
                gen_map.emplace_back(static_cast<int>(base.generators_.size()) - 1, 1);
            }
        }
        out.generators_ = base.generators_;
        for (const auto& m : f.modes_) {
            APFunction::MultiIndex k{{0, 0, 0}};
            for (std::size_t i = 0; i < f.generators_.size(); ++i) {
                long idx = static_cast<long>(m.k[i]) * gen_map[i].second;
                if (std::abs(idx) > std::numeric_limits<int>::max() / 2)
                    throw std::invalid_argument("common_module: index overflow in remap");
                k[gen_map[i].first] += static_cast<int>(idx);
            }
            out.add_mode(k, m.cos_amp, m.sin_amp);
        }
        // register the modes in the base so later generator refinements remap them
        for (const auto& m : out.modes_) base.modes_.push_back(m);
        return out;
    }
};

std::vector<APFunction> APFunction::common_module(std::vector<APFunction> fns) {
    ModuleMerger merger;
    std::vector<APFunction> drafts;
    drafts.reserve(fns.size());
    for (const auto& f : fns) drafts.push_back(merger.remap(f));
    // Final remap against the settled generator list (earlier drafts may
    // predate a generator refinement; merger.base tracked their modes).
    // Outputs deliberately share one generator list, unused axes included,
    // so multi-indices stay comparable across the tuple.
    std::vector<APFunction> out;
    out.reserve(fns.size());
    std::size_t cursor = 0;
    for (auto& d : drafts) {
        d.generators_ = merger.base.generators_;
        for (auto& m : d.modes_) m.k = merger.base.modes_[cursor++].k;
        out.push_back(std::move(d));
    }
    return out;
}

APFunction& APFunction::operator+=(const APFunction& g) {
    auto both = common_module({*this, g});
    APFunction sum = std::move(both[0]);
    sum.constant_ += g.constant_;
    for (const auto& m : both[1].modes_) sum.add_mode(m.k, m.cos_amp, m.sin_amp);
    sum.prune();
    *this = std::move(sum);
    return *this;
}

}  // namespace apfront
