#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace apfront {

/// One harmonic term of a real trigonometric polynomial:
///   cos_amp * cos(frequency * x) + sin_amp * sin(frequency * x).
struct Harmonic {
    double frequency = 0.0;  // rad per unit length, > 0
    double cos_amp = 0.0;
    double sin_amp = 0.0;
};

/// Real almost periodic function represented by its torus lift: a set of
/// rationally independent generator frequencies w_1..w_m (m <= 3) and a
/// finite Fourier table over multi-indices k, so that
///   f(x) = constant + sum_k [ c_k cos((k.w) x) + s_k sin((k.w) x) ].
/// The Bohr mean is the constant term, exactly. Translation and argument
/// scaling stay inside the same frequency module.
class APFunction {
public:
    static constexpr int kMaxGenerators = 3;
    using MultiIndex = std::array<int, kMaxGenerators>;

    struct Mode {
        MultiIndex k{{0, 0, 0}};  // first nonzero entry is positive
        double cos_amp = 0.0;
        double sin_amp = 0.0;
    };

    APFunction() = default;
    explicit APFunction(double constant) : constant_(constant) {}
    APFunction(double constant, const std::vector<Harmonic>& terms);

    double operator()(double x) const;

    /// Exact Bohr mean (generators are rationally independent by construction).
    double mean() const { return constant_; }
    double constant_term() const { return constant_; }

    bool is_constant() const { return modes_.empty(); }
    bool is_zero() const { return modes_.empty() && constant_ == 0.0; }
    /// True when the frequency module has a single generator (or none).
    bool is_periodic() const { return generators_.size() <= 1; }

    int torus_dim() const { return static_cast<int>(generators_.size()); }
    std::span<const double> generators() const { return generators_; }
    const std::vector<Mode>& modes() const { return modes_; }

    /// Lift value F(theta) on the torus; f(x) = F(w x).
    double lift(std::span<const double> theta) const;

    /// Smallest/largest absolute frequency among modes (0 if constant).
    double min_frequency() const;
    double max_frequency() const;

    /// Sum of mode amplitudes sqrt(c^2+s^2); |f - mean| <= amplitude_sum.
    double amplitude_sum() const;
    /// Exact bound on |f'|: sum over modes of |k.w| * amplitude.
    double lipschitz_bound() const;
    /// Per-generator Lipschitz bound of the lift: sum |k_j| * amplitude.
    double lift_lipschitz(int dim) const;

    APFunction derivative() const;
    /// f(s * x); generators scale by s.
    APFunction scaled_argument(double s) const;
    /// f(x + y), exact within the module (amplitude rotation).
    APFunction translated(double y) const;

    APFunction& operator+=(const APFunction& g);
    APFunction& operator+=(double s) { constant_ += s; return *this; }
    APFunction& operator*=(double s);

    friend APFunction operator+(APFunction f, const APFunction& g) { f += g; return f; }
    friend APFunction operator+(APFunction f, double s) { f += s; return f; }
    friend APFunction operator*(APFunction f, double s) { f *= s; return f; }
    friend APFunction operator*(double s, APFunction f) { f *= s; return f; }

    /// Rewrites all inputs over one common generator set (union of modules,
    /// with rational dependence collapsed). Throws std::invalid_argument if
    /// more than kMaxGenerators independent generators would be required.
    static std::vector<APFunction> common_module(std::vector<APFunction> fns);

private:
    std::vector<double> generators_;  // positive, rationally independent
    std::vector<Mode> modes_;
    double constant_ = 0.0;

    void absorb_frequency(double freq, double cos_amp, double sin_amp);
    void add_mode(const MultiIndex& k, double cos_amp, double sin_amp);
    void prune();
    friend struct ModuleMerger;
};

/// Detects a rational relation r = p/q with small q. Used when merging
/// frequency modules; tolerance 1e-12 relative, denominators up to 4096, so
/// declared rational ratios collapse while ratios like sqrt(2) stay
/// independent.
bool rational_ratio(double r, long& p, long& q, double tol = 1e-12, long max_q = 4096);

}  // namespace apfront
