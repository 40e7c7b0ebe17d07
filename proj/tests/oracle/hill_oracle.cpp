#include "hill_oracle.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace oracle {

std::map<int, std::complex<double>> fourier_modes(const apfront::APFunction& f, double kappa) {
    std::map<int, std::complex<double>> out;
    out[0] += f.constant_term();
    auto gens = f.generators();
    for (const auto& mode : f.modes()) {
        double w = 0.0;
        for (std::size_t d = 0; d < gens.size(); ++d) w += mode.k[d] * gens[d];
        const double ratio = w / kappa;
        const long m = std::lround(ratio);
        if (std::abs(ratio - static_cast<double>(m)) > 1e-9)
            throw std::invalid_argument("fourier_modes: frequency not commensurate with kappa");
        // c cos(wx) + s sin(wx) = (c - is)/2 e^{iwx} + (c + is)/2 e^{-iwx}
        out[static_cast<int>(m)] += std::complex<double>(mode.cos_amp / 2, -mode.sin_amp / 2);
        out[static_cast<int>(-m)] += std::complex<double>(mode.cos_amp / 2, mode.sin_amp / 2);
    }
    return out;
}

double principal_eigenvalue(const apfront::APFunction& a, const apfront::APFunction& b,
                            const apfront::APFunction& C, double p, double kappa, int K) {
    const auto am = fourier_modes(a, kappa);
    const auto bm = fourier_modes(b, kappa);
    const auto cm = fourier_modes(C, kappa);
    const int n = 2 * K + 1;
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
    const std::complex<double> I(0.0, 1.0);
    // row k, column j: coefficient modes act by convolution, derivatives by
    // i j kappa on the source mode e^{i j kappa x}
    auto add = [&](const std::map<int, std::complex<double>>& coeff, auto symbol) {
        for (int k = -K; k <= K; ++k) {
            for (const auto& [m, cv] : coeff) {
                const int j = k - m;
                if (j < -K || j > K) continue;
                M(k + K, j + K) += cv * symbol(static_cast<double>(j) * kappa);
            }
        }
    };
    add(am, [&](double w) { return (I * w) * (I * w) + p * p - 2.0 * p * (I * w); });
    add(bm, [&](double w) { return (I * w) - p; });
    add(cm, [](double) { return std::complex<double>(1.0, 0.0); });

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, /*computeEigenvectors=*/false);
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) best = std::max(best, es.eigenvalues()[i].real());
    return best;
}

}  // namespace oracle
