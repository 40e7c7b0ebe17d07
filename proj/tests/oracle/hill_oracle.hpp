#pragma once

// Independent spectral oracle for periodic principal eigenvalues. Used only
// by tests; must never call into the finite-difference solver it checks.

#include <complex>
#include <map>

#include "apfront/ap_function.hpp"

namespace oracle {

// Fourier modes of a periodic coefficient with base wavenumber kappa:
// f(x) = sum_m coeff[m] e^{i m kappa x}. Throws if f is not commensurate
// with kappa.
std::map<int, std::complex<double>> fourier_modes(const apfront::APFunction& f, double kappa);

// Principal periodic eigenvalue (largest real part) of
//   a(x) phi'' + (b(x) - 2 p a(x)) phi' + (a(x) p^2 - b(x) p + C(x)) phi = lambda phi
// over the period 2 pi / kappa, via a dense (2K+1)-mode Fourier matrix. This
// is the conjugated linearized KPP operator; with a=1, b=0, p=0 it reduces
// to the Hill operator phi'' + C phi.
double principal_eigenvalue(const apfront::APFunction& a, const apfront::APFunction& b,
                            const apfront::APFunction& C, double p, double kappa, int K = 128);

}  // namespace oracle
