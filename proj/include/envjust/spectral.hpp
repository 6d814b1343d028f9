#pragma once

#include <span>
#include <vector>

#include "envjust/grid.hpp"

namespace envjust {

/// Unnormalised forward DFT (e^{-i k x} kernel) and inverse scaled by 1/N.
/// Backed by FFTW; plans are created lazily per thread and per size.
void fft_forward(std::span<const cdouble> in, std::span<cdouble> out);
void fft_inverse(std::span<const cdouble> in, std::span<cdouble> out);

std::vector<cdouble> fft_forward(std::span<const cdouble> in);
std::vector<cdouble> fft_inverse(std::span<const cdouble> in);

/// Derivative of order 1 or 2 by multiplication with (i k)^order in
/// transform space. The Nyquist mode is dropped for odd orders.
SpectralField spectral_derivative(const SpectralField& f, int order);

/// Samples of f(x - shift) by exact trigonometric interpolation.
SpectralField spectral_shift(const SpectralField& f, double shift);

/// Zero-pads a spectrum of size N to size M >= N (Nyquist mode dropped).
void pad_spectrum(std::span<const cdouble> in, std::span<cdouble> out);
/// Keeps the |m| < N/2 modes of a size-M spectrum, rescaled to size N.
void truncate_spectrum(std::span<const cdouble> in, std::span<cdouble> out);

/// Periodic trapezoid rule: spacing times the sample sum.
double integrate(const Grid1D& g, std::span<const double> values);
double l2_norm(const SpectralField& f);
/// Same norm evaluated from the transform (Parseval).
double l2_norm_spectral(const SpectralField& f);
double sup_norm(std::span<const cdouble> v);
double sup_norm(std::span<const double> v);

}  // namespace envjust
