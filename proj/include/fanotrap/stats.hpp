#pragma once

namespace fanotrap {

// psi(x): logarithmic derivative of the gamma function. Recurrence up to
// x >= 8, then the standard asymptotic series (max abs error << 1e-12 for
// the integer arguments used here).
double digamma(double x);

// psi'(x), same construction.
double trigamma(double x);

// A Welch/synthetic PSD bin with n averages is Gamma(n, S/n) distributed, so
//   E[ln Shat] = ln S + (psi(n) - ln n)   and   Var[ln Shat] = psi'(n).
// These two feed the log-space weighting of every spectral fit.
double log_psd_bias(int n_averages);
double log_psd_sigma(int n_averages);

}  // namespace fanotrap
