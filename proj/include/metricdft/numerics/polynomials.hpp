#pragma once

#include <span>

namespace metricdft::numerics {

/// Generalised Laguerre polynomial L_n^{(alpha)}(x) by three-term recurrence.
/// alpha must be 0, 1 or 2; x >= 0.
double laguerre_gen(int n, int alpha, double x);

/// d/dx L_n^{(alpha)}(x) = -L_{n-1}^{(alpha+1)}(x).
double laguerre_gen_derivative(int n, int alpha, double x);

/// Fills out[k] = L_k^{(alpha)}(x) for k = 0..out.size()-1. Any real alpha > -1.
void laguerre_table(double alpha, double x, std::span<double> out);

/// Legendre polynomial P_k(t) by Bonnet recurrence, |t| <= 1.
double legendre(int k, double t);
double legendre_derivative(int k, double t);

/// Fills P_k(t) for k = 0..p.size()-1 and optionally the first two derivatives.
/// Derivative spans may be empty.
void legendre_table(double t, std::span<double> p, std::span<double> dp = {},
                    std::span<double> d2p = {});

} // namespace metricdft::numerics
