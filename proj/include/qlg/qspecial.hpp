#pragma once

#include <vector>

#include "qlg/core.hpp"

namespace qlg::qspecial {

/// Finite q-Pochhammer symbol (a;q)_k = prod_{i=0}^{k-1} (1 - a q^i),
/// evaluated factor by factor in index order.
double q_pochhammer(double a, double q, int k);

/// Same product in signed-log form; safe for arguments where the plain
/// product over- or underflows (a ~ q^{-M} with M large).
LogVal log_q_pochhammer(double a, double q, int k);

/// Infinite q-Pochhammer symbol (a;q)_inf = prod_{k>=0} (1 - a q^k),
/// truncated once |a| q^K < tol * (1 - q).  The dropped tail multiplies the
/// result by exp(eps) with |eps| <= |a| q^K / ((1-q)(1 - |a| q^K)), so the
/// relative error is below ~tol/(1 - tol) for tol << 1.
/// Requires q in (0,1) and |a| q < 1; throws std::domain_error otherwise.
double q_pochhammer_inf(double a, double q, double tol = 1e-15);

/// log of (a;q)_inf for a in [0, 1); used by weight asymptotics.
double log_q_pochhammer_inf(double a, double q, double tol = 1e-15);

/// q-Gamma function Gamma_q(x) = (1-q)^{1-x} (q;q)_inf / (q^x;q)_inf.
/// Poles at nonpositive integers x are reported as std::domain_error.
double q_gamma(double x, double q);

/// Terminating basic hypergeometric sum
///   sum_{k=0}^{kmax} (a1,a2,a3,a4;q)_k / (b1,b2,b3;q)_k * z^k / (q;q)_k.
/// A vanishing denominator factor before the numerator terminates is
/// reported as std::domain_error with the offending index.
double phi43(const double a[4], const double b[3], double q, double z, int kmax);

/// Dilogarithm Li2(x) = sum_{k>=1} x^k / k^2 on [0, 1].  Near x = 1 the
/// reflection Li2(x) + Li2(1-x) = pi^2/6 - log(x) log(1-x) is used.
double dilog(double x);

}  // namespace qlg::qspecial
