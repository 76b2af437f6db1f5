#pragma once

#include <complex>
#include <utility>

#include "qlg/core.hpp"
#include "qlg/orthopoly.hpp"

namespace qlg::limitshape {

/// Scaled ensemble parameters (a, b, c, d, q) with c = q^{-M}:
/// 1 > q > 0, a,b,c > 0, d >= 0, bd < 1, b >= c, a >= c, cq >= 1.
struct ScaledParams {
    double a, b, c, d, q;
    double Mscaled;  // -log_q(c)
    double u;        // c*d

    ScaledParams(double a_, double b_, double c_, double d_, double q_);

    /// Concrete finite-N parameter set: q_N = q^{1/N}, M_N = round(N M) - 1,
    /// alpha = a, beta = b, delta = d.
    orthopoly::QRacahParams embed(int N) const;
};

/// Hexagon-form scaled parameters (N, T, S, q, k).  Only q^{-x}-type
/// combinations enter the limit objects, so a discrete hexagon (a,b,c,q,kappa)
/// embeds directly with unit scale.
struct HexScaledParams {
    double q;        // base q
    double Nn, Tt, Ss;
    double k2;       // kappa^2
    double qN, qT, qS;

    HexScaledParams(double q_, double Nn_, double Tt_, double Ss_, double k2_);

    double u_min() const { return 1.0; }
    double u_max() const { return 1.0 / qT; }

    /// Continuous window of the y coordinate at abscissa x.
    double y_lo(double x) const { return std::max(0.0, x - (Tt - Ss)); }
    double y_hi(double x) const { return std::min(Ss, x) + Nn; }
};

/// Closed-form equilibrium objects of Definition-level scaled parameters:
/// Phi+-, R (degree 4), the quadratic Q0 with Q(z)^2 factorization roots
/// x3 <= x4 (in [d, cd]) and x7 <= x8 (in [1, c]), and the band endpoints
/// a_- = x3 + x8, a_+ = x4 + x7 (note a_+ <= a_-).
struct EquilibriumData {
    ScaledParams params;
    Polynomial phi_plus, phi_minus, R;
    double q0_a2, q0_a1, q0_a0;
    double x3, x4, x7, x8;
    double a_minus, a_plus;

    double band_lo() const { return std::min(a_minus, a_plus); }
    double band_hi() const { return std::max(a_minus, a_plus); }
};

/// Ensemble form of the vertical slice through x (u = q^{-x}), following the
/// same four parameter cases as the finite theorem; mu of the returned
/// parameter set is evaluated at (y + yshift)/N.
struct SliceEnsemble {
    ScaledParams params;
    double yshift;  // 0 except on the T-t-S-shifted cases
};
SliceEnsemble slice_ensemble(const HexScaledParams& hp, double x);

Polynomial phi_plus_poly(const ScaledParams& p);
Polynomial phi_minus_poly(const ScaledParams& p);
/// R = Phi+ + Phi- - (abq - 1)(q^{-1} - 1)(z^2 - cd)^2; coincides with the
/// N -> infinity loop polynomial (identity tested in nekrasov).
Polynomial r_poly(const ScaledParams& p);

void q0_coefficients(const ScaledParams& p, double& a2, double& a1, double& a0);
EquilibriumData q2_roots(const ScaledParams& p);

/// Branch sqrt((z-a)(z-b)) holomorphic on C \ [a,b]: product of principal
/// square roots (automatically negative-real on (-inf, a)).
std::complex<double> branch_sqrt_prod(std::complex<double> z, double a, double b);

/// Equilibrium density in the lambda/N variable, values in [0,1]; the
/// arccos is clamped (>= 1 -> 0, <= -1 -> 1) outside the band and the
/// density vanishes outside (0, -log_q c).
double mu_density(const ScaledParams& p, double x);

struct LimitShapePoint {
    double phi;
    double hhat;
    bool in_liquid;
};

/// Limit-shape angle phi(x, y) and height hhat(x, y) = (1/pi) int_0^y phi.
/// phi is evaluated from the hexagon-parameter product forms; it equals
/// pi * mu_{slice-x}(y / N) identically (cross-checked in tests).
LimitShapePoint limit_shape(const HexScaledParams& hp, double x, double y);

/// phi alone via the slice-ensemble density route (the identity partner).
double limit_shape_phi_mu_route(const HexScaledParams& hp, double x, double y);

struct AffineUV {
    double cu = 0, cv = 0, c0 = 0;
    double operator()(double u, double v) const { return cu * u + cv * v + c0; }
};

/// Complex structure on the liquid region: the quadratic
/// a2(u,v) w^2 + a1(u,v) w + a0(u,v) = 0 with affine coefficients,
/// discriminant identity a1^2 - 4 a2 a0 = q^{2N} Qtilde(u,v), the ellipse
/// coefficients Qtilde = A u^2 + B v^2 + C uv + D u + E v + F, the constants
/// lambda0..lambda3, the map Omega into the upper half-plane and its inverse f.
class ComplexStructure {
  public:
    explicit ComplexStructure(const HexScaledParams& hp);

    const HexScaledParams& hex() const { return hex_; }
    const AffineUV& a2() const { return a2_; }
    const AffineUV& a1() const { return a1_; }
    const AffineUV& a0() const { return a0_; }
    double lambda(int i) const { return lambda_[i]; }
    /// Qtilde coefficients in order {uu, vv, uv, u, v, 1}.
    const std::array<double, 6>& qtilde_coeffs() const { return qt_; }

    double qtilde(double u, double v) const;
    bool in_liquid(double u, double v) const { return qtilde(u, v) < 0.0; }

    /// Root of the quadratic in the open upper half-plane; throws
    /// std::domain_error outside the strict liquid region.
    std::complex<double> omega(double u, double v) const;

    /// Inverse map f: H -> D'.
    std::pair<double, double> f_inverse(std::complex<double> w) const;

    /// v-interval cut out of the ellipse by the vertical line through u.
    std::pair<double, double> v_band(double u) const;

  private:
    HexScaledParams hex_;
    AffineUV a2_, a1_, a0_;
    double lambda_[4];
    std::array<double, 6> qt_;
};

/// log |(sqrt((v1-a)(b-v2)) + sqrt((v2-a)(b-v1))) /
///      (sqrt((v1-a)(b-v2)) - sqrt((v2-a)(b-v1)))|  for v1 != v2 in (a,b).
double gff_log_kernel_same_slice(double v1, double v2, double a, double b);

/// CLT covariance (2 pi i)^{-2} oint oint f(s) g(t) C(s,t) ds dt with the
/// one-cut kernel on the band [a_+, a_-].
/// Real route: exact Chebyshev diagonalization, cov = sum_k k c_k(f) c_k(g).
double clt_covariance(const EquilibriumData& eq, const Polynomial& f, const Polynomial& g);
/// Same kernel over an explicitly supplied band interval.
double clt_covariance_band(double lo, double hi, const Polynomial& f, const Polynomial& g);
/// Independent contour-quadrature route (two circles around the band).
double clt_covariance_contour(const EquilibriumData& eq, const Polynomial& f,
                              const Polynomial& g, int nquad = 512);

/// GFF-predicted covariance of height averages on slices u1, u2:
/// int int f(x) g(y) (-1/2pi) log |(Omega(u1,x)-Omega(u2,y)) /
/// (Omega(u1,x)-conj Omega(u2,y))| dx dy over the liquid v-ranges.
double gff_covariance_cross_slice(const ComplexStructure& cs, double u1, double u2,
                                  const Polynomial& f, const Polynomial& g, int nquad = 200);

/// Same-slice GFF integral evaluated by direct quadrature of the closed-form
/// log kernel: the square is split at the |x-y| < eps strip (in the angular
/// variable) and the strip's log singularity is integrated with its exact
/// antiderivative.  Independent of the Chebyshev reduction; target ~1e-7.
double gff_same_slice_quadrature(double lo, double hi, const Polynomial& f, const Polynomial& g,
                                 double eps = 0.1);

}  // namespace qlg::limitshape
