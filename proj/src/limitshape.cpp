#include "qlg/limitshape.hpp"

#include <cmath>

namespace qlg::limitshape {

namespace {
constexpr double kPi = 3.14159265358979323846;

// arccos that is pi on (-inf,-1], 0 on [1,inf).
double arccos_clamped(double x) {
    if (x >= 1.0) return 0.0;
    if (x <= -1.0) return kPi;
    return std::acos(x);
}

// adaptive Simpson quadrature
double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm,
               double fb, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson(f, a, m, fa, flm, fm, tol / 2, depth - 1) +
           simpson(f, m, b, fm, frm, fb, tol / 2, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-9) {
    if (a == b) return 0.0;
    double m = 0.5 * (a + b);
    return simpson(f, a, b, f(a), f(m), f(b), tol, 28);
}
}  // namespace

ScaledParams::ScaledParams(double a_, double b_, double c_, double d_, double q_)
    : a(a_), b(b_), c(c_), d(d_), q(q_) {
    require(q > 0.0 && q < 1.0, "ScaledParams: q in (0,1) violated");
    require(a > 0.0 && b > 0.0 && c > 0.0, "ScaledParams: a,b,c > 0 violated");
    require(d >= 0.0, "ScaledParams: d >= 0 violated");
    require(b * d < 1.0, "ScaledParams: bd < 1 violated");
    require(b >= c * (1.0 - 1e-12), "ScaledParams: b >= c violated");
    require(a >= c * (1.0 - 1e-12), "ScaledParams: a >= c violated");
    require(c * q >= 1.0 - 1e-12, "ScaledParams: cq >= 1 violated");
    Mscaled = std::log(c) / (-std::log(q));
    u = c * d;
}

orthopoly::QRacahParams ScaledParams::embed(int N) const {
    double qN = std::pow(q, 1.0 / N);
    int MN = static_cast<int>(std::lround(N * Mscaled)) - 1;
    return orthopoly::QRacahParams(a, b, d, qN, MN, N);
}

HexScaledParams::HexScaledParams(double q_, double Nn_, double Tt_, double Ss_, double k2_)
    : q(q_), Nn(Nn_), Tt(Tt_), Ss(Ss_), k2(k2_) {
    require(q > 0.0 && q < 1.0, "HexScaledParams: q in (0,1) violated");
    require(Nn > 0 && Tt > 0 && Ss > 0, "HexScaledParams: N,T,S > 0 violated");
    require(Nn < Tt && Ss < Tt, "HexScaledParams: N < T and S < T violated");
    require(k2 >= 0.0 && k2 < std::pow(q, Tt), "HexScaledParams: k^2 q^{-T} < 1 violated");
    qN = std::pow(q, Nn);
    qT = std::pow(q, Tt);
    qS = std::pow(q, Ss);
}

SliceEnsemble slice_ensemble(const HexScaledParams& hp, double x) {
    require(x > 0.0 && x < hp.Tt, "slice_ensemble: x outside (0, T)");
    const double qN = hp.qN, qT = hp.qT, qS = hp.qS, k2 = hp.k2;
    const double u = std::pow(hp.q, -x);
    const double S = hp.Ss, T = hp.Tt;
    if (x <= S && x <= T - S)
        return {ScaledParams(1.0 / (qS * qN), qS / (qT * qN), u / qN, k2 * qN / qS, qN), 0.0};
    if (S <= x && x <= T - S)
        return {ScaledParams(u / qN, 1.0 / (u * qT * qN), 1.0 / (qS * qN), k2 * qN * u / 1.0, qN),
                0.0};
    if (T - S <= x && x <= S)
        return {ScaledParams(1.0 / (qT * qN * u) * 1.0, u / qN, qS / (qT * qN),
                             k2 * qN / (qT * u) * 1.0, qN),
                T - x - S};
    return {ScaledParams(qS / (qT * qN), 1.0 / (qS * qN), 1.0 / (qT * qN * u),
                         k2 * qN * qS / qT, qN),
            T - x - S};
}

Polynomial phi_plus_poly(const ScaledParams& p) {
    return Polynomial::from_roots({p.a, p.b * p.d, p.c, p.c * p.d});
}

Polynomial phi_minus_poly(const ScaledParams& p) {
    // (z-1)(a z - cd)(b z - c)(z-d)
    return Polynomial::from_roots({1.0, p.c * p.d / p.a, p.c / p.b, p.d}) * (p.a * p.b);
}

Polynomial r_poly(const ScaledParams& p) {
    Polynomial z2cd({-p.c * p.d, 0.0, 1.0});
    return phi_plus_poly(p) + phi_minus_poly(p) -
           z2cd * z2cd * ((p.a * p.b * p.q - 1.0) * (1.0 / p.q - 1.0));
}

void q0_coefficients(const ScaledParams& p, double& a2, double& a1, double& a0) {
    const double a = p.a, b = p.b, c = p.c, d = p.d, q = p.q;
    a2 = (a * b * q * q - 1.0) * (a * b * q * q - 1.0);
    a1 = q * q * q * (-2 * a * a * b * b * d - 2 * a * a * b * b - 2 * a * a * b * c -
                      2 * a * a * b - 2 * a * b * b * c * d - 2 * a * b * b * d -
                      2 * a * b * c * d - 2 * a * b * c) +
         q * q * (4 * a * a * b + 4 * a * b * b * d + 4 * a * b * c * d + 4 * a * b * c +
                  4 * a * b * d + 4 * a * b + 4 * a * c + 4 * b * c * d) +
         q * (-2 * a * b * d - 2 * a * b - 2 * a * c - 2 * a - 2 * b * c * d - 2 * b * d -
              2 * c * d - 2 * c);
    a0 = -4 * a * a * b * b * c * d * std::pow(q, 4) - 4 * c * d +
         std::pow(q, 3) * (4 * a * a * b * b * c * d + 4 * a * a * b * b * d +
                           4 * a * a * b * c * d + 4 * a * a * b * c +
                           4 * a * b * b * c * d * d + 4 * a * b * b * c * d +
                           4 * a * b * c * c * d + 4 * a * b * c * d) +
         q * q * (a * a * b * b * d * d - 2 * a * a * b * b * d + a * a * b * b -
                  2 * a * a * b * c * d - 2 * a * a * b * c - 2 * a * a * b * d -
                  2 * a * a * b + a * a * c * c - 2 * a * a * c + a * a -
                  2 * a * b * b * c * d * d - 2 * a * b * b * c * d - 2 * a * b * b * d * d -
                  2 * a * b * b * d - 2 * a * b * c * c * d - 2 * a * b * c * d * d -
                  16 * a * b * c * d - 2 * a * b * c - 2 * a * b * d - 2 * a * c * c * d -
                  2 * a * c * c - 2 * a * c * d - 2 * a * c + b * b * c * c * d * d -
                  2 * b * b * c * d * d + b * b * d * d - 2 * b * c * c * d * d -
                  2 * b * c * c * d - 2 * b * c * d * d - 2 * b * c * d + c * c * d * d -
                  2 * c * c * d + c * c) +
         q * (4 * a * b * c * d + 4 * a * b * d + 4 * a * c * d + 4 * a * c +
              4 * b * c * d * d + 4 * b * c * d + 4 * c * c * d + 4 * c * d);
}

EquilibriumData q2_roots(const ScaledParams& p) {
    EquilibriumData eq{p, phi_plus_poly(p), phi_minus_poly(p), r_poly(p), 0, 0, 0,
                       0, 0, 0, 0, 0, 0};
    q0_coefficients(p, eq.q0_a2, eq.q0_a1, eq.q0_a0);
    double disc = eq.q0_a1 * eq.q0_a1 - 4.0 * eq.q0_a2 * eq.q0_a0;
    if (disc < 0.0)
        throw std::runtime_error("q2_roots: negative Q0 discriminant (invalid parameters)");
    double sq = std::sqrt(disc);
    double y1 = (-eq.q0_a1 - sq) / (2.0 * eq.q0_a2);
    double y2 = (-eq.q0_a1 + sq) / (2.0 * eq.q0_a2);
    if (y1 > y2) std::swap(y1, y2);
    const double cd = p.c * p.d;
    auto top_root = [&](double y) {
        double dd = y * y - 4.0 * cd;
        require(dd >= 0.0, "q2_roots: z + cd/z = y unsolvable");
        return 0.5 * (y + std::sqrt(dd));
    };
    // y1 = a_+ = x4 + x7 (x4 x7 = cd), y2 = a_- = x3 + x8 (x3 x8 = cd)
    eq.x7 = top_root(y1);
    eq.x8 = top_root(y2);
    eq.x4 = (eq.x7 > 0.0) ? cd / eq.x7 : 0.0;
    eq.x3 = (eq.x8 > 0.0) ? cd / eq.x8 : 0.0;
    eq.a_plus = y1;
    eq.a_minus = y2;
    return eq;
}

std::complex<double> branch_sqrt_prod(std::complex<double> z, double a, double b) {
    return std::sqrt(z - a) * std::sqrt(z - b);
}

double mu_density(const ScaledParams& p, double x) {
    if (x <= 0.0 || x >= p.Mscaled) return 0.0;
    double z = std::pow(p.q, -x);
    double pp = phi_plus_poly(p)(z), pm = phi_minus_poly(p)(z);
    double prod = pp * pm;
    if (prod <= 0.0) {
        // outside the region where the square root is real the density is
        // already frozen; classify by the sign of R
        return r_poly(p)(z) > 0.0 ? 0.0 : 1.0;
    }
    return arccos_clamped(r_poly(p)(z) / (2.0 * std::sqrt(prod))) / kPi;
}

double limit_shape_phi_mu_route(const HexScaledParams& hp, double x, double y) {
    SliceEnsemble se = slice_ensemble(hp, x);
    return kPi * mu_density(se.params, (y + se.yshift) / hp.Nn);
}

namespace {
double phi_product_form(const HexScaledParams& hp, double x, double y) {
    const double q = hp.q, k2 = hp.k2;
    auto qp = [&](double e) { return std::pow(q, e); };
    double z = qp(-y);
    double A = (z - qp(-hp.Ss - hp.Nn)) * (z - k2 * qp(-hp.Tt)) * (z - qp(-x - hp.Nn)) *
               (z - k2 * qp(-hp.Ss - x));
    double B = qp(-2 * hp.Nn - hp.Tt) * (z - 1.0) * (z - k2 * qp(hp.Nn - x)) *
               (z - qp(hp.Tt - x - hp.Ss)) * (z - k2 * qp(hp.Nn - hp.Ss));
    double first =
        (qp(-hp.Nn) - 1.0) * (1.0 - qp(-hp.Nn - hp.Tt)) * std::pow(z * z - k2 * qp(-x - hp.Ss), 2);
    if (A * B <= 0.0) return (first + A + B) > 0.0 ? 0.0 : kPi;
    return arccos_clamped((first + A + B) / (2.0 * std::sqrt(A * B)));
}
}  // namespace

LimitShapePoint limit_shape(const HexScaledParams& hp, double x, double y) {
    require(x >= 0.0 && x <= hp.Tt, "limit_shape: x outside [0, T]");
    require(y >= hp.y_lo(x) - 1e-12 && y <= hp.y_hi(x) + 1e-12,
            "limit_shape: (x,y) outside the limiting hexagon");
    LimitShapePoint out;
    out.phi = phi_product_form(hp, x, y);
    // liquid iff the arccos argument is strictly interior
    out.in_liquid = (out.phi > 1e-12) && (out.phi < kPi - 1e-12);
    out.hhat = (y <= 0.0) ? 0.0
                          : integrate([&](double v) { return phi_product_form(hp, x, v); }, 0.0,
                                      y, 1e-9) /
                                kPi;
    return out;
}

ComplexStructure::ComplexStructure(const HexScaledParams& hp) : hex_(hp) {
    const double qN = hp.qN, qT = hp.qT, qS = hp.qS, k2 = hp.k2;
    a2_ = AffineUV{-qN * k2 / qS, qN, -qN};
    a1_ = AffineUV{(1.0 / qS - qN) + k2 * qN * (1.0 / qT + qN / qS - 2.0 / (qS * qT)),
                   qN * (1.0 / qT - 1.0),
                   -qN / qS - 1.0 / qT + 2.0 * qN + k2 * (qN / qT) * (1.0 / qS - qN)};
    double a0u = (1.0 / qT - qN) * (1.0 / qS - 1.0) * (1.0 - k2 * qN / qT);
    a0_ = AffineUV{a0u, 0.0, -a0u};
    lambda_[3] = (1.0 - qN) * (1.0 - k2 * qN) * (1.0 / qS - 1.0 / qT);
    lambda_[2] = k2 * qN * (1.0 / (qS * qT) - qN / qS + 1.0 / qS - 1.0 / qT) - 1.0 / qS + qN;
    lambda_[1] = -(1.0 / qT - qN) * (1.0 - k2 * qN / qT) * (1.0 / qS - 1.0);
    lambda_[0] = -(1.0 / qT - 1.0) * (1.0 / qT - qN) * (1.0 - k2 * qN / qT) * (1.0 / qS - 1.0);
    // Qtilde := q^{-2N} (a1^2 - 4 a2 a0), expanded over {uu, vv, uv, u, v, 1}
    auto prod6 = [](const AffineUV& f, const AffineUV& g) {
        return std::array<double, 6>{f.cu * g.cu,
                                     f.cv * g.cv,
                                     f.cu * g.cv + f.cv * g.cu,
                                     f.cu * g.c0 + f.c0 * g.cu,
                                     f.cv * g.c0 + f.c0 * g.cv,
                                     f.c0 * g.c0};
    };
    auto p11 = prod6(a1_, a1_), p20 = prod6(a2_, a0_);
    for (int i = 0; i < 6; ++i) qt_[i] = (p11[i] - 4.0 * p20[i]) / (qN * qN);
}

double ComplexStructure::qtilde(double u, double v) const {
    return qt_[0] * u * u + qt_[1] * v * v + qt_[2] * u * v + qt_[3] * u + qt_[4] * v + qt_[5];
}

std::complex<double> ComplexStructure::omega(double u, double v) const {
    double A = a2_(u, v), B = a1_(u, v), C = a0_(u, v);
    double disc = B * B - 4.0 * A * C;
    if (disc >= 0.0)
        throw std::domain_error("omega: (u,v) outside the strict liquid region");
    std::complex<double> w = (-B + std::complex<double>(0.0, std::sqrt(-disc))) / (2.0 * A);
    if (w.imag() < 0.0) w = std::conj(w);
    return w;
}

std::pair<double, double> ComplexStructure::f_inverse(std::complex<double> w) const {
    const double qN = hex_.qN, qT = hex_.qT, qS = hex_.qS, k2 = hex_.k2;
    double r = w.real(), s = w.imag();
    double rr = r * r + s * s;
    double den = lambda_[2] * rr + 2.0 * r * lambda_[1] + lambda_[0];
    double f1 = 1.0 + lambda_[3] * rr / den;
    double f2 = 1.0 + k2 / qT +
                k2 * qN * (1.0 / qS - 1.0) * (1.0 / qT - 1.0 / qS) * (1.0 - k2 / qT) / lambda_[2] -
                lambda_[1] * lambda_[3] *
                    (lambda_[2] + k2 * (qN / qS) * (1.0 / qT + 2.0 * r - 1.0)) /
                    (qN * lambda_[2] * den);
    return {f1, f2};
}

std::pair<double, double> ComplexStructure::v_band(double u) const {
    double A = qt_[1];
    double B = qt_[2] * u + qt_[4];
    double C = qt_[0] * u * u + qt_[3] * u + qt_[5];
    double disc = B * B - 4.0 * A * C;
    require(disc > 0.0, "v_band: vertical line misses the liquid ellipse");
    double sq = std::sqrt(disc);
    double v1 = (-B - sq) / (2.0 * A), v2 = (-B + sq) / (2.0 * A);
    if (v1 > v2) std::swap(v1, v2);
    return {v1, v2};
}

double gff_log_kernel_same_slice(double v1, double v2, double a, double b) {
    require(v1 > a && v1 < b && v2 > a && v2 < b,
            "gff_log_kernel_same_slice: arguments outside (a,b)");
    if (v1 == v2) throw std::domain_error("gff_log_kernel_same_slice: coincident arguments");
    double s1 = std::sqrt((v1 - a) * (b - v2)), s2 = std::sqrt((v2 - a) * (b - v1));
    return std::log(std::abs((s1 + s2) / (s1 - s2)));
}

namespace {
// Chebyshev-type coefficients c_k(f) = int_0^1 f(x(t)) cos(pi k t) dt on the
// band, x(t) = m - h cos(pi t); exact (to roundoff) for polynomial f since
// f(x(t)) is a cosine polynomial of the same degree.
std::vector<double> cheb_coeffs(const Polynomial& f, double lo, double hi, int kmax) {
    int nq = 4 * (f.degree() + kmax + 8);
    double m = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    std::vector<double> vals(nq);
    for (int i = 0; i < nq; ++i) {
        double t = (i + 0.5) / nq;
        vals[i] = f(m - h * std::cos(kPi * t));
    }
    std::vector<double> c(kmax + 1, 0.0);
    for (int k = 1; k <= kmax; ++k) {
        KahanSum s;
        for (int i = 0; i < nq; ++i) s.add(vals[i] * std::cos(kPi * k * (i + 0.5) / nq));
        c[k] = s.total() / nq;
    }
    return c;
}
}  // namespace

double clt_covariance_band(double lo, double hi, const Polynomial& f, const Polynomial& g) {
    int kmax = std::max(f.degree(), g.degree()) + 1;
    auto cf = cheb_coeffs(f, lo, hi, kmax);
    auto cg = cheb_coeffs(g, lo, hi, kmax);
    double s = 0.0;
    for (int k = 1; k <= kmax; ++k) s += k * cf[k] * cg[k];
    return s;
}

double clt_covariance(const EquilibriumData& eq, const Polynomial& f, const Polynomial& g) {
    return clt_covariance_band(eq.band_lo(), eq.band_hi(), f, g);
}

double clt_covariance_contour(const EquilibriumData& eq, const Polynomial& f, const Polynomial& g,
                              int nquad) {
    const double lo = eq.band_lo(), hi = eq.band_hi();
    const double m = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    const double r1 = 1.45 * h, r2 = 2.1 * h;
    using C = std::complex<double>;
    auto kernel = [&](C s, C t) {
        C rs = branch_sqrt_prod(s, lo, hi), rt = branch_sqrt_prod(t, lo, hi);
        C num = (s - lo) * (t - hi) + (t - lo) * (s - hi);
        return -1.0 / (2.0 * (s - t) * (s - t)) * (1.0 - num / (2.0 * rs * rt));
    };
    std::vector<C> sp(nquad), tp(nquad), dsp(nquad), dtp(nquad), fs(nquad), gt(nquad);
    for (int i = 0; i < nquad; ++i) {
        double th = 2.0 * kPi * (i + 0.5) / nquad;
        C e(std::cos(th), std::sin(th));
        sp[i] = m + r1 * e;
        tp[i] = m + r2 * e;
        dsp[i] = C(0, 1) * r1 * e * (2.0 * kPi / nquad);
        dtp[i] = C(0, 1) * r2 * e * (2.0 * kPi / nquad);
        fs[i] = f(sp[i]);
        gt[i] = g(tp[i]);
    }
    C acc(0.0, 0.0);
    for (int i = 0; i < nquad; ++i) {
        C inner(0.0, 0.0);
        for (int j = 0; j < nquad; ++j) inner += gt[j] * kernel(sp[i], tp[j]) * dtp[j];
        acc += fs[i] * dsp[i] * inner;
    }
    C val = acc / std::pow(2.0 * kPi * C(0, 1), 2);
    return val.real();
}

double gff_covariance_cross_slice(const ComplexStructure& cs, double u1, double u2,
                                  const Polynomial& f, const Polynomial& g, int nquad) {
    if (u1 == u2) {
        // same-slice reduction: int int f g (-1/2pi) log|...| = pi * clt_cov(F, G)
        auto [lo, hi] = cs.v_band(u1);
        return kPi * clt_covariance_band(lo, hi, f.antiderivative(), g.antiderivative());
    }
    auto [a1, b1] = cs.v_band(u1);
    auto [a2, b2] = cs.v_band(u2);
    double m1 = 0.5 * (a1 + b1), h1 = 0.5 * (b1 - a1);
    double m2 = 0.5 * (a2 + b2), h2 = 0.5 * (b2 - a2);
    std::vector<std::complex<double>> w1(nquad), w2(nquad);
    std::vector<double> fv(nquad), gv(nquad);
    for (int i = 0; i < nquad; ++i) {
        double t = (i + 0.5) / nquad;
        double x1 = m1 - h1 * std::cos(kPi * t), x2 = m2 - h2 * std::cos(kPi * t);
        double dx1 = h1 * kPi * std::sin(kPi * t) / nquad, dx2 = h2 * kPi * std::sin(kPi * t) / nquad;
        w1[i] = cs.omega(u1, x1);
        w2[i] = cs.omega(u2, x2);
        fv[i] = f(x1) * dx1;
        gv[i] = g(x2) * dx2;
    }
    KahanSum acc;
    for (int i = 0; i < nquad; ++i)
        for (int j = 0; j < nquad; ++j) {
            double lg = -std::log(std::abs((w1[i] - w2[j]) / (w1[i] - std::conj(w2[j]))));
            acc.add(fv[i] * gv[j] * lg);
        }
    return acc.total() / (2.0 * kPi);
}

}  // namespace qlg::limitshape

namespace qlg::limitshape {

namespace {
// nodes/weights of 64-point Gauss-Legendre on [0,1], generated on first use
const std::vector<std::pair<double, double>>& gl64() {
    static std::vector<std::pair<double, double>> nw = [] {
        // Newton iteration on Legendre P_64
        const int n = 64;
        std::vector<std::pair<double, double>> out(n);
        for (int i = 0; i < n; ++i) {
            double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                double dp = n * (x * p1 - p0) / (x * x - 1.0);
                double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (x * p1 - p0) / (x * x - 1.0);
            out[i] = {0.5 * (x + 1.0), 1.0 / ((1.0 - x * x) * dp * dp)};
        }
        return out;
    }();
    return nw;
}

template <typename F>
double gl_int(const F& f, double a, double b) {
    if (a >= b) return 0.0;
    double s = 0.0;
    for (auto [x, w] : gl64()) s += w * f(a + (b - a) * x);
    return s * (b - a);
}

// int_0^r -log|sin(pi rho / 2)| d rho, series-exact for r in [0, 0.25]
double minus_log_sin_antideriv(double r) {
    if (r <= 0.0) return 0.0;
    double z = kPi * r / 2.0;
    // -log sin(z') = -log z' + z'^2/6 + z'^4/180 + z'^6/2835 ... integrated
    double corr = (kPi / 2.0) * (kPi / 2.0) * r * r * r / 18.0 +
                  std::pow(kPi / 2.0, 4) * std::pow(r, 5) / 900.0 +
                  std::pow(kPi / 2.0, 6) * std::pow(r, 7) / 19845.0;
    return r - r * std::log(z) + corr;
}
}  // namespace

double gff_same_slice_quadrature(double lo, double hi, const Polynomial& f, const Polynomial& g,
                                 double eps) {
    const double m = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    auto X = [&](double t) { return m - h * std::cos(kPi * t); };
    auto Phi = [&](double t) { return f(X(t)) * h * kPi * std::sin(kPi * t); };
    auto Psi = [&](double s) { return g(X(s)) * h * kPi * std::sin(kPi * s); };
    auto Ksum = [&](double t, double s) {  // log|sin(pi (t+s)/2)|
        return std::log(std::abs(std::sin(kPi * (t + s) / 2.0)));
    };
    auto inner = [&](double t) {
        double slo = std::max(0.0, t - eps), shi = std::min(1.0, t + eps);
        double acc = 0.0;
        // smooth panels away from the diagonal
        acc += gl_int([&](double s) { return Psi(s) * (Ksum(t, s) -
                                       std::log(std::abs(std::sin(kPi * (t - s) / 2.0)))); },
                      0.0, slo);
        acc += gl_int([&](double s) { return Psi(s) * (Ksum(t, s) -
                                       std::log(std::abs(std::sin(kPi * (t - s) / 2.0)))); },
                      shi, 1.0);
        // strip: regular (t+s) part by GL, singular (t-s) part by subtraction
        acc += gl_int([&](double s) { return Psi(s) * Ksum(t, s); }, slo, shi);
        double psi_t = Psi(t);
        acc += psi_t * (minus_log_sin_antideriv(t - slo) + minus_log_sin_antideriv(shi - t));
        acc += gl_int(
            [&](double s) {
                double r = std::abs(t - s);
                if (r < 1e-300) return 0.0;
                return (Psi(s) - psi_t) * (-std::log(std::abs(std::sin(kPi * r / 2.0))));
            },
            slo, t);
        acc += gl_int(
            [&](double s) {
                double r = std::abs(t - s);
                if (r < 1e-300) return 0.0;
                return (Psi(s) - psi_t) * (-std::log(std::abs(std::sin(kPi * r / 2.0))));
            },
            t, shi);
        return acc;
    };
    // outer integral with panel splits at the strip-clamping kinks
    double total = 0.0;
    for (auto [pa, pb] : std::vector<std::pair<double, double>>{
             {0.0, eps}, {eps, 0.5}, {0.5, 1.0 - eps}, {1.0 - eps, 1.0}})
        total += gl_int([&](double t) { return Phi(t) * inner(t); }, pa, pb);
    return total / (2.0 * kPi);
}

}  // namespace qlg::limitshape
