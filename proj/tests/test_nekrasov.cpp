#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <complex>
#include <random>

#include "qlg/nekrasov.hpp"

using namespace qlg;
using namespace qlg::nekrasov;
using boost::multiprecision::cpp_rational;

namespace {
ensemble::QRacahParams qr_params(int M, int N, double q = 0.55, double am = 1.7, double bm = 2.1,
                                 double dfrac = 0.35) {
    double gamma = std::pow(q, -(M + 1));
    return ensemble::QRacahParams(am * gamma, bm * gamma, dfrac / (bm * gamma), q, M, N);
}

// theta = 1/2 ensemble with a positivity-preserving PhiPair carrying the
// mandated boundary zeros (extra far-away roots fix the overall sign).
struct HalfThetaInstance {
    ThetaEnsembleSpec spec;
    PhiPair phis;
    int phi_degree;
};

HalfThetaInstance make_half_theta() {
    ThetaEnsembleSpec spec;
    spec.theta = 0.5;
    spec.q = 0.6;
    spec.u = 0.1;
    spec.intervals = {Interval{0, 5, 3}};
    const double q = spec.q, th = spec.theta, u = spec.u;
    int N = 3, a = 0, b = 5;
    double zp1 = std::pow(q, -b - (N - 1) * th), zp2 = u * std::pow(q, a - 1);
    double zm1 = std::pow(q, -a), zm2 = u * std::pow(q, b - 1 + (N - 1) * th);
    double A = 2.0 * zp1 / q, B = 0.5 * zm2;
    Polynomial plus = Polynomial::from_roots({zp1, zp2, A});
    Polynomial minus = Polynomial::from_roots({zm1, zm2, B});
    PhiPair phis(spec, plus, minus);
    spec.log_weight = synthesize_weight(spec, phis, 1.0);
    return HalfThetaInstance{spec, phis, 3};
}
}  // namespace

TEST_CASE("interaction at theta = 1 collapses to squared differences") {
    ThetaEnsembleSpec spec;
    spec.theta = 1.0;
    spec.q = 0.62;
    spec.u = 0.2;
    double q = spec.q, u = spec.u;
    for (auto [li, lj] : std::vector<std::pair<double, double>>{{0, 1}, {0, 3}, {2, 5}, {1, 7}}) {
        double elli = std::pow(q, -li) + u * std::pow(q, li);
        double ellj = std::pow(q, -lj) + u * std::pow(q, lj);
        double h = interaction_h(spec, li, lj);
        CHECK(h * std::pow(1.0 - q, 4) ==
              doctest::Approx((ellj - elli) * (ellj - elli)).epsilon(1e-10));
    }
    CHECK_THROWS_AS(interaction_h(spec, 3.0, 3.0), std::invalid_argument);
}

TEST_CASE("interaction: small-u continuity of the second Gamma block") {
    ThetaEnsembleSpec s0, s1;
    s0.theta = s1.theta = 0.7;
    s0.q = s1.q = 0.55;
    s0.u = 0.0;
    s1.u = 1e-8;
    double h0 = interaction_h(s0, 1.0, 3.1);
    double h1 = interaction_h(s1, 1.0, 3.1);
    CHECK(h1 == doctest::Approx(h0).epsilon(1e-5));
}

TEST_CASE("interaction at integer theta matches the telescoping rational oracle") {
    // theta = 2: Gamma_q ratios become finite products of (1-q^x)/(1-q)
    const cpp_rational q(1, 2), u(1, 8);
    const int li = 1, lj = 5;  // lambda values (x + 2(i-1) with integer x)
    auto ratio_block = [&](cpp_rational base) {
        // Gq(base+1) Gq(base+2) / (Gq(base) Gq(base-1))
        // = [(1-q^base)/(1-q)] * [(1-q^{base-1})(1-q^base)(1-q^{base+1})/(1-q)^3]
        auto qp = [&](cpp_rational e) {
            cpp_rational r = 1;
            for (int i = 0; i < static_cast<int>(e); ++i) r *= q;
            return r;
        };
        cpp_rational one = 1;
        return (one - qp(base)) / (one - q) * (one - qp(base - 1)) * (one - qp(base)) *
               (one - qp(base + 1)) / ((one - q) * (one - q) * (one - q));
    };
    // v with q^v = u: u = q^3
    cpp_rational h = 1;
    {  // q^{-2 theta lj} = q^{-4*5} = q^{-20}
        cpp_rational r = 1;
        for (int i = 0; i < 20; ++i) r *= q;
        h = 1 / r;
    }
    h *= ratio_block(lj - li);
    h *= ratio_block(lj + li + 3);
    ThetaEnsembleSpec spec;
    spec.theta = 2.0;
    spec.q = 0.5;
    spec.u = 0.125;
    CHECK(interaction_h(spec, li, lj) ==
          doctest::Approx(static_cast<double>(h)).epsilon(1e-11));
}

TEST_CASE("q-Racah PhiPair satisfies the boundary vanishing conditions") {
    auto p = qr_params(7, 3);
    auto spec = qracah_theta_spec(p);
    CHECK_NOTHROW(PhiPair(spec, qracah_phi_plus(p), qracah_phi_minus(p)));
    // explicit simplified boundary points: Phi+(gamma) = Phi-(1) = Phi+(gamma delta) = Phi-(delta) = 0
    auto plus = qracah_phi_plus(p);
    auto minus = qracah_phi_minus(p);
    double scale = std::pow(p.gamma, 4);
    CHECK(std::abs(plus(p.gamma)) < 1e-12 * scale);
    CHECK(std::abs(plus(p.gamma * p.delta)) < 1e-12 * scale);
    CHECK(std::abs(minus(1.0)) < 1e-12 * scale);
    CHECK(std::abs(minus(p.delta)) < 1e-12 * scale);
}

TEST_CASE("theta = 1 measure equals the ensemble up to the stated constant") {
    auto p = qr_params(5, 2);
    auto spec = qracah_theta_spec(p);
    auto em = enumerate_measure(spec);
    double cst = -2.0 * p.N * (p.N - 1) * std::log(1.0 - p.q);
    for (size_t st = 0; st < em.lambdas.size(); ++st) {
        std::vector<int> lam(p.N);
        for (int i = 0; i < p.N; ++i) lam[i] = static_cast<int>(std::lround(em.lambdas[st][i]));
        double lhs = em.weights[st].lg;
        double rhs = ensemble::log_unnormalized_weight(p, ensemble::ParticleConfig{lam}) + cst;
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
    }
}

TEST_CASE("synthesized weight reproduces the q-Racah weight up to a constant") {
    auto p = qr_params(8, 3);
    auto spec = qracah_theta_spec(p);
    PhiPair phis(spec, qracah_phi_plus(p), qracah_phi_minus(p));
    auto w1 = synthesize_weight(spec, phis, 1.0);
    auto w2 = synthesize_weight(spec, phis, 7.25);
    double ref = w1(0.0) - orthopoly::log_weight(p, 0);
    for (int l = 0; l <= p.M; ++l) {
        CHECK(w1(static_cast<double>(l)) - orthopoly::log_weight(p, l) ==
              doctest::Approx(ref).epsilon(1e-10));
        CHECK(w2(static_cast<double>(l)) - w1(static_cast<double>(l)) ==
              doctest::Approx(std::log(7.25)).epsilon(1e-12));
    }
    // ratios re-satisfy the defining equation at interior nodes
    for (int l = 1; l <= p.M; ++l) {
        double z = std::pow(p.q, -l);
        double lhs = w1(static_cast<double>(l)) - w1(l - 1.0);
        double num = (p.q * p.q * z * z - p.u * p.q) * (z * z - p.u) * qracah_phi_plus(p)(z);
        double den = (p.q * z * z - p.u) * (p.q * p.q * z * z - p.u) * qracah_phi_minus(p)(z);
        CHECK(lhs == doctest::Approx(std::log(num / den)).epsilon(1e-12));
    }
}

TEST_CASE("brute-force loop observable: hand case, pole-freeness, orthopoly route") {
    {
        // N = 1, M = 1: two-configuration expectation written out by hand
        auto p = qr_params(1, 1);
        auto spec = qracah_theta_spec(p);
        PhiPair phis(spec, qracah_phi_plus(p), qracah_phi_minus(p));
        auto em = enumerate_measure(spec);
        double w0 = orthopoly::weight(p, 0), w1 = orthopoly::weight(p, 1);
        double Z = w0 + w1;
        std::complex<double> z(3.7, 0.0);
        auto sig = [&](std::complex<double> w) { return w + p.u / w; };
        auto ell = [&](int l) { return std::pow(p.q, -l) + p.u * std::pow(p.q, l); };
        std::complex<double> e1 =
            (w0 / Z) * (sig(p.q * z) - ell(0)) / (sig(z) - ell(0)) +
            (w1 / Z) * (sig(p.q * z) - ell(1)) / (sig(z) - ell(1));
        std::complex<double> e2 =
            (w0 / Z) * (sig(z) - ell(0)) / (sig(p.q * z) - ell(0)) +
            (w1 / Z) * (sig(z) - ell(1)) / (sig(p.q * z) - ell(1));
        std::complex<double> expect =
            qracah_phi_minus(p)(z) * e1 + qracah_phi_plus(p)(z) * e2;
        auto got = rtilde_bruteforce(spec, phis, em, z);
        CHECK(std::abs(got - expect) < 1e-12 * std::abs(expect));
    }
    auto p = qr_params(7, 3);
    auto spec = qracah_theta_spec(p);
    PhiPair phis(spec, qracah_phi_plus(p), qracah_phi_minus(p));
    auto em = enumerate_measure(spec);
    // analyticity: |R~| stays bounded on small rings around lattice z-points
    for (int m : {2, 4}) {
        double z0 = std::pow(p.q, -m);
        double ref = std::abs(rtilde_bruteforce(spec, phis, em, {z0 * 1.2, 0.0}));
        for (int k = 0; k < 8; ++k) {
            double th = 2.0 * 3.14159265 * k / 8;
            std::complex<double> z = z0 * (1.0 + 1e-3 * std::complex<double>(std::cos(th), std::sin(th)));
            CHECK(std::abs(rtilde_bruteforce(spec, phis, em, z)) < 1e4 * (ref + 1.0));
        }
    }
    // orthopoly determinant formula agrees with enumeration
    for (double z : {3.1, 7.9, -2.4, 31.0}) {
        double bf = rtilde_bruteforce(spec, phis, em, {z, 0.0}).real();
        double op = rtilde_orthopoly(p, z);
        CHECK(op == doctest::Approx(bf).epsilon(1e-10));
    }
}

TEST_CASE("degree-4 polynomiality and the leading coefficient") {
    auto p = qr_params(12, 6);
    double top = std::pow(p.q, -p.M - 1);
    std::vector<double> zs, vals;
    for (int i = 0; i < 12; ++i) {
        double t = std::cos(3.14159265358979323846 * (i + 0.5) / 12);
        zs.push_back(top * (2.5 + 1.2 * t));
        vals.push_back(rtilde_orthopoly(p, zs.back()));
    }
    auto fit = polynomiality_certificate(zs, vals, 4, 1e-8);
    CHECK(fit.is_poly);
    CHECK(fit.residual < 1e-8);
    double lead_expect = p.alpha * p.beta * std::pow(p.q, p.N) + std::pow(p.q, -p.N);
    CHECK(fit.coeffs[4] == doctest::Approx(lead_expect).epsilon(1e-6));
}

TEST_CASE("polynomiality certificate basics") {
    Polynomial f({1.0, -2.0, 0.5, 0.0, 3.0});  // degree 4
    std::vector<double> zs, vals, vals5;
    for (int i = 0; i < 13; ++i) {
        double z = 1.0 + 0.37 * i;
        zs.push_back(z);
        vals.push_back(f(z));
        vals5.push_back(f(z) + 1e-3 * std::pow(z, 5));
    }
    auto fit = polynomiality_certificate(zs, vals, 4);
    CHECK(fit.is_poly);
    CHECK(fit.residual < 1e-12);
    CHECK(fit.coeffs[4] == doctest::Approx(3.0).epsilon(1e-10));
    auto fit5 = polynomiality_certificate(zs, vals5, 4);
    CHECK_FALSE(fit5.is_poly);
    CHECK_THROWS_AS(polynomiality_certificate({1, 1, 1, 1, 1, 1, 1}, {1, 1, 1, 1, 1, 1, 1}, 4),
                    std::invalid_argument);
}

TEST_CASE("theta = 1/2 synthesized instance is loop-polynomial at the PhiPair degree") {
    auto inst = make_half_theta();
    auto em = enumerate_measure(inst.spec);
    CHECK(em.lambdas.size() == 35);  // multichoose(5,3)
    for (const auto& w : em.weights) CHECK(w.sign == 1);
    double zr = std::pow(inst.spec.q, -7.0);
    std::vector<double> zs, vals;
    for (int i = 0; i < inst.phi_degree + 6; ++i) {
        double t = std::cos(3.14159265358979323846 * (i + 0.5) / (inst.phi_degree + 6));
        zs.push_back(zr * (2.6 + 1.2 * t));
        vals.push_back(rtilde_bruteforce(inst.spec, inst.phis, em, {zs.back(), 0.0}).real());
    }
    auto fit = polynomiality_certificate(zs, vals, inst.phi_degree, 1e-8);
    CHECK(fit.is_poly);
    // one degree lower must fail
    auto fit_low = polynomiality_certificate(zs, vals, inst.phi_degree - 1, 1e-8);
    CHECK_FALSE(fit_low.is_poly);
}

TEST_CASE("two-interval (k = 2) synthesized instance stays loop-polynomial") {
    ThetaEnsembleSpec spec;
    spec.theta = 1.0;
    spec.q = 0.55;
    spec.u = 0.05;
    spec.intervals = {Interval{0, 3, 2}, Interval{5, 8, 2}};
    const double q = spec.q, u = spec.u;
    // mandated zeros for both intervals (theta = 1)
    std::vector<double> zp, zm;
    int Nprev = 0;
    for (const auto& iv : spec.intervals) {
        int Ni = Nprev + iv.n;
        zp.push_back(std::pow(q, -iv.b - (Ni - 1)));
        zm.push_back(std::pow(q, -iv.a - Nprev));
        zp.push_back(u * std::pow(q, iv.a - 1 + Nprev));
        zm.push_back(u * std::pow(q, iv.b - 1 + (Ni - 1)));
        Nprev = Ni;
    }
    // one extra distant root keeps every telescoped ratio positive
    zp.push_back(2.0 * std::pow(q, -12.0));
    PhiPair phis(spec, Polynomial::from_roots(zp), Polynomial::from_roots(zm));
    spec.log_weight = synthesize_weight(spec, phis, 1.0);
    auto em = enumerate_measure(spec);
    for (const auto& w : em.weights) CHECK(w.sign == 1);
    std::vector<double> zs, vals;
    double zr = std::pow(q, -12.0);
    for (int i = 0; i < 13; ++i) {
        double t = std::cos(3.14159265358979323846 * (i + 0.5) / 13);
        zs.push_back(zr * (2.6 + 1.2 * t));
        vals.push_back(rtilde_bruteforce(spec, phis, em, {zs.back(), 0.0}).real());
    }
    CHECK(polynomiality_certificate(zs, vals, 5, 1e-8).is_poly);
    CHECK_FALSE(polynomiality_certificate(zs, vals, 4, 1e-8).is_poly);
}

TEST_CASE("limiting loop polynomial matches the closed-form R exactly") {
    limitshape::ScaledParams p(6.0, 5.0, std::pow(0.5, -1.6), 0.15, 0.5);
    Polynomial ri = r_infinity_poly(p);
    Polynomial rd = limitshape::r_poly(p);
    REQUIRE(ri.degree() == rd.degree());
    for (int k = 0; k <= ri.degree(); ++k)
        CHECK(ri.coeff(k) == doctest::Approx(rd.coeff(k)).epsilon(1e-13));
    // third summand vanishes at z = sqrt(cd)
    double zc = std::sqrt(p.c * p.d);
    double two_terms = limitshape::phi_plus_poly(p)(zc) + limitshape::phi_minus_poly(p)(zc);
    CHECK(r_infinity(p, zc) == doctest::Approx(two_terms).epsilon(1e-12));
    // band nonpositivity: R^2 <= 4 Phi+ Phi- strictly between x7, x8
    auto eq = limitshape::q2_roots(p);
    for (double z = eq.x7 * 1.01; z < eq.x8 * 0.999; z += (eq.x8 - eq.x7) / 37)
        CHECK(rd(z) * rd(z) <=
              4.0 * limitshape::phi_plus_poly(p)(z) * limitshape::phi_minus_poly(p)(z) * (1 + 1e-9));
}

TEST_CASE("loop observable converges to the limit polynomial (smoke)") {
    // With exactly embedded parameters the q-Racah loop polynomial is already
    // N-independent (difference at roundoff), so the convergence statement is
    // exercised on admissible sequences with O(1/N) parameter offsets.
    limitshape::ScaledParams sp(6.0, 5.0, std::pow(0.5, -1.5), 0.15, 0.5);
    Polynomial rinf = r_infinity_poly(sp);
    {
        auto p = sp.embed(4);
        double zlo = p.gamma / p.q * 1.05;
        for (double z = zlo; z < zlo + 2.0 * sp.c; z += 0.4)
            CHECK(rtilde_orthopoly(p, z) == doctest::Approx(rinf(z)).epsilon(1e-9));
    }
    double prev = 1e300;
    for (int N : {2, 4, 8}) {
        double qN = std::pow(sp.q, 1.0 / N);
        int MN = static_cast<int>(std::lround(N * sp.Mscaled)) - 1;
        ensemble::QRacahParams p(sp.a * (1.0 + 0.5 / N), sp.b * (1.0 + 1.0 / (3.0 * N)),
                                 sp.d * (1.0 + 0.25 / N), qN, MN, N);
        double zlo = p.gamma / p.q * 1.05;
        double sup = 0.0;
        for (double z = zlo; z < zlo + 2.0 * sp.c; z += 0.2)
            sup = std::max(sup, std::abs(rtilde_orthopoly(p, z) - rinf(z)));
        CHECK(sup < prev);
        prev = sup;
    }
}

TEST_CASE("deformed measure: undeformed reduction, degree-6 fit, cumulant identity") {
    double q = 0.5;
    int M = 6, N = 3;
    double gamma = std::pow(q, -(M + 1));
    ensemble::QRacahParams p(1.4 * gamma, 1.9 * gamma, 0.0, q, M, N);
    double v1 = 2.5 * gamma, t1 = 0.07;
    {
        auto rep = deformed_measure_check(p, {t1}, {v1});
        CHECK(rep.expected_degree == 6);
        CHECK(rep.fit.is_poly);
    }
    {
        // t = 0 reduces to the undeformed observable: degree-4 fit passes
        auto rep = deformed_measure_check(p, {0.0}, {v1});
        auto spec = qracah_theta_spec(p);
        PhiPair phis(spec, qracah_phi_plus(p) * Polynomial({v1, -1.0}) * Polynomial({v1, -q}),
                     qracah_phi_minus(p) * Polynomial({v1, -q}) * Polynomial({v1, -1.0}));
        CHECK(rep.fit.is_poly);
        // deformation factors cancel pairwise at t=0: the fitted degree-6
        // polynomial equals (v1 - z)(v1 - qz) times the undeformed R~
        auto em = enumerate_measure(spec);
        PhiPair phis0(spec, qracah_phi_plus(p), qracah_phi_minus(p));
        double z = 2.7 * gamma;
        double undeformed = rtilde_bruteforce(spec, phis0, em, {z, 0.0}).real();
        Polynomial fitted(rep.fit.coeffs);
        CHECK(fitted(z) == doctest::Approx((v1 - z) * (v1 - q * z) * undeformed).epsilon(1e-8));
    }
    {
        // d/dt1 E[xi] at t = 0 equals Cov(xi, N G^d_N(v1))
        auto xi = [&](const std::vector<int>& lam) {
            double s = 0.0;
            for (int l : lam) s += std::pow(q, -l);
            return s;
        };
        auto G1 = [&](const std::vector<int>& lam) {
            double s = 0.0;
            for (int l : lam) s += 1.0 / (v1 - std::pow(q, -l));
            return s;
        };
        double h = 1e-5;
        double fd = (deformed_expectation(p, {h}, {v1}, xi) -
                     deformed_expectation(p, {-h}, {v1}, xi)) /
                    (2.0 * h);
        double exi = deformed_expectation(p, {}, {}, xi);
        double eg = deformed_expectation(p, {}, {}, G1);
        double exg = deformed_expectation(p, {}, {},
                                          [&](const std::vector<int>& lam) { return xi(lam) * G1(lam); });
        double cov = exg - exi * eg;
        CHECK(fd == doctest::Approx(cov).epsilon(1e-6));
    }
}
