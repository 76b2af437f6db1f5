#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "qlg/orthopoly.hpp"
#include "qlg/varsolve.hpp"

using namespace qlg;
using namespace qlg::varsolve;

namespace {
limitshape::ScaledParams test_params() {
    return limitshape::ScaledParams(6.0, 5.0, std::pow(0.5, -1.6), 0.15, 0.5);
}
}  // namespace

TEST_CASE("functional: concavity, potential shift, spread beats spike") {
    auto p = test_params();
    const int G = 128;
    DiscretizedMeasure m;
    m.lo = 1.0 + p.u;
    m.hi = p.c + p.d;
    m.cell = (m.hi - m.lo) / G;
    m.theta = 1.0;
    m.grid.resize(G);
    std::vector<double> V(G);
    for (int i = 0; i < G; ++i) {
        m.grid[i] = m.lo + (i + 0.5) * m.cell;
        V[i] = 0.3 * m.grid[i];
    }
    auto with_density = [&](std::vector<double> rho) {
        DiscretizedMeasure c = m;
        c.density = std::move(rho);
        return c;
    };
    // spread-out mass scores higher than a concentrated spike of equal mass
    std::vector<double> flat(G, 1.0 / (m.hi - m.lo));
    std::vector<double> spike(G, 0.0);
    for (int i = G / 2 - 2; i < G / 2 + 2; ++i) spike[i] = 1.0 / (4.0 * m.cell);
    CHECK(functional_iv(with_density(flat), V) > functional_iv(with_density(spike), V));
    // strict concavity on random pairs
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> un(0.0, 1.0);
    for (int t = 0; t < 20; ++t) {
        std::vector<double> r1(G), r2(G), mid(G);
        double s1 = 0, s2 = 0;
        for (int i = 0; i < G; ++i) {
            r1[i] = un(rng);
            r2[i] = un(rng);
            s1 += r1[i] * m.cell;
            s2 += r2[i] * m.cell;
        }
        for (int i = 0; i < G; ++i) {
            r1[i] /= s1;
            r2[i] /= s2;
            mid[i] = 0.5 * (r1[i] + r2[i]);
        }
        double lhs = functional_iv(with_density(mid), V);
        double rhs = 0.5 * (functional_iv(with_density(r1), V) + functional_iv(with_density(r2), V));
        CHECK(lhs >= rhs - 1e-12 * std::abs(rhs));
    }
    // V -> V + const shifts I_V by -const for unit mass
    std::vector<double> V2(V);
    for (double& v : V2) v += 2.5;
    auto mflat = with_density(flat);
    CHECK(functional_iv(mflat, V2) ==
          doctest::Approx(functional_iv(mflat, V) - 2.5).epsilon(1e-10));
}

TEST_CASE("dilogarithm potential matches the weight asymptotics") {
    auto p = test_params();
    double s = 0.73;
    double prev = 1e300;
    for (int N : {50, 100, 200}) {
        auto qr = p.embed(N);
        int x = static_cast<int>(s * N);
        double lhs = -orthopoly::log_tilde_weight(qr, x) / N;
        double rhs = potential_v(p, static_cast<double>(x) / N);
        double err = std::abs(lhs - rhs);
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 0.01);
    // continuity across the grid and finiteness at the endpoints
    double last = potential_v(p, 0.0);
    CHECK(std::isfinite(last));
    for (double s2 = 0.002; s2 <= p.Mscaled + 1e-12; s2 += 0.002) {
        double v = potential_v(p, std::min(s2, p.Mscaled));
        CHECK(std::abs(v - last) < 0.05);
        last = v;
    }
    CHECK(std::isfinite(potential_v(p, p.Mscaled)));
    CHECK_THROWS_AS(potential_v(p, -0.5), std::invalid_argument);
}

TEST_CASE("projected ascent recovers the closed-form equilibrium") {
    auto p = test_params();
    auto res = solve_equilibrium(p, 400, 30000, 1e-7);
    CHECK(res.converged);
    CHECK(res.ascent_monotone);
    CHECK(res.measure.mass() == doctest::Approx(1.0).epsilon(1e-10));
    const auto& m = res.measure;
    // box constraint never violated
    for (size_t i = 0; i < m.density.size(); ++i)
        CHECK(m.density[i] <= m.cap[i] + 1e-12);
    // L2 distance to the closed form
    double l2 = 0.0;
    for (size_t i = 0; i < m.grid.size(); ++i) {
        double d = m.density[i] - closed_form_density_sigma(p, m.grid[i]);
        l2 += d * d * m.cell;
    }
    CHECK(std::sqrt(l2) < 0.02);
    // KKT: effective potential constant on the band, below it elsewhere
    double fmin = 1e300, fmax = -1e300, lo = 1e300, hi = -1e300;
    for (size_t i = 0; i < m.grid.size(); ++i) {
        lo = std::min(lo, res.effective[i]);
        hi = std::max(hi, res.effective[i]);
    }
    double fband_lo = 1e300, fband_hi = -1e300;
    for (size_t i = 0; i < m.grid.size(); ++i) {
        if (m.density[i] > 1e-6 && m.density[i] < m.cap[i] - 1e-6) {
            fband_lo = std::min(fband_lo, res.effective[i]);
            fband_hi = std::max(fband_hi, res.effective[i]);
        }
    }
    CHECK(fband_hi - fband_lo < 1e-3 * (hi - lo));
    // voids sit below the band level, saturated cells above
    for (size_t i = 0; i < m.grid.size(); ++i) {
        if (m.density[i] <= 1e-8) CHECK(res.effective[i] <= fband_lo + 1e-6 * (hi - lo));
        if (m.density[i] >= m.cap[i] - 1e-8) CHECK(res.effective[i] >= fband_hi - 1e-6 * (hi - lo));
    }
    // numeric maximizer scores at least as high as the sampled closed form
    std::vector<double> Vx(m.grid.size());
    for (size_t i = 0; i < m.grid.size(); ++i) Vx[i] = potential_v(
        p, std::log(0.5 * (m.grid[i] + std::sqrt(m.grid[i] * m.grid[i] - 4 * p.u))) /
               (-std::log(p.q)));
    DiscretizedMeasure cf = m;
    for (size_t i = 0; i < m.grid.size(); ++i) cf.density[i] = closed_form_density_sigma(p, m.grid[i]);
    double iv_num = functional_iv(m, Vx), iv_cf = functional_iv(cf, Vx);
    CHECK(iv_num >= iv_cf - 1e-4 * std::abs(iv_cf));
}
