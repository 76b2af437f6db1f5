#include "qlg/nekrasov.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "qlg/qspecial.hpp"

namespace qlg::nekrasov {

int ThetaEnsembleSpec::total_particles() const {
    int n = 0;
    for (const auto& iv : intervals) n += iv.n;
    return n;
}

std::vector<double> ThetaEnsembleSpec::lambda_range(int i) const {
    int idx = 0;
    for (const auto& iv : intervals) {
        if (i < idx + iv.n) {
            std::vector<double> out;
            for (int x = iv.a; x <= iv.b - 1; ++x) out.push_back(x + i * theta);
            return out;
        }
        idx += iv.n;
    }
    throw std::invalid_argument("lambda_range: particle index out of range");
}

double interaction_h(const ThetaEnsembleSpec& spec, double li, double lj) {
    require(lj > li, "interaction_h: lambda_j > lambda_i violated");
    const double q = spec.q, th = spec.theta;
    auto G = [&](double x) { return qspecial::q_gamma(x, q); };
    double d = lj - li;
    double h = std::pow(q, -2.0 * th * lj) * G(d + 1.0) * G(d + th) / (G(d) * G(d + 1.0 - th));
    if (spec.u > 0.0) {
        double v = std::log(spec.u) / std::log(q);
        double s = lj + li + v;
        h *= G(s + 1.0) * G(s + th) / (G(s) * G(s + 1.0 - th));
    } else {
        h *= std::pow(1.0 - q, -2.0 * th);
    }
    return h;
}

PhiPair::PhiPair(const ThetaEnsembleSpec& spec, Polynomial plus_, Polynomial minus_)
    : plus(std::move(plus_)), minus(std::move(minus_)) {
    const double q = spec.q, th = spec.theta, u = spec.u;
    int Nprev = 0;
    double scale = 0.0;
    for (const auto& c : plus.coeffs()) scale = std::max(scale, std::abs(c));
    for (const auto& c : minus.coeffs()) scale = std::max(scale, std::abs(c));
    for (const auto& iv : spec.intervals) {
        int Ni = Nprev + iv.n;
        double zp1 = std::pow(q, -iv.b - (Ni - 1) * th);
        double zm1 = std::pow(q, -iv.a - Nprev * th);
        require(std::abs(plus(zp1)) <= 1e-9 * scale * std::pow(std::abs(zp1) + 1.0, plus.degree()),
                "PhiPair: Phi+ vanishing condition fails at q^{-b-(N_i-1)theta}");
        require(std::abs(minus(zm1)) <= 1e-9 * scale * std::pow(std::abs(zm1) + 1.0, minus.degree()),
                "PhiPair: Phi- vanishing condition fails at q^{-a-N_{i-1}theta}");
        if (u > 0.0) {
            double zp2 = u * std::pow(q, iv.a - 1 + Nprev * th);
            double zm2 = u * std::pow(q, iv.b - 1 + (Ni - 1) * th);
            require(std::abs(plus(zp2)) <= 1e-9 * scale,
                    "PhiPair: Phi+ vanishing condition fails at u q^{a-1+N_{i-1}theta}");
            require(std::abs(minus(zm2)) <= 1e-9 * scale,
                    "PhiPair: Phi- vanishing condition fails at u q^{b-1+(N_i-1)theta}");
        }
        Nprev = Ni;
    }
}

Polynomial qracah_phi_plus(const ensemble::QRacahParams& p) {
    return Polynomial::from_roots({p.alpha, p.beta * p.delta, p.gamma, p.gamma * p.delta});
}

Polynomial qracah_phi_minus(const ensemble::QRacahParams& p) {
    return Polynomial::from_roots({1.0, p.gamma * p.delta / p.alpha, p.gamma / p.beta, p.delta}) *
           (p.alpha * p.beta);
}

ThetaEnsembleSpec qracah_theta_spec(const ensemble::QRacahParams& p) {
    ThetaEnsembleSpec spec;
    spec.theta = 1.0;
    spec.q = p.q;
    spec.u = p.u;
    spec.intervals = {Interval{0, p.M - p.N + 2, p.N}};
    spec.log_weight = [p](double lambda) {
        return orthopoly::log_weight(p, static_cast<int>(std::lround(lambda)));
    };
    return spec;
}

std::function<double(double)> synthesize_weight(const ThetaEnsembleSpec& spec, const PhiPair& phis,
                                                double seed_value) {
    require(seed_value > 0.0, "synthesize_weight: seed must be positive");
    const double q = spec.q, th = spec.theta, u = spec.u;
    auto ratio = [&, plus = phis.plus, minus = phis.minus](double lambda) {
        double z = std::pow(q, -lambda);
        double num = (q * q * z * z - u * std::pow(q, th)) * (z * z - u) * plus(z);
        double den = (std::pow(q, th) * z * z - u) * (q * q * z * z - u) * minus(z);
        if (den == 0.0)
            throw std::domain_error("synthesize_weight: ratio denominator vanishes at lambda=" +
                                    std::to_string(lambda));
        return num / den;
    };
    // The ratio ties consecutive lambda only within one interval (and one
    // residue class mod 1); interval and class normalizations are free, so
    // each (interval, class) group telescopes from its own leftmost node.
    auto logw = std::make_shared<std::map<long long, double>>();
    auto key = [](double l) { return static_cast<long long>(std::llround(l * 1024.0)); };
    auto cls = [](double l) {
        double f = l - std::floor(l);
        return static_cast<long long>(std::llround(f * 1024.0)) % 1024;
    };
    int idx = 0;
    for (size_t gi = 0; gi < spec.intervals.size(); ++gi) {
        std::vector<double> group;
        for (int n = 0; n < spec.intervals[gi].n; ++n, ++idx)
            for (double l : spec.lambda_range(idx)) group.push_back(l);
        std::sort(group.begin(), group.end());
        group.erase(std::unique(group.begin(), group.end(),
                                [](double a, double b) { return std::abs(a - b) < 1e-9; }),
                    group.end());
        std::map<long long, double> class_min;
        for (double l : group) {
            auto it = class_min.find(cls(l));
            if (it == class_min.end() || l < it->second) class_min[cls(l)] = l;
        }
        for (double l : group) {
            if (logw->count(key(l))) continue;
            double base = class_min[cls(l)];
            double lg = std::log(seed_value);
            for (double m = base + 1.0; m <= l + 1e-9; m += 1.0) {
                double r = ratio(m);
                if (r <= 0.0)
                    throw std::domain_error(
                        "synthesize_weight: nonpositive ratio at lambda=" + std::to_string(m) +
                        "; the PhiPair needs extra roots to keep the weight positive");
                lg += std::log(r);
            }
            (*logw)[key(l)] = lg;
        }
    }
    return [logw, key](double lambda) {
        auto it = logw->find(key(lambda));
        if (it == logw->end())
            throw std::invalid_argument("synthesized weight: lambda off the lattice");
        return it->second;
    };
}

EnumeratedMeasure enumerate_measure(const ThetaEnsembleSpec& spec, uint64_t cap) {
    const int N = spec.total_particles();
    // count weakly increasing tuples per group: binom(b-a-1+n, n)
    long double count = 1.0L;
    for (const auto& iv : spec.intervals) {
        long double c = 1.0L;
        for (int i = 0; i < iv.n; ++i) c = c * (iv.b - iv.a + i) / (i + 1);
        count *= c;
    }
    if (count > static_cast<long double>(cap))
        throw std::runtime_error("enumerate_measure: configuration count exceeds cap");

    EnumeratedMeasure em;
    std::vector<int> xs(N);
    int gstart = 0;
    std::function<void(int, int, int)> rec = [&](int gi, int i, int lo) {
        if (gi == static_cast<int>(spec.intervals.size())) {
            std::vector<double> lam(N);
            for (int j = 0; j < N; ++j) lam[j] = xs[j] + j * spec.theta;
            LogVal w = LogVal::one();
            for (int a = 0; a < N; ++a)
                for (int b = a + 1; b < N; ++b)
                    w *= LogVal::from(interaction_h(spec, lam[a], lam[b]));
            for (double l : lam) w *= LogVal{spec.log_weight(l), 1};
            em.lambdas.push_back(std::move(lam));
            em.weights.push_back(w);
            return;
        }
        const Interval& iv = spec.intervals[gi];
        int iend = 0;
        {
            int idx = 0;
            for (int g = 0; g <= gi; ++g) idx += spec.intervals[g].n;
            iend = idx;
        }
        if (i == iend) {
            rec(gi + 1, i, spec.intervals.size() > static_cast<size_t>(gi + 1)
                               ? spec.intervals[gi + 1].a
                               : 0);
            return;
        }
        for (int x = lo; x <= iv.b - 1; ++x) {
            xs[i] = x;
            rec(gi, i + 1, x);
        }
    };
    rec(0, 0, spec.intervals.empty() ? 0 : spec.intervals[0].a);
    em.Z = LogVal::zero();
    for (const auto& w : em.weights) em.Z = em.Z + w;
    return em;
}

std::complex<double> rtilde_bruteforce(const ThetaEnsembleSpec& spec, const PhiPair& phis,
                                       const EnumeratedMeasure& em, std::complex<double> z,
                                       double* min_pole_dist) {
    const double q = spec.q, th = spec.theta, u = spec.u;
    auto sigma = [&](std::complex<double> w) { return w + u / w; };
    std::complex<double> s0 = sigma(z), s1 = sigma(std::pow(q, th) * z);
    std::complex<double> s2 = sigma(q * z), s3 = sigma(std::pow(q, 1.0 - th) * z);
    double scale = std::abs(s0) + std::abs(s2) + 1.0;
    double mind = 1e300;
    std::complex<double> e1(0, 0), e2(0, 0);
    for (size_t st = 0; st < em.lambdas.size(); ++st) {
        std::complex<double> p1(1, 0), p2(1, 0);
        for (double l : em.lambdas[st]) {
            double ell = std::pow(q, -l) + u * std::pow(q, l);
            mind = std::min({mind, std::abs(s0 - ell) / scale, std::abs(s2 - ell) / scale});
            p1 *= (s1 - ell) / (s0 - ell);
            p2 *= (s3 - ell) / (s2 - ell);
        }
        double wrel = (em.weights[st] / em.Z).value();
        e1 += wrel * p1;
        e2 += wrel * p2;
    }
    if (min_pole_dist) *min_pole_dist = mind;
    if (mind < 1e-13)
        throw std::domain_error("rtilde_bruteforce: z collides with a particle pole");
    return phis.minus(z) * e1 + phis.plus(z) * e2;
}

namespace {
// The determinant formula subtracts quantities that are exponentially larger
// than the result (the Stieltjes sums cancel their first n moments), so the
// whole evaluation runs in 50-digit floats with stable sub-algorithms:
// recurrence for P_n, direct products for weights, direct sums for norms.
using MP = boost::multiprecision::cpp_bin_float_50;

struct MpQRacah {
    MP alpha, beta, gamma, delta, q, u;
    int M, N;
    std::vector<MP> nodes, w;

    explicit MpQRacah(const ensemble::QRacahParams& p)
        : alpha(p.alpha), beta(p.beta), delta(p.delta), q(p.q), M(p.M), N(p.N) {
        gamma = pow(q, -(M + 1));
        u = gamma * delta * q;
        nodes.resize(M + 1);
        w.resize(M + 1);
        MP num = 1, den = 1, abq = alpha * beta * q, abx = 1;
        for (int x = 0; x <= M; ++x) {
            nodes[x] = pow(q, -x) + u * pow(q, x);
            if (x > 0) {
                MP qx = pow(q, x - 1);
                num *= (1 - alpha * q * qx) * (1 - beta * delta * q * qx) *
                       (1 - gamma * q * qx) * (1 - gamma * delta * q * qx);
                den *= (1 - q * qx) * (1 - gamma * delta * q / alpha * qx) *
                       (1 - gamma * q / beta * qx) * (1 - delta * q * qx);
                abx *= abq;
            }
            w[x] = num / den * (1 - gamma * delta * pow(q, 2 * x + 1)) /
                   (abx * (1 - gamma * delta * q));
        }
    }

    MP recA(int n) const {
        MP qn1 = pow(q, n + 1), ab = alpha * beta;
        return (1 - alpha * qn1) * (1 - ab * qn1) * (1 - beta * delta * qn1) *
               (1 - gamma * qn1) / ((1 - ab * pow(q, 2 * n + 1)) * (1 - ab * pow(q, 2 * n + 2)));
    }
    MP recC(int n) const {
        MP qn = pow(q, n), ab = alpha * beta;
        return q * (1 - qn) * (1 - beta * qn) * (delta - alpha * qn) * (gamma - ab * qn) /
               ((1 - ab * pow(q, 2 * n)) * (1 - ab * pow(q, 2 * n + 1)));
    }
    // P_0..P_n at zeta via the degree recurrence
    std::vector<MP> polys(int n, MP zeta) const {
        std::vector<MP> out(n + 1);
        out[0] = 1;
        MP pm = 0, pc = 1;
        for (int k = 0; k < n; ++k) {
            MP A = recA(k), C = recC(k);
            MP b = 1 + u - A - C;
            MP pn = ((zeta - b) * pc - C * pm) / A;
            pm = pc;
            pc = pn;
            out[k + 1] = pc;
        }
        return out;
    }
    MP norm_direct(int n) const {
        MP s = 0;
        for (int x = 0; x <= M; ++x) {
            MP v = polys(n, nodes[x])[n];
            s += w[x] * v * v;
        }
        return s;
    }
    MP stieltjes(int n, MP zeta) const {
        MP s = 0;
        for (int x = 0; x <= M; ++x) s += polys(n, nodes[x])[n] * w[x] / (zeta - nodes[x]);
        return s;
    }
};
}  // namespace

double rtilde_orthopoly(const ensemble::QRacahParams& p, double z) {
    MpQRacah mp(p);
    const int N = p.N;
    MP zz = z;
    MP s0 = zz + mp.u / zz, s1 = mp.q * zz + mp.u / (mp.q * zz);
    double top = static_cast<double>(mp.nodes[p.M]);
    for (const MP& node : mp.nodes) {
        if (std::abs(static_cast<double>(s0 - node)) < 1e-12 * top ||
            std::abs(static_cast<double>(s1 - node)) < 1e-12 * top)
            throw std::domain_error("rtilde_orthopoly: sigma(z) or sigma(qz) hits the lattice");
    }
    // k_{N-1}/k_N = (1-ab q^N)(1-a q^N)(1-bd q^N)(1-g q^N) / ((1-ab q^{2N-1})(1-ab q^{2N}))
    MP qN = pow(mp.q, N), ab = mp.alpha * mp.beta;
    MP kr = (1 - ab * qN) * (1 - mp.alpha * qN) * (1 - mp.beta * mp.delta * qN) *
            (1 - mp.gamma * qN) / ((1 - ab * pow(mp.q, 2 * N - 1)) * (1 - ab * pow(mp.q, 2 * N)));
    MP cNm1 = mp.norm_direct(N - 1);
    auto P0 = mp.polys(N, s0), P1 = mp.polys(N, s1);
    MP h0m = mp.stieltjes(N - 1, s0), h0n = mp.stieltjes(N, s0);
    MP h1m = mp.stieltjes(N - 1, s1), h1n = mp.stieltjes(N, s1);
    MP t1 = h0m * P1[N] - h0n * P1[N - 1];
    MP t2 = h1m * P0[N] - h1n * P0[N - 1];
    MP phim = qracah_phi_minus(p)(zz);
    MP phip = qracah_phi_plus(p)(zz);
    return static_cast<double>(kr / cNm1 * (phim * t1 + phip * t2));
}

PolyFit polynomiality_certificate(const std::vector<double>& zs, const std::vector<double>& vals,
                                  int degree, double tol) {
    require(zs.size() == vals.size(), "polynomiality_certificate: size mismatch");
    require(static_cast<int>(zs.size()) >= degree + 2,
            "polynomiality_certificate: need at least degree+2 points");
    double lo = *std::min_element(zs.begin(), zs.end());
    double hi = *std::max_element(zs.begin(), zs.end());
    require(hi - lo > 1e-12 * (std::abs(hi) + std::abs(lo) + 1.0),
            "polynomiality_certificate: evaluation points are ill-conditioned");
    double m = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    const int n = static_cast<int>(zs.size());
    Eigen::MatrixXd V(n, degree + 1);
    for (int i = 0; i < n; ++i) {
        double t = (zs[i] - m) / h;
        double pw = 1.0;
        for (int k = 0; k <= degree; ++k) {
            V(i, k) = pw;
            pw *= t;
        }
    }
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = vals[i];
    Eigen::VectorXd sol = V.colPivHouseholderQr().solve(y);
    double vmax = y.cwiseAbs().maxCoeff();
    double resid = (V * sol - y).cwiseAbs().maxCoeff() / (vmax > 0 ? vmax : 1.0);
    // map scaled coefficients back to plain powers of z
    Polynomial acc;
    Polynomial tpoly({-m / h, 1.0 / h});
    Polynomial pw = Polynomial::constant(1.0);
    for (int k = 0; k <= degree; ++k) {
        acc = acc + pw * sol[k];
        pw = pw * tpoly;
    }
    std::vector<double> coeffs(acc.coeffs());
    coeffs.resize(degree + 1, 0.0);
    return PolyFit{resid < tol, coeffs, resid};
}

Polynomial r_infinity_poly(const limitshape::ScaledParams& p) {
    Polynomial t1 = Polynomial::from_roots({p.a, p.b * p.d, p.c, p.c * p.d});
    Polynomial t2 = Polynomial::from_roots({1.0, p.d}) *
                    (Polynomial({-p.c, p.b}) * Polynomial({-p.c * p.d, p.a}));
    Polynomial z2cd({-p.c * p.d, 0.0, 1.0});
    return t1 + t2 + z2cd * z2cd * ((1.0 / p.q - 1.0) * (1.0 - p.a * p.b * p.q));
}

double r_infinity(const limitshape::ScaledParams& p, double z) { return r_infinity_poly(p)(z); }

namespace {
// deformed measure enumeration at u = 0 (delta = 0): states are strict
// lambda-tuples in {0..M}; weights w(l) prod_a (1 + t_a/(v_a - q^{-l}))
struct DeformedEnum {
    std::vector<std::vector<int>> states;
    std::vector<LogVal> weights;
    LogVal Z;
};

DeformedEnum enumerate_deformed(const ensemble::QRacahParams& p, const std::vector<double>& ts,
                                const std::vector<double>& vs) {
    require(p.delta == 0.0, "deformed measure check requires delta = 0 (u = 0)");
    require(ts.size() == vs.size(), "deformed measure: t/v size mismatch");
    DeformedEnum de;
    de.Z = LogVal::zero();
    std::vector<int> lam(p.N);
    for (int i = 0; i < p.N; ++i) lam[i] = i;
    while (true) {
        LogVal w = LogVal::one();
        std::vector<double> ys(p.N);
        for (int i = 0; i < p.N; ++i) {
            ys[i] = std::pow(p.q, -lam[i]);
            w *= LogVal{orthopoly::log_weight(p, lam[i]), 1};
            for (size_t a = 0; a < ts.size(); ++a)
                w *= LogVal::from(1.0 + ts[a] / (vs[a] - ys[i]));
        }
        for (int i = 0; i < p.N; ++i)
            for (int j = i + 1; j < p.N; ++j) w *= LogVal::from((ys[i] - ys[j]) * (ys[i] - ys[j]));
        de.states.push_back(lam);
        de.weights.push_back(w);
        de.Z = de.Z + w;
        int i = p.N - 1;
        while (i >= 0 && lam[i] == p.M - (p.N - 1 - i)) --i;
        if (i < 0) break;
        ++lam[i];
        for (int j = i + 1; j < p.N; ++j) lam[j] = lam[j - 1] + 1;
    }
    return de;
}
}  // namespace

DeformedReport deformed_measure_check(const ensemble::QRacahParams& p,
                                      const std::vector<double>& ts,
                                      const std::vector<double>& vs, double tol) {
    DeformedEnum de = enumerate_deformed(p, ts, vs);
    const int m = static_cast<int>(ts.size());
    Polynomial plus = qracah_phi_plus(p), minus = qracah_phi_minus(p);
    for (int a = 0; a < m; ++a) {
        plus = plus * Polynomial({vs[a] + ts[a], -1.0}) * Polynomial({vs[a], -p.q});
        minus = minus * Polynomial({vs[a] + ts[a], -p.q}) * Polynomial({vs[a], -1.0});
    }
    const int deg = 4 + 2 * m;
    // Chebyshev-spaced evaluation points on a pole-free interval right of the lattice
    double top = std::pow(p.q, -p.M - 1);
    std::vector<double> zs, vals;
    const int npts = deg + 6;
    for (int i = 0; i < npts; ++i) {
        double t = std::cos(3.14159265358979323846 * (i + 0.5) / npts);
        double z = top * (2.6 + 1.3 * t);
        std::complex<double> e1(0, 0), e2(0, 0);
        for (size_t st = 0; st < de.states.size(); ++st) {
            double p1 = 1.0, p2 = 1.0;
            for (int l : de.states[st]) {
                double y = std::pow(p.q, -l);
                p1 *= (p.q * z - y) / (z - y);
                p2 *= (z - y) / (p.q * z - y);
            }
            double w = (de.weights[st] / de.Z).value();
            e1 += w * p1;
            e2 += w * p2;
        }
        zs.push_back(z);
        vals.push_back((minus(z) * e1 + plus(z) * e2).real());
    }
    return DeformedReport{polynomiality_certificate(zs, vals, deg, tol), deg};
}

double deformed_expectation(const ensemble::QRacahParams& p, const std::vector<double>& ts,
                            const std::vector<double>& vs,
                            const std::function<double(const std::vector<int>&)>& xi) {
    DeformedEnum de = enumerate_deformed(p, ts, vs);
    KahanSum acc;
    for (size_t st = 0; st < de.states.size(); ++st)
        acc.add((de.weights[st] / de.Z).value() * xi(de.states[st]));
    return acc.total();
}

}  // namespace qlg::nekrasov
