#include "qlg/orthopoly.hpp"

#include <algorithm>
#include <cmath>

#include "qlg/qspecial.hpp"

namespace qlg::orthopoly {

using qspecial::log_q_pochhammer;
using qspecial::q_pochhammer;

namespace {
LogVal log_weight_val(const QRacahParams& p, int x) {
    require(x >= 0 && x <= p.M, "weight: x outside [0,M]");
    const double q = p.q;
    LogVal v = LogVal::one();
    v *= log_q_pochhammer(p.alpha * q, q, x);
    v *= log_q_pochhammer(p.beta * p.delta * q, q, x);
    v *= log_q_pochhammer(p.gamma * q, q, x);
    v *= log_q_pochhammer(p.gamma * p.delta * q, q, x);
    v /= log_q_pochhammer(q, q, x);
    v /= log_q_pochhammer(p.gamma * p.delta * q / p.alpha, q, x);
    v /= log_q_pochhammer(p.gamma * q / p.beta, q, x);
    v /= log_q_pochhammer(p.delta * q, q, x);
    v *= LogVal::from(1.0 - p.gamma * p.delta * std::pow(q, 2 * x + 1));
    v /= LogVal::from(1.0 - p.gamma * p.delta * q);
    v.lg -= x * std::log(p.alpha * p.beta * q);
    return v;
}
}  // namespace

QRacahParams::QRacahParams(double alpha_, double beta_, double delta_, double q_, int M_, int N_)
    : alpha(alpha_), beta(beta_), delta(delta_), q(q_), M(M_), N(N_) {
    require(q > 0.0 && q < 1.0, "QRacahParams: q in (0,1) violated");
    require(N >= 1, "QRacahParams: N >= 1 violated");
    require(M >= N - 1, "QRacahParams: M >= N-1 violated");
    require(alpha > 0.0, "QRacahParams: alpha > 0 violated");
    require(beta > 0.0, "QRacahParams: beta > 0 violated");
    require(delta >= 0.0, "QRacahParams: delta >= 0 violated");
    gamma = std::pow(q, -(M + 1));
    require(alpha >= gamma * (1.0 - 1e-12), "QRacahParams: alpha >= gamma violated");
    require(beta >= gamma * (1.0 - 1e-12), "QRacahParams: beta >= gamma violated");
    require(beta * delta * q < 1.0, "QRacahParams: beta*delta*q < 1 violated");
    u = gamma * delta * q;
    require(u < 1.0, "QRacahParams: gamma*delta*q < 1 violated");
    for (int x = 0; x <= M; ++x) {
        LogVal w = log_weight_val(*this, x);
        require(w.sign > 0 && std::isfinite(w.lg),
                "QRacahParams: weight not positive at x=" + std::to_string(x));
    }
}

QuadraticLattice::QuadraticLattice(const QRacahParams& p) : params(p) {
    nodes.resize(p.M + 1);
    for (int x = 0; x <= p.M; ++x) nodes[x] = std::pow(p.q, -x) + p.u * std::pow(p.q, x);
    for (int x = 0; x < p.M; ++x)
        require(nodes[x] < nodes[x + 1], "QuadraticLattice: nodes not increasing");
}

double weight(const QRacahParams& p, int x) { return log_weight_val(p, x).value(); }

double log_weight(const QRacahParams& p, int x) {
    LogVal v = log_weight_val(p, x);
    return v.lg;
}

double log_tilde_weight(const QRacahParams& p, int x) {
    require(x >= 0 && x <= p.M, "tilde_weight: x outside [0,M]");
    const double q = p.q;
    auto lpinf = [&](double a) { return qspecial::log_q_pochhammer_inf(a, q); };
    double t = x * std::log(p.gamma / p.beta) + x * static_cast<double>(x) * std::log(q);
    t += std::log1p(-p.gamma * p.delta * std::pow(q, 2 * x + 1)) - std::log1p(-p.gamma * p.delta * q);
    double qx1 = std::pow(q, x + 1);
    t += lpinf(qx1);
    t += lpinf(p.gamma * p.delta * qx1 / p.alpha);
    t += lpinf(p.gamma * qx1 / p.beta);
    t += lpinf(p.delta * qx1);
    t += lpinf(std::pow(q, -x) / p.alpha);
    t += lpinf(std::pow(q, -x) / p.gamma);
    t -= lpinf(p.beta * p.delta * qx1);
    t -= lpinf(p.gamma * p.delta * qx1);
    return t;
}

double tilde_weight(const QRacahParams& p, int x) { return std::exp(log_tilde_weight(p, x)); }

double poly_eval_at(const QRacahParams& p, int n, double zeta) {
    require(n >= 0 && n <= p.M, "poly_eval: n outside [0,M]");
    const double q = p.q;
    const double gd = p.gamma * p.delta;
    // running factors of (q^{-n};q)_k (alpha*beta*q^{n+1};q)_k and denominators
    double a1 = std::pow(q, -n), a2 = p.alpha * p.beta * std::pow(q, n + 1);
    double b1 = p.alpha * q, b2 = p.beta * p.delta * q, b3 = p.gamma * q, b4 = q;
    double sum = 1.0, term = 1.0;
    double qi = 1.0;  // q^i in the node-variable factor
    for (int k = 1; k <= n; ++k) {
        double num = (1.0 - a1) * (1.0 - a2);
        double den = (1.0 - b1) * (1.0 - b2) * (1.0 - b3) * (1.0 - b4);
        if (den == 0.0) throw std::domain_error("poly_eval: vanishing denominator factor");
        term *= num / den * q * (1.0 + gd * q * qi * qi - qi * zeta);
        sum += term;
        a1 *= q; a2 *= q; b1 *= q; b2 *= q; b3 *= q; b4 *= q;
        qi *= q;
    }
    return sum;
}

double poly_eval_recur(const QRacahParams& p, int n, double zeta) {
    require(n >= 0 && n <= p.M, "poly_eval_recur: n outside [0,M]");
    double pm = 0.0, pc = 1.0;  // P_{-1}, P_0
    for (int k = 0; k < n; ++k) {
        double A = recurrence_A(p, k), C = recurrence_C(p, k);
        double b = 1.0 + p.u - A - C;
        double pn = ((zeta - b) * pc - C * pm) / A;
        pm = pc;
        pc = pn;
    }
    return pc;
}

double poly_eval(const QRacahParams& p, int n, int x) {
    require(x >= 0 && x <= p.M, "poly_eval: x outside [0,M]");
    double zeta = std::pow(p.q, -x) + p.u * std::pow(p.q, x);
    return poly_eval_at(p, n, zeta);
}

double diffeq_B(const QRacahParams& p, int x) {
    const double q = p.q;
    double qx1 = std::pow(q, x + 1);
    double gd = p.gamma * p.delta;
    return (1.0 - p.alpha * qx1) * (1.0 - p.beta * p.delta * qx1) * (1.0 - p.gamma * qx1) *
           (1.0 - gd * qx1) /
           ((1.0 - gd * std::pow(q, 2 * x + 1)) * (1.0 - gd * std::pow(q, 2 * x + 2)));
}

double diffeq_D(const QRacahParams& p, int x) {
    const double q = p.q;
    double qx = std::pow(q, x);
    double gd = p.gamma * p.delta;
    return q * (1.0 - qx) * (1.0 - p.delta * qx) * (p.beta - p.gamma * qx) *
           (p.alpha - gd * qx) /
           ((1.0 - gd * std::pow(q, 2 * x)) * (1.0 - gd * std::pow(q, 2 * x + 1)));
}

double diffeq_lambda(const QRacahParams& p, int n) {
    return std::pow(p.q, -n) * (1.0 - std::pow(p.q, n)) * (1.0 - p.alpha * p.beta * std::pow(p.q, n + 1));
}

std::vector<double> poly_lattice_recursion(const QRacahParams& p, int n) {
    require(n >= 0 && n <= p.M, "poly_lattice_recursion: n outside [0,M]");
    const int dim = p.M + 1;
    if (dim == 1) return {1.0};
    // The q-difference equation lam(n) y = B(x) y(x+1) - (B+D) y(x) + D(x) y(x-1)
    // is self-adjoint on l^2(w): B(x) w(x) = D(x+1) w(x+1).  A naive forward
    // sweep in x amplifies roundoff by the ratio of the dominant to the wanted
    // solution (observed growth beyond 1e30 already at M = 20), so the same
    // recursion is solved as the symmetric tridiagonal eigenproblem
    //   [diag(B+D) - coupling] v = -lam(n) v,  v_x = P_n(x) sqrt(w(x)) * const,
    // with coupling_x = sign(B(x)) sqrt(B(x) D(x+1)).
    Eigen::VectorXd diag(dim), off(dim - 1);
    for (int x = 0; x < dim; ++x) {
        double B = diffeq_B(p, x), D = diffeq_D(p, x);
        diag[x] = B + D;
        if (x + 1 < dim) {
            double prod = B * diffeq_D(p, x + 1);
            if (prod < 0.0)
                throw std::runtime_error("poly_lattice_recursion: negative B(x)D(x+1) at x=" +
                                         std::to_string(x));
            off[x] = -std::copysign(std::sqrt(prod), B);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("poly_lattice_recursion: eigensolver failed");
    // eigenvalues ascending are -lam(n) ascending, i.e. index n directly
    double lam = diffeq_lambda(p, n);
    double scale = std::abs(lam) + std::abs(es.eigenvalues()[dim - 1]);
    if (std::abs(es.eigenvalues()[n] + lam) > 1e-8 * scale)
        throw std::runtime_error("poly_lattice_recursion: eigenvalue mismatch at n=" +
                                 std::to_string(n));
    Eigen::VectorXd v = es.eigenvectors().col(n);
    if (v[0] == 0.0) throw std::runtime_error("poly_lattice_recursion: vanishing seed component");
    // The unit eigenvector equals (P_n(x) sqrt(w(x)/c_n))_x up to one sign, so
    // the scale comes from the closed-form norm.  Dividing by the x=0
    // component instead would inject its relative error (the component is
    // 1/sqrt(c_n), arbitrarily small) into every value.
    double sgn = v[0] > 0.0 ? 1.0 : -1.0;
    double half_log_cn = 0.5 * log_norm(p, n).lg;
    std::vector<double> y(dim);
    for (int x = 0; x < dim; ++x)
        y[x] = sgn * v[x] * std::exp(half_log_cn - 0.5 * log_weight(p, x));
    return y;
}

LogVal log_norm(const QRacahParams& p, int n) {
    require(n >= 0 && n <= p.M, "norm: n outside [0,M]");
    const double q = p.q;
    const double al = p.alpha, be = p.beta, ga = p.gamma, de = p.delta;
    auto pinf = [&](double a) { return LogVal::from(qspecial::q_pochhammer_inf(a, q)); };
    LogVal v = LogVal::one();
    v *= pinf(ga * de * q * q);
    v *= pinf(ga / (al * be));
    v *= pinf(de / al);
    v *= pinf(1.0 / be);
    v /= pinf(ga * de * q / al);
    v /= pinf(ga * q / be);
    v /= pinf(de * q);
    v /= pinf(1.0 / (al * be * q));
    v *= LogVal::from(1.0 - al * be * q) / LogVal::from(1.0 - al * be * std::pow(q, 2 * n + 1));
    v *= log_q_pochhammer(q, q, n);
    v *= log_q_pochhammer(be * q, q, n);
    v *= log_q_pochhammer(al * be * q / ga, q, n);
    v /= log_q_pochhammer(al * be * q, q, n);
    v /= log_q_pochhammer(al * q, q, n);
    v /= log_q_pochhammer(be * de * q, q, n);
    v /= log_q_pochhammer(ga * q, q, n);
    // (gamma*delta*q)^n (alpha q / delta; q)_n folded into one product so the
    // delta = 0 case stays finite: prod_{i=0}^{n-1} (gamma*delta*q - alpha*gamma*q^{i+2})
    for (int i = 0; i < n; ++i) v *= LogVal::from(ga * de * q - al * ga * std::pow(q, i + 2));
    return v;
}

double norm(const QRacahParams& p, int n) { return log_norm(p, n).value(); }

LogVal log_leading_coeff(const QRacahParams& p, int n) {
    const double q = p.q;
    LogVal v = log_q_pochhammer(p.alpha * p.beta * std::pow(q, n + 1), q, n);
    v /= log_q_pochhammer(p.alpha * q, q, n);
    v /= log_q_pochhammer(p.beta * p.delta * q, q, n);
    v /= log_q_pochhammer(p.gamma * q, q, n);
    return v;
}

double recurrence_A(const QRacahParams& p, int n) {
    const double q = p.q;
    double qn1 = std::pow(q, n + 1);
    double ab = p.alpha * p.beta;
    return (1.0 - p.alpha * qn1) * (1.0 - ab * qn1) * (1.0 - p.beta * p.delta * qn1) *
           (1.0 - p.gamma * qn1) /
           ((1.0 - ab * std::pow(q, 2 * n + 1)) * (1.0 - ab * std::pow(q, 2 * n + 2)));
}

double recurrence_C(const QRacahParams& p, int n) {
    const double q = p.q;
    double qn = std::pow(q, n);
    double ab = p.alpha * p.beta;
    return q * (1.0 - qn) * (1.0 - p.beta * qn) * (p.delta - p.alpha * qn) *
           (p.gamma - ab * qn) /
           ((1.0 - ab * std::pow(q, 2 * n)) * (1.0 - ab * std::pow(q, 2 * n + 1)));
}

Eigen::MatrixXd orthonormal_matrix(const QuadraticLattice& lat) {
    const QRacahParams& p = lat.params;
    const int dim = p.M + 1;
    Eigen::VectorXd diag(dim), off(std::max(dim - 1, 0));
    for (int n = 0; n < dim; ++n) {
        double A = recurrence_A(p, n), C = recurrence_C(p, n);
        diag[n] = 1.0 + p.u - A - C;
        if (n + 1 < dim) {
            double prod = recurrence_A(p, n) * recurrence_C(p, n + 1);
            if (prod < 0.0)
                throw std::runtime_error("orthonormal_matrix: negative A_n*C_{n+1} at n=" +
                                         std::to_string(n));
            off[n] = std::copysign(std::sqrt(prod), A);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("orthonormal_matrix: eigensolver failed");
    // eigenvalues ascending must reproduce the (ascending) lattice nodes
    double scale = lat.nodes.back();
    for (int i = 0; i < dim; ++i)
        if (std::abs(es.eigenvalues()[i] - lat.nodes[i]) > 1e-8 * scale)
            throw std::runtime_error("orthonormal_matrix: eigenvalue/node mismatch at index " +
                                     std::to_string(i));
    // Column i of eigenvectors() is (u_n(x_i))_n; transpose so U(x, n) = u_n(x).
    // Per-node sign is fixed by u_0(x) = sqrt(w(x)/c_0) > 0 where that entry
    // is resolvable.  All determinantal correlation functions are invariant
    // under per-node sign flips (conjugation by diag(+-1)), so rows whose
    // u_0 underflows are left as the solver returned them.
    Eigen::MatrixXd U = es.eigenvectors().transpose();
    for (int x = 0; x < dim; ++x)
        if (U(x, 0) < 0.0) U.row(x) = -U.row(x);
    return U;
}

StieltjesTable::StieltjesTable(const QuadraticLattice& lat)
    : lat_(lat), U(orthonormal_matrix(lat)) {
    half_logw.resize(lat_.params.M + 1);
    for (int x = 0; x <= lat_.params.M; ++x) half_logw[x] = 0.5 * log_weight(lat_.params, x);
}

LogVal StieltjesTable::h(int n, double zeta) const {
    const QRacahParams& p = lat_.params;
    require(n >= 0 && n <= p.M, "stieltjes_h: n outside [0,M]");
    double scale = std::abs(zeta) + lat_.nodes.back();
    double lmax = *std::max_element(half_logw.begin(), half_logw.end());
    KahanSum acc;
    for (int x = 0; x <= p.M; ++x) {
        double dz = zeta - lat_.nodes[x];
        if (std::abs(dz) < 1e-13 * scale)
            throw std::domain_error("stieltjes_h: zeta coincides with lattice node x=" +
                                    std::to_string(x));
        acc.add(U(x, n) * std::exp(half_logw[x] - lmax) / dz);
    }
    LogVal out = LogVal::from(acc.total());
    out.lg += lmax;
    return out * log_norm(p, n).pow(0.5);
}

LogVal stieltjes_h_log(const QuadraticLattice& lat, int n, double zeta) {
    return StieltjesTable(lat).h(n, zeta);
}

double stieltjes_h(const QuadraticLattice& lat, int n, double zeta) {
    return stieltjes_h_log(lat, n, zeta).value();
}

}  // namespace qlg::orthopoly
