#include "qlg/qspecial.hpp"

#include <cmath>
#include <limits>

namespace qlg::qspecial {

namespace {
constexpr double kPi = 3.14159265358979323846;

void check_q(double q) {
    require(q > 0.0 && q < 1.0, "q must lie in (0,1), got q=" + std::to_string(q));
}
}  // namespace

double q_pochhammer(double a, double q, int k) {
    check_q(q);
    require(k >= 0, "q_pochhammer: k must be nonnegative");
    double p = 1.0, aq = a;
    for (int i = 0; i < k; ++i) {
        p *= (1.0 - aq);
        aq *= q;
    }
    return p;
}

LogVal log_q_pochhammer(double a, double q, int k) {
    check_q(q);
    require(k >= 0, "log_q_pochhammer: k must be nonnegative");
    LogVal out = LogVal::one();
    double aq = a;
    for (int i = 0; i < k; ++i) {
        out *= LogVal::from(1.0 - aq);
        aq *= q;
    }
    return out;
}

double q_pochhammer_inf(double a, double q, double tol) {
    check_q(q);
    require(tol > 0.0, "q_pochhammer_inf: tol must be positive");
    if (std::abs(a) * q >= 1.0)
        throw std::domain_error("q_pochhammer_inf: |a|*q >= 1, tail does not contract");
    double p = 1.0, aq = a;
    double cut = tol * (1.0 - q);
    while (std::abs(aq) >= cut) {
        p *= (1.0 - aq);
        aq *= q;
    }
    return p;
}

double log_q_pochhammer_inf(double a, double q, double tol) {
    check_q(q);
    require(a >= 0.0 && a < 1.0, "log_q_pochhammer_inf: a must be in [0,1)");
    double s = 0.0, aq = a;
    double cut = tol * (1.0 - q);
    while (aq >= cut && aq > 0.0) {
        s += std::log1p(-aq);
        aq *= q;
    }
    return s;
}

double q_gamma(double x, double q) {
    check_q(q);
    double r = std::round(x);
    if (r <= 0.0 && std::abs(x - r) < 1e-13)
        throw std::domain_error("q_gamma: pole at nonpositive integer x=" + std::to_string(x));
    double qx = std::pow(q, x);
    return std::pow(1.0 - q, 1.0 - x) * q_pochhammer_inf(q, q) / q_pochhammer_inf(qx, q);
}

double phi43(const double a[4], const double b[3], double q, double z, int kmax) {
    check_q(q);
    require(kmax >= 0, "phi43: kmax must be nonnegative");
    double sum = 1.0;   // k = 0 term
    double term = 1.0;  // running product of the k-th term
    double aq[4] = {a[0], a[1], a[2], a[3]};
    double bq[3] = {b[0], b[1], b[2]};
    double qq = 1.0;  // q^k factor source for (q;q)_k
    for (int k = 1; k <= kmax; ++k) {
        double num = 1.0;
        for (double& v : aq) {
            num *= (1.0 - v);
            v *= q;
        }
        if (num == 0.0) break;  // series terminated by a numerator zero
        double den = 1.0 - qq * q;  // (q;q)_k incremental factor: (1 - q^k)
        for (double& v : bq) {
            den *= (1.0 - v);
            v *= q;
        }
        if (den == 0.0)
            throw std::domain_error("phi43: denominator factor vanishes at k=" + std::to_string(k));
        term *= num / den * z;
        qq *= q;
        sum += term;
    }
    return sum;
}

double dilog(double x) {
    if (x < 0.0 && x > -1e-12) x = 0.0;
    if (x > 1.0 && x < 1.0 + 1e-12) x = 1.0;
    if (x < 0.0 || x > 1.0) throw std::domain_error("dilog: argument outside [0,1]");
    if (x == 1.0) return kPi * kPi / 6.0;
    if (x > 0.5) return kPi * kPi / 6.0 - std::log(x) * std::log1p(-x) - dilog(1.0 - x);
    double s = 0.0, t = x;
    for (int k = 1; k < 2000; ++k) {
        double add = t / (static_cast<double>(k) * k);
        s += add;
        if (add < 1e-18) break;
        t *= x;
    }
    return s;
}

}  // namespace qlg::qspecial
