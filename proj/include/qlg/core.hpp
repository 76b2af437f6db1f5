#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qlg {

/// Signed log-scale scalar: value = sign * exp(lg).  Weights, norms and
/// Vandermonde products in this toolkit span thousands of orders of
/// magnitude, so every product-heavy quantity is carried in this form.
struct LogVal {
    double lg = 0.0;  // log of |value|; -inf encodes zero
    int sign = 1;     // -1, 0, +1

    static LogVal zero() { return {-std::numeric_limits<double>::infinity(), 0}; }
    static LogVal one() { return {0.0, 1}; }
    static LogVal from(double x) {
        if (x == 0.0) return zero();
        return {std::log(std::abs(x)), x > 0 ? 1 : -1};
    }
    double value() const { return sign == 0 ? 0.0 : sign * std::exp(lg); }
    bool is_zero() const { return sign == 0; }

    LogVal operator*(const LogVal& o) const {
        if (sign == 0 || o.sign == 0) return zero();
        return {lg + o.lg, sign * o.sign};
    }
    LogVal operator/(const LogVal& o) const {
        if (o.sign == 0) throw std::domain_error("LogVal: division by zero");
        if (sign == 0) return zero();
        return {lg - o.lg, sign * o.sign};
    }
    LogVal& operator*=(const LogVal& o) { return *this = *this * o; }
    LogVal& operator/=(const LogVal& o) { return *this = *this / o; }

    LogVal operator+(const LogVal& o) const {
        if (sign == 0) return o;
        if (o.sign == 0) return *this;
        const LogVal* big = this;
        const LogVal* sml = &o;
        if (o.lg > lg) std::swap(big, sml);
        double r = sml->sign * big->sign * std::exp(sml->lg - big->lg);
        double f = 1.0 + r;
        if (f == 0.0) return zero();
        return {big->lg + std::log(std::abs(f)), f > 0 ? big->sign : -big->sign};
    }
    LogVal pow(double e) const {
        if (sign == 0) return zero();
        if (sign < 0) throw std::domain_error("LogVal: pow of negative value");
        return {lg * e, 1};
    }
};

/// Kahan-compensated accumulator for enumeration expectations.
struct KahanSum {
    double s = 0.0, c = 0.0;
    void add(double x) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    double total() const { return s; }
};

/// Dense polynomial with real coefficients, coeffs[k] * z^k.
class Polynomial {
  public:
    Polynomial() = default;
    explicit Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) { trim(); }
    static Polynomial constant(double v) { return Polynomial({v}); }
    static Polynomial monomial(int deg, double v = 1.0) {
        std::vector<double> c(deg + 1, 0.0);
        c[deg] = v;
        return Polynomial(std::move(c));
    }
    /// prod (z - roots[i])
    static Polynomial from_roots(const std::vector<double>& roots) {
        Polynomial p = constant(1.0);
        for (double r : roots) p = p * Polynomial({-r, 1.0});
        return p;
    }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const std::vector<double>& coeffs() const { return c_; }
    double coeff(int k) const { return (k >= 0 && k < (int)c_.size()) ? c_[k] : 0.0; }

    template <typename T>
    T operator()(T z) const {
        T acc = T(0);
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + T(*it);
        return acc;
    }

    Polynomial operator+(const Polynomial& o) const {
        std::vector<double> r(std::max(c_.size(), o.c_.size()), 0.0);
        for (size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
        for (size_t i = 0; i < o.c_.size(); ++i) r[i] += o.c_[i];
        return Polynomial(std::move(r));
    }
    Polynomial operator-(const Polynomial& o) const { return *this + o * (-1.0); }
    Polynomial operator*(const Polynomial& o) const {
        if (c_.empty() || o.c_.empty()) return Polynomial();
        std::vector<double> r(c_.size() + o.c_.size() - 1, 0.0);
        for (size_t i = 0; i < c_.size(); ++i)
            for (size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
        return Polynomial(std::move(r));
    }
    Polynomial operator*(double s) const {
        std::vector<double> r = c_;
        for (double& x : r) x *= s;
        return Polynomial(std::move(r));
    }
    Polynomial derivative() const {
        if (c_.size() <= 1) return Polynomial();
        std::vector<double> r(c_.size() - 1);
        for (size_t i = 1; i < c_.size(); ++i) r[i - 1] = c_[i] * static_cast<double>(i);
        return Polynomial(std::move(r));
    }
    /// Antiderivative with zero constant term.
    Polynomial antiderivative() const {
        std::vector<double> r(c_.size() + 1, 0.0);
        for (size_t i = 0; i < c_.size(); ++i) r[i + 1] = c_[i] / static_cast<double>(i + 1);
        return Polynomial(std::move(r));
    }

  private:
    void trim() {
        while (c_.size() > 1 && c_.back() == 0.0) c_.pop_back();
    }
    std::vector<double> c_;
};

/// splitmix64; used to derive independent per-stream seeds from one master
/// seed.  Stream k of master seed s is seeded with split_seed(s, k).
inline uint64_t split_seed(uint64_t master, uint64_t stream) {
    uint64_t z = master + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace qlg
