#include "qlg/varsolve.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "qlg/qspecial.hpp"

namespace qlg::varsolve {

double DiscretizedMeasure::mass() const {
    double s = 0.0;
    for (double v : density) s += v;
    return s * cell;
}

double functional_iv(const DiscretizedMeasure& m, const std::vector<double>& V) {
    require(V.size() == m.grid.size(), "functional_iv: V size mismatch");
    const int n = static_cast<int>(m.grid.size());
    const double h = m.cell;
    double quad = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j)
            quad += 2.0 * std::log(std::abs(m.grid[i] - m.grid[j])) * m.density[i] * m.density[j];
        quad += (std::log(h) - 1.5) * m.density[i] * m.density[i];
    }
    quad *= h * h;
    double lin = 0.0;
    for (int i = 0; i < n; ++i) lin += V[i] * m.density[i];
    return m.theta * quad - lin * h;
}

double potential_v(const limitshape::ScaledParams& p, double s) {
    require(s >= -1e-12 && s <= p.Mscaled + 1e-12, "potential_v: s outside [0, M]");
    s = std::min(std::max(s, 0.0), p.Mscaled);
    using qspecial::dilog;
    const double qs = std::pow(p.q, s), qsm = std::pow(p.q, -s);
    const double lq = std::log(p.q);
    double t = dilog(qs) + dilog(p.c * p.d * qs / p.a) + dilog(p.c * qs / p.b) +
               dilog(p.d * qs) + dilog(qsm / p.a) + dilog(qsm / p.c) - dilog(p.b * p.d * qs) -
               dilog(p.c * p.d * qs);
    t += lq * lq * s * s + s * lq * std::log(p.c / p.b);
    return t / (-lq);
}

namespace {
// exact projection onto { 0 <= rho <= cap, sum rho * h = mass }
void project(std::vector<double>& rho, const std::vector<double>& cap, double h, double mass) {
    double lo = -1e12, hi = 1e12;
    auto m_at = [&](double lam) {
        double s = 0.0;
        for (size_t i = 0; i < rho.size(); ++i)
            s += std::min(std::max(rho[i] + lam, 0.0), cap[i]);
        return s * h;
    };
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (m_at(mid) > mass)
            hi = mid;
        else
            lo = mid;
    }
    double lam = 0.5 * (lo + hi);
    for (size_t i = 0; i < rho.size(); ++i)
        rho[i] = std::min(std::max(rho[i] + lam, 0.0), cap[i]);
}
}  // namespace

MaximizeResult maximize(const std::function<double(double)>& V, double theta, double lo, double hi,
                        const std::function<double(double)>& cap, double mass, int grid_size,
                        int max_iters, double tol) {
    require(grid_size >= 64, "maximize: grid_size >= 64 required");
    require(hi > lo, "maximize: empty interval");
    MaximizeResult out;
    DiscretizedMeasure& m = out.measure;
    m.lo = lo;
    m.hi = hi;
    m.cell = (hi - lo) / grid_size;
    m.theta = theta;
    m.grid.resize(grid_size);
    m.cap.resize(grid_size);
    std::vector<double> Vx(grid_size);
    for (int i = 0; i < grid_size; ++i) {
        m.grid[i] = lo + (i + 0.5) * m.cell;
        m.cap[i] = cap(m.grid[i]);
        Vx[i] = V(m.grid[i]);
    }
    Eigen::MatrixXd L(grid_size, grid_size);
    for (int i = 0; i < grid_size; ++i) {
        for (int j = 0; j < grid_size; ++j)
            L(i, j) = (i == j) ? (std::log(m.cell) - 1.5)
                               : std::log(std::abs(m.grid[i] - m.grid[j]));
    }
    m.density.assign(grid_size, mass / (hi - lo));
    project(m.density, m.cap, m.cell, mass);

    Eigen::Map<Eigen::VectorXd> rho(m.density.data(), grid_size);
    Eigen::Map<const Eigen::VectorXd> Vv(Vx.data(), grid_size);
    auto iv = [&](const Eigen::VectorXd& r) {
        return theta * m.cell * m.cell * r.dot(L * r) - m.cell * Vv.dot(r);
    };
    double eta = 1.0;
    double cur = iv(rho);
    out.ascent_monotone = true;
    out.grad_map_norm = 1e300;
    int it = 0;
    for (; it < max_iters; ++it) {
        Eigen::VectorXd grad = 2.0 * theta * m.cell * (L * rho) - Vv;  // dI/drho_i / cell
        std::vector<double> cand(m.density);
        for (int i = 0; i < grid_size; ++i) cand[i] += eta * grad[i];
        project(cand, m.cap, m.cell, mass);
        Eigen::Map<Eigen::VectorXd> cv(cand.data(), grid_size);
        double nxt = iv(cv);
        double slack = 1e-12 * (std::abs(cur) + 1.0);
        if (nxt < cur - slack) {
            eta *= 0.5;
            if (eta < 1e-14) break;
            continue;
        }
        double delta = (cv - rho).cwiseAbs().maxCoeff() / eta;
        if (nxt < cur - slack) out.ascent_monotone = false;
        m.density = cand;
        cur = nxt;
        out.grad_map_norm = delta;
        if (delta < tol) break;
    }
    out.iterations = it;
    out.converged = out.grad_map_norm < tol;
    out.effective.resize(grid_size);
    Eigen::VectorXd F = 2.0 * theta * m.cell * (L * rho) - Vv;
    for (int i = 0; i < grid_size; ++i) out.effective[i] = F[i];
    return out;
}

MaximizeResult solve_equilibrium(const limitshape::ScaledParams& p, int grid_size, int max_iters,
                                 double tol) {
    const double u = p.u;
    double lo = 1.0 + u;
    double hi = p.c + p.d;
    auto sig_inv = [&](double x) {
        double y = 0.5 * (x + std::sqrt(std::max(x * x - 4.0 * u, 0.0)));
        return std::log(y) / (-std::log(p.q));
    };
    auto fq = [&](double s) {
        return (-std::log(p.q)) * (std::pow(p.q, -s) - u * std::pow(p.q, s));
    };
    auto V = [&, p](double x) { return potential_v(p, sig_inv(x)); };
    auto cap = [&](double x) { return 1.0 / fq(sig_inv(x)); };
    return maximize(V, 1.0, lo, hi, cap, 1.0, grid_size, max_iters, tol);
}

double closed_form_density_sigma(const limitshape::ScaledParams& p, double x) {
    const double u = p.u;
    double y = 0.5 * (x + std::sqrt(std::max(x * x - 4.0 * u, 0.0)));
    double s = std::log(y) / (-std::log(p.q));
    double fq = (-std::log(p.q)) * (std::pow(p.q, -s) - u * std::pow(p.q, s));
    return limitshape::mu_density(p, s) / fq;
}

}  // namespace qlg::varsolve
