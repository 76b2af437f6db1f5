#pragma once

#include <functional>
#include <vector>

#include "qlg/limitshape.hpp"

namespace qlg::varsolve {

/// Density discretized on a uniform midpoint grid over [lo, hi] in the
/// sigma-coordinate, constrained to 0 <= rho <= cap(x) with fixed total mass.
struct DiscretizedMeasure {
    double lo, hi, cell;
    double theta;
    std::vector<double> grid;     // cell midpoints
    std::vector<double> density;
    std::vector<double> cap;

    double mass() const;
};

/// I_V[rho] = theta iint_{x != y} log|x-y| rho rho - int V rho, double
/// midpoint rule with the diagonal cell integrated in closed form
/// (iint over a cell^2 of log|x-y| = h^2 (log h - 3/2)).
double functional_iv(const DiscretizedMeasure& m, const std::vector<double>& V);

/// Dilogarithm form of the scaled potential:
/// V(s) = (1/-log q) [ Li(q^s) + Li(a^{-1} c d q^s) + Li(b^{-1} c q^s)
///        + Li(d q^s) + Li(a^{-1} q^{-s}) + Li(c^{-1} q^{-s})
///        - Li(b d q^s) - Li(c d q^s) + log(q)^2 s^2 + s log(q) log(c/b) ].
double potential_v(const limitshape::ScaledParams& p, double s);

struct MaximizeResult {
    DiscretizedMeasure measure;
    bool converged;
    int iterations;
    double grad_map_norm;          // ||proj step|| / step size at exit
    bool ascent_monotone;          // I_V non-decreasing along iterates
    std::vector<double> effective; // F(x) = 2 theta int log|x-t| rho - V(x)
};

/// Projected gradient ascent of I_V over the box-and-mass simplex.  The
/// projection is exact (dual bisection over the additive shift).
MaximizeResult maximize(const std::function<double(double)>& V, double theta, double lo, double hi,
                        const std::function<double(double)>& cap, double mass, int grid_size,
                        int max_iters, double tol = 1e-7);

/// Convenience wrapper for the scaled one-cut ensemble: V from potential_v,
/// interval [sigma(0), sigma(M)] = [1 + cd, c + d], cap 1/(theta f_q), mass 1.
MaximizeResult solve_equilibrium(const limitshape::ScaledParams& p, int grid_size = 400,
                                 int max_iters = 20000, double tol = 1e-7);

/// Closed-form density transported to the sigma coordinate:
/// rho(x) = mu(sigma^{-1}(x)) / f_q(sigma^{-1}(x)).
double closed_form_density_sigma(const limitshape::ScaledParams& p, double x);

}  // namespace qlg::varsolve
