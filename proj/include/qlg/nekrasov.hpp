#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "qlg/ensemble.hpp"
#include "qlg/limitshape.hpp"

namespace qlg::nekrasov {

/// One state-space interval: integer positions a <= x <= b-1 holding n
/// particles (weakly increasing within the group).
struct Interval {
    int a, b, n;
};

/// General discrete log-gas on shifted quadratic lattices: particle i (global
/// index, 1-based across groups) sits at lambda_i = x_i + (i-1)theta with
/// node value ell_i = q^{-lambda_i} + u q^{lambda_i}.
struct ThetaEnsembleSpec {
    double theta;
    double q;
    double u;  // in [0,1); u = q^v
    std::vector<Interval> intervals;
    std::function<double(double)> log_weight;  // log w as a function of lambda

    int total_particles() const;
    /// All admissible lambda values of particle i (0-based).
    std::vector<double> lambda_range(int i) const;
};

/// Interaction H(ell_i, ell_j) of the measure, lambda_j > lambda_i.
/// At u = 0 the second Gamma-ratio block degenerates to (1-q)^{-2 theta}.
double interaction_h(const ThetaEnsembleSpec& spec, double lambda_i, double lambda_j);

/// Pair of analytic functions entering the loop equation, with the four
/// vanishing conditions per interval verified numerically at construction.
struct PhiPair {
    Polynomial plus, minus;
    PhiPair(const ThetaEnsembleSpec& spec, Polynomial plus_, Polynomial minus_);
};

/// q-Racah loop-equation pair Phi+(z) = (z-alpha)(z-beta delta)(z-gamma)(z-gamma delta),
/// Phi-(z) = (z-1)(alpha z-gamma delta)(beta z-gamma)(z-delta).
Polynomial qracah_phi_plus(const ensemble::QRacahParams& p);
Polynomial qracah_phi_minus(const ensemble::QRacahParams& p);

/// theta = 1 spec of the q-Racah ensemble (k = 1, a = 0, b = M-N+2).
ThetaEnsembleSpec qracah_theta_spec(const ensemble::QRacahParams& p);

/// Weight synthesized by telescoping the mandated ratio
///   w(sigma(z))/w(sigma(qz)) = (q^2 z^2 - u q^theta)(z^2 - u) Phi+(z)
///                              / ((q^theta z^2 - u)(q^2 z^2 - u) Phi-(z))
/// from seed_value at the leftmost node of each residue class of lambda
/// (classes mod 1 are only relatively normalized by the equation; per-class
/// seeds do not affect the loop-equation identity).
std::function<double(double)> synthesize_weight(const ThetaEnsembleSpec& spec, const PhiPair& phis,
                                                double seed_value);

/// Exhaustive states with signed log weights (unnormalized).
struct EnumeratedMeasure {
    std::vector<std::vector<double>> lambdas;  // per state
    std::vector<LogVal> weights;
    LogVal Z;
};

EnumeratedMeasure enumerate_measure(const ThetaEnsembleSpec& spec, uint64_t cap = 1000000);

/// R~(z) = Phi-(z) E[prod (sigma(q^theta z)-ell)/(sigma(z)-ell)]
///       + Phi+(z) E[prod (sigma(q^{1-theta} z)-ell)/(sigma(q z)-ell)]
/// by enumeration.  min_pole_dist (if given) receives the smallest relative
/// distance of the denominators to a pole; values below 1e-8 mean the
/// evaluation point is unreliable.
std::complex<double> rtilde_bruteforce(const ThetaEnsembleSpec& spec, const PhiPair& phis,
                                       const EnumeratedMeasure& em, std::complex<double> z,
                                       double* min_pole_dist = nullptr);

/// Same loop observable for the q-Racah ensemble through the orthogonal
/// polynomial determinant formula; no enumeration, usable at large N.
double rtilde_orthopoly(const ensemble::QRacahParams& p, double z);

struct PolyFit {
    bool is_poly;
    std::vector<double> coeffs;
    double residual;  // max |fit - value| / max |value|
};

/// Least-squares degree-d fit on the supplied points (Chebyshev-spaced
/// recommended); is_poly when the relative residual is below tol.
PolyFit polynomiality_certificate(const std::vector<double>& zs, const std::vector<double>& vals,
                                  int degree, double tol = 1e-8);

/// Limiting loop polynomial
/// R_inf(z) = (z-a)(z-bd)(z-c)(z-cd) + (z-1)(z-d)(zb-c)(za-cd)
///          + (z^2-cd)^2 (q^{-1}-1)(1-abq).
Polynomial r_infinity_poly(const limitshape::ScaledParams& p);
double r_infinity(const limitshape::ScaledParams& p, double z);

/// Deformed-measure loop check at u = 0 (delta = 0 q-Racah): the deformed
/// weight w(x) prod_a (1 + t_a/(v_a - ell)) with
/// Phi+-^{t,v} from the deformation rule; fits R~ at degree 4 + 2m.
struct DeformedReport {
    PolyFit fit;
    int expected_degree;
};
DeformedReport deformed_measure_check(const ensemble::QRacahParams& p,
                                      const std::vector<double>& ts,
                                      const std::vector<double>& vs, double tol = 1e-8);

/// Expectation of a configuration functional under the deformed measure
/// (brute force); used for the cumulant identity.
double deformed_expectation(const ensemble::QRacahParams& p, const std::vector<double>& ts,
                            const std::vector<double>& vs,
                            const std::function<double(const std::vector<int>&)>& xi);

}  // namespace qlg::nekrasov
