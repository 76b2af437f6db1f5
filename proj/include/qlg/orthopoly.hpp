#pragma once

#include <vector>

#include <Eigen/Dense>

#include "qlg/core.hpp"

namespace qlg::orthopoly {

/// Parameter set (alpha, beta, gamma, delta, q, M, N) of the q-Racah weight
/// on {0..M}, with gamma = q^{-M-1} derived.  Construction enforces the
/// constraints needed for a positive lattice measure:
///   q in (0,1), M >= N-1 >= 0, alpha,beta > 0, delta >= 0,
///   alpha >= gamma, beta >= gamma, beta*delta*q < 1, u = gamma*delta*q < 1,
/// and checks w(x) > 0 for all x.  The stricter textbook condition
/// beta*delta < 1 is reported by strict_positive_regime(); hexagon slices
/// near the kappa boundary legitimately violate it while all weights stay
/// positive, so it is not enforced here.
struct QRacahParams {
    double alpha, beta, delta, q;
    int M, N;
    double gamma;  // q^{-M-1}
    double u;      // gamma*delta*q

    QRacahParams(double alpha_, double beta_, double delta_, double q_, int M_, int N_);
    bool strict_positive_regime() const { return beta * delta < 1.0; }
};

/// The node set {sigma(q^{-x}) : x = 0..M} with sigma(z) = z + u/z,
/// i.e. y(x) = q^{-x} + gamma*delta*q^{x+1}, strictly increasing in x.
struct QuadraticLattice {
    QRacahParams params;
    std::vector<double> nodes;

    explicit QuadraticLattice(const QRacahParams& p);
    double sigma(double z) const { return z + params.u / z; }
};

/// w^{qR}(x), the q-Racah weight at lattice index x.
double weight(const QRacahParams& p, int x);

/// log w^{qR}(x); the plain value overflows once (alpha*beta*q)^{-x} leaves
/// double range, every internal consumer works with this form.
double log_weight(const QRacahParams& p, int x);

/// Alternative weight form w~^{qR}(x) whose ratio to w^{qR}(x) is a constant
/// in x (the prefactor of infinite Pochhammer symbols).
double tilde_weight(const QRacahParams& p, int x);
double log_tilde_weight(const QRacahParams& p, int x);

/// P_n at an arbitrary point zeta of the spectral variable, via the
/// terminating 4-phi-3 series written in the node variable:
/// term k carries prod_{i<k} (1 + gamma*delta*q^{2i+1} - q^i * zeta).
/// Normalization: P_n(node 0) = 1.
double poly_eval_at(const QRacahParams& p, int n, double zeta);

/// P_n at lattice index x (series path).
double poly_eval(const QRacahParams& p, int n, int x);

/// P_n at an arbitrary point via the three-term recurrence in the degree
/// (stable where the series cancels catastrophically, e.g. large alpha*beta).
double poly_eval_recur(const QRacahParams& p, int n, double zeta);

/// P_n on the whole lattice as the solution of the three-term q-difference
/// equation in x with y(0) = 1.  Executed in the equivalent symmetric
/// eigenproblem form of the same difference operator; a literal forward
/// sweep amplifies roundoff beyond 1e30 already at M = 20.
std::vector<double> poly_lattice_recursion(const QRacahParams& p, int n);

/// Coefficients B-hat(x), D-hat(x) of the q-difference equation and the
/// eigenvalue factor lambda(n) = q^{-n}(1-q^n)(1-alpha*beta*q^{n+1}).
double diffeq_B(const QRacahParams& p, int x);
double diffeq_D(const QRacahParams& p, int x);
double diffeq_lambda(const QRacahParams& p, int n);

/// Squared norm c_n = sum_x w(x) P_n(x)^2 from the closed product form,
/// in signed-log form (positive).  norm() returns the plain value.
LogVal log_norm(const QRacahParams& p, int n);
double norm(const QRacahParams& p, int n);

/// Leading coefficient k_n of P_n as a polynomial in the node variable:
/// k_n = (alpha*beta*q^{n+1};q)_n / ((alpha*q;q)_n (beta*delta*q;q)_n (gamma*q;q)_n).
LogVal log_leading_coeff(const QRacahParams& p, int n);

/// Recurrence coefficients in n (dual of the q-difference equation):
///   y(x) P_n = A_n P_{n+1} + (1 + u - A_n - C_n) P_n + C_n P_{n-1}.
double recurrence_A(const QRacahParams& p, int n);
double recurrence_C(const QRacahParams& p, int n);

/// Matrix U with U(x, n) = P_n(x) sqrt(w(x)/c_n): the orthonormal functions
/// of the weight, obtained as eigenvectors of the symmetric tridiagonal
/// Jacobi matrix of the recurrence (eigenvalues are exactly the nodes).
/// Throws std::runtime_error when eigenvalues fail to match the nodes.
Eigen::MatrixXd orthonormal_matrix(const QuadraticLattice& lat);

/// Stieltjes-type transform H_n(zeta) = sum_x P_n(x) w(x) / (zeta - node_x),
/// returned in signed-log form.  zeta must stay away from the nodes.
/// Evaluated through the orthonormal basis, sqrt(c_n) sum_x u_n(x)
/// sqrt(w(x)) / (zeta - node_x), whose summands stay O(sqrt(c_n w)).
LogVal stieltjes_h_log(const QuadraticLattice& lat, int n, double zeta);
double stieltjes_h(const QuadraticLattice& lat, int n, double zeta);

/// Batch form reusing one eigenbasis for several (n, zeta) requests.
class StieltjesTable {
  public:
    explicit StieltjesTable(const QuadraticLattice& lat);
    LogVal h(int n, double zeta) const;
    double poly(int n, double zeta) const { return poly_eval_recur(lat_.params, n, zeta); }

  private:
    QuadraticLattice lat_;
    Eigen::MatrixXd U;
    std::vector<double> half_logw;
};

}  // namespace qlg::orthopoly
