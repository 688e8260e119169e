#pragma once

#include "ptbox/boundary.hpp"

#include <functional>
#include <vector>

// Similarity kernels between the hard-wall box and the maximally
// non-hermitian box with boundary pair (i ell2, i ell2), ell1 = 0.
namespace ptbox::kernel {

enum class Method { split, direct_sum };

inline constexpr int kDefaultTerms = 500;

struct KernelEvaluation {
    double x = 0.0;
    double xp = 0.0;
    cd value;
    int terms = 0;
    Method method = Method::split;
};

// sqrt(2/L) sin(n pi x / L).
double textbook_mode(int n, double x, double length);

// Normalized ladder mode psi_n = sqrt(2/L) |1 - u^2|^{-1/2} (sin k x + i u cos k x),
// k = n pi / L, u = k ell2, and its biorthogonal partner conj(phi_n) = sign(1 - u^2) psi_n.
cd box_mode(int n, double x, double length, double ell2);
cd box_adjoint_conj(int n, double x, double length, double ell2);

// Closed-form sum of the slowly converging part of K:
// (i s/2L)[cot(pi(x'-x)/2L) + cot(pi(x'+x)/2L)] + (1/(pi |ell2|)) ln|sin(pi(x+x')/2L) / sin(pi(x-x')/2L)|,
// s = sign(ell2).
cd k1_closed(double x, double xp, double length, double ell2);

// The K1 series itself, as a Hann-weighted mean of the partial sums with
// terms/2 < m <= terms.
cd k1_direct_sum(double x, double xp, double length, double ell2, int terms);

// Absolutely convergent remainder, truncated to `terms` terms.
cd k2_truncated(double x, double xp, double length, double ell2, int terms = kDefaultTerms);

// K(x, x') = sum_n psi_n(x) xi_n(x'). The direct sum is a Hann-weighted mean
// of the partial sums with terms/2 < m <= terms.
KernelEvaluation kernel_K(double x, double xp, double length, double ell2, int terms = kDefaultTerms,
                          Method method = Method::split);

// M(x, x') = sum_n xi_n(x) conj(phi_n(x')), truncated.
cd kernel_M(double x, double xp, double length, double ell2, int terms = kDefaultTerms);

// Upper bound on |K2| valid for all (x, x'): partial sums to n_tail plus an
// integral bound of the 1/n^2 tail. n_tail is extended until pi|ell2|n/L > 2.
double k2_bound(double length, double ell2, int n_tail = kDefaultTerms);

struct NonlocalityReport {
    bool found = false;
    double x = 0.0;
    double xp = 0.0;
    cd k1;
    double k2_bound = 0.0;
    double margin = 0.0;       // |K1| / bound
    double lower_bound = 0.0;  // |K1| - bound <= |K|
    int level = 0;             // separation L / 2^level
};

// Scans dyadic separations h = L/2^j about the box centre, j = 1..max_level,
// and reports the widest pair with |K1| >= 10 * bound.
NonlocalityReport nonlocality_report(double length, double ell2, int max_level = 40);

// max_x |(M_N K_N g)(x) - g(x)| for g(x) = x (L - x) e^{x/L}.
double left_inverse_residual(double length, double ell2, int terms, int grid_points = 101);

// max_x |(M_N psi_n)(x) - xi_n(x)|.
double modal_action_residual(double length, double ell2, int terms, int n, int grid_points = 101);

// max_x |sum_n psi_n(x) (phi_n, f) - f(x)| over the ladder plus the
// unidirectional mode when it lies below the truncation.
double bicompleteness_residual(double length, double ell2, int terms, const std::function<cd(double)>& f,
                               int grid_points = 101);

// Kernel on grid x grid, rows ordered (x outer, x' inner). Coincident points
// are skipped for the split method.
std::vector<KernelEvaluation> kernel_grid(double length, double ell2, const std::vector<double>& grid, int terms,
                                          Method method, int jobs = 1);

}  // namespace ptbox::kernel
