#pragma once

#include "ptbox/inner_products.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace ptbox::variational {

// S = diag(I_n, -I_n).
struct ParitySignature {
    int half_dim = 1;
    Eigen::VectorXd diagonal() const;
    Eigen::MatrixXd matrix() const;
};

// h = [[a, i b], [i c, d]] with real blocks. PT symmetric by construction;
// PT self-adjoint iff c = b^T (and a, d symmetric).
struct PTHamiltonian {
    Eigen::MatrixXd a, b, c, d;

    int half_dim() const { return static_cast<int>(a.rows()); }
    ParitySignature signature() const { return {half_dim()}; }
    Eigen::MatrixXcd matrix() const;
    bool pt_self_adjoint(double tol = 1e-12) const;
};

PTHamiltonian build_pt_hamiltonian(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& d);
PTHamiltonian pt_hamiltonian_from_blocks(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                         const Eigen::MatrixXd& c, const Eigen::MatrixXd& d);

// Random PT-self-adjoint h with symmetric a, d of unit scale and b scaled by b_scale.
PTHamiltonian random_pt_hamiltonian(int half_dim, double b_scale, std::uint64_t seed);

// psi^dagger S h psi, before discarding the imaginary part.
cd b_functional_complex(const Eigen::VectorXcd& psi, const PTHamiltonian& h);
double b_functional(const Eigen::VectorXcd& psi, const PTHamiltonian& h);

struct ExtremizationResult {
    Eigen::VectorXcd psi;
    double lambda = 0.0;
    int constraint_class = 1;
    double residual = 0.0;  // ||h psi - lambda psi||
    double pt_norm = 0.0;   // psi^dagger S psi
};

struct ExtremizeOptions {
    std::uint64_t seed = 0;
    int starts = 0;  // 0 selects 20 * dimension
    int max_newton = 200;
    double tol = 1e-13;
};

struct ExtremizationReport {
    std::vector<ExtremizationResult> results;  // distinct lambda, ascending
    int starts = 0;
    int failed_starts = 0;  // NoConvergence, per start
};

ExtremizationReport extremize(const PTHamiltonian& h, int constraint_class, const ExtremizeOptions& opt = {});
ExtremizationReport rayleigh_extremize_hermitian(const Eigen::MatrixXcd& h, const ExtremizeOptions& opt = {});

// First variation of B - lambda ((psi, psi)_PT - c) for the box, with
// B = -(1/2) int psi*(L-x) psi''(x) dx and lambda = B / (psi, psi)_PT.
cd box_functional(const BoxConfig& config, const inner::WaveFunction& psi);
cd box_variational_residual(const BoxConfig& config, const inner::WaveFunction& psi,
                            const inner::WaveFunction& delta_psi);

}  // namespace ptbox::variational
