#pragma once

#include "ptbox/spectrum.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace ptbox::inner {

using Fn = std::function<cd(double)>;

// Callable wave function on [0, L]. Derivatives are optional and only needed
// by the surface-term and variational routines. max_wavenumber sets the
// quadrature resolution.
struct WaveFunction {
    double length = 1.0;
    Fn value;
    Fn d1;
    Fn d2;
    double max_wavenumber = 0.0;
};

struct WaveFunctionSample {
    std::vector<double> grid;
    std::vector<cd> values;
};

WaveFunction from_mode(const Mode& mode);
WaveFunction from_adjoint_mode(const Mode& mode);
WaveFunction from_callable(double length, Fn value, double max_wavenumber = 0.0);
WaveFunctionSample sample(const WaveFunction& f, const std::vector<double>& grid);
void validate(const WaveFunctionSample& s, double length);

cd canonical_inner(const WaveFunction& phi, const WaveFunction& psi);
cd canonical_inner(const WaveFunctionSample& phi, const WaveFunctionSample& psi);

cd pt_inner(const WaveFunction& phi, const WaveFunction& psi);
cd pt_inner(const WaveFunctionSample& phi, const WaveFunctionSample& psi);

// [phi*(L-x) psi'(x) + phi'*(L-x) psi(x)] evaluated between 0 and L.
cd pt_surface_term(const WaveFunction& phi, const WaveFunction& psi);

// (phi, h psi)_PT - (h phi, psi)_PT with h = -(1/2) d^2/dx^2, by quadrature.
// Equals -(1/2) * pt_surface_term.
cd pt_selfadjoint_residual(const BoxConfig& config, const WaveFunction& phi, const WaveFunction& psi);

std::vector<double> catastrophe_levels(const BoxConfig& config, int n_max);

// Truncated spectral sum C(x, x') = sum_n sigma_n psi_n(x) psi_n(x'), with
// sigma_n the PT eigenvalue of mode n ((-1)^{n+1} for ell1 = 0).
class CKernel {
public:
    explicit CKernel(const Spectrum& spectrum, int n_terms = 24);

    cd operator()(double x, double xp) const;
    // Integral of C(x, y) psi(y) dy.
    cd apply(const WaveFunction& psi, double x) const;

    int n_terms() const { return static_cast<int>(modes_.size()); }
    double length() const { return length_; }
    double max_wavenumber() const { return max_k_; }
    const std::vector<Mode>& modes() const { return modes_; }

private:
    std::vector<Mode> modes_;
    double length_;
    double max_k_;
};

cd c_kernel(double x, double xp, const CKernel& kernel);

// Integral of psi(x) C(x, x') phi*(L - x') over the square, tensor-product GL.
cd cpt_inner(const WaveFunction& phi, const WaveFunction& psi, const CKernel& kernel);

enum class GramKind { biorthogonal, canonical, pt, cpt };

// G(n, m) = <mode n, mode m> for the first `size` modes.
Eigen::MatrixXcd gram_matrix(const Spectrum& spectrum, int size, GramKind kind, int n_terms = 24);

}  // namespace ptbox::inner
