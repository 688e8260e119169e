#include "ptbox/inner_products.hpp"

#include "ptbox/error.hpp"
#include "ptbox/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

namespace ptbox::inner {

namespace {

constexpr double kRelTol = 1e-12;

void check_lengths(const WaveFunction& a, const WaveFunction& b) {
    if (!a.value || !b.value) throw std::invalid_argument("wave function has no value callable");
    if (std::abs(a.length - b.length) > 1e-14 * std::max(a.length, b.length))
        fail(Errc::grid_mismatch, "wave functions defined on different intervals");
}

void check_same_grid(const WaveFunctionSample& a, const WaveFunctionSample& b) {
    if (a.grid.size() != b.grid.size()) fail(Errc::grid_mismatch, "sampled inputs have different grid sizes");
    for (std::size_t i = 0; i < a.grid.size(); ++i)
        if (std::abs(a.grid[i] - b.grid[i]) > 1e-14 * std::max(1.0, std::abs(a.grid[i])))
            fail(Errc::grid_mismatch, "sampled inputs use different grid points");
}

double sample_length(const WaveFunctionSample& s) {
    if (s.grid.empty()) throw std::invalid_argument("empty sample grid");
    return s.grid.back();
}

}  // namespace

WaveFunction from_mode(const Mode& mode) {
    WaveFunction w;
    w.length = mode.length;
    w.value = [mode](double x) { return eigenfunction_eval(mode, x); };
    w.d1 = [mode](double x) { return eigenfunction_derivative(mode, x, 1); };
    w.d2 = [mode](double x) { return eigenfunction_derivative(mode, x, 2); };
    w.max_wavenumber = std::abs(mode.k);
    return w;
}

WaveFunction from_adjoint_mode(const Mode& mode) {
    WaveFunction w;
    w.length = mode.length;
    w.value = [mode](double x) { return adjoint_eigenfunction_eval(mode, x); };
    w.d1 = [mode](double x) { return adjoint_eigenfunction_derivative(mode, x, 1); };
    w.d2 = [mode](double x) { return adjoint_eigenfunction_derivative(mode, x, 2); };
    w.max_wavenumber = std::abs(mode.k);
    return w;
}

WaveFunction from_callable(double length, Fn value, double max_wavenumber) {
    if (!(length > 0.0)) throw std::invalid_argument("length must be > 0");
    WaveFunction w;
    w.length = length;
    w.value = std::move(value);
    w.max_wavenumber = max_wavenumber;
    return w;
}

WaveFunctionSample sample(const WaveFunction& f, const std::vector<double>& grid) {
    WaveFunctionSample s;
    s.grid = grid;
    s.values.reserve(grid.size());
    for (double x : grid) s.values.push_back(f.value(x));
    validate(s, f.length);
    return s;
}

void validate(const WaveFunctionSample& s, double length) {
    if (s.grid.size() < 2 || s.grid.size() != s.values.size())
        fail(Errc::grid_mismatch, "sample needs >= 2 points and matching value count");
    for (std::size_t i = 1; i < s.grid.size(); ++i)
        if (!(s.grid[i] > s.grid[i - 1])) fail(Errc::grid_mismatch, "sample grid must be strictly increasing");
    if (s.grid.front() != 0.0 || std::abs(s.grid.back() - length) > 1e-14 * length)
        fail(Errc::grid_mismatch, "sample grid must include the endpoints 0 and L");
}

cd canonical_inner(const WaveFunction& phi, const WaveFunction& psi) {
    check_lengths(phi, psi);
    auto f = [&](double x) { return std::conj(phi.value(x)) * psi.value(x); };
    return quad::integrate_adaptive(f, 0.0, psi.length, phi.max_wavenumber + psi.max_wavenumber, kRelTol);
}

cd canonical_inner(const WaveFunctionSample& phi, const WaveFunctionSample& psi) {
    check_same_grid(phi, psi);
    validate(phi, sample_length(phi));
    std::vector<cd> v(phi.grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::conj(phi.values[i]) * psi.values[i];
    return quad::trapezoid(phi.grid, v);
}

cd pt_inner(const WaveFunction& phi, const WaveFunction& psi) {
    check_lengths(phi, psi);
    const double L = psi.length;
    auto f = [&](double x) { return std::conj(phi.value(L - x)) * psi.value(x); };
    return quad::integrate_adaptive(f, 0.0, L, phi.max_wavenumber + psi.max_wavenumber, kRelTol);
}

cd pt_inner(const WaveFunctionSample& phi, const WaveFunctionSample& psi) {
    check_same_grid(phi, psi);
    const double L = sample_length(phi);
    validate(phi, L);
    const std::size_t n = phi.grid.size();
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(phi.grid[i] + phi.grid[n - 1 - i] - L) > 1e-12 * L)
            fail(Errc::grid_mismatch, "PT inner product of samples needs a grid symmetric under x -> L - x");
    std::vector<cd> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = std::conj(phi.values[n - 1 - i]) * psi.values[i];
    return quad::trapezoid(phi.grid, v);
}

cd pt_surface_term(const WaveFunction& phi, const WaveFunction& psi) {
    check_lengths(phi, psi);
    if (!phi.d1 || !psi.d1) throw std::invalid_argument("surface term needs first derivatives");
    const double L = psi.length;
    auto bracket = [&](double x) {
        return std::conj(phi.value(L - x)) * psi.d1(x) + std::conj(phi.d1(L - x)) * psi.value(x);
    };
    return bracket(L) - bracket(0.0);
}

cd pt_selfadjoint_residual(const BoxConfig& config, const WaveFunction& phi, const WaveFunction& psi) {
    validate(config);
    check_lengths(phi, psi);
    if (std::abs(psi.length - config.length) > 1e-14 * config.length)
        fail(Errc::grid_mismatch, "wave functions not defined on the box interval");
    if (!phi.d2 || !psi.d2) throw std::invalid_argument("self-adjointness residual needs second derivatives");
    const double L = config.length;
    auto f = [&](double x) {
        const cd lhs = std::conj(phi.value(L - x)) * (-0.5 * psi.d2(x));
        const cd rhs = std::conj(-0.5 * phi.d2(L - x)) * psi.value(x);
        return lhs - rhs;
    };
    return quad::integrate_adaptive(f, 0.0, L, phi.max_wavenumber + psi.max_wavenumber, kRelTol);
}

std::vector<double> catastrophe_levels(const BoxConfig& config, int n_max) {
    validate(config);
    if (config.boundary.ell1 != 0.0) throw std::invalid_argument("catastrophe_levels requires ell1 = 0");
    if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
    std::vector<double> out;
    for (int n = 1; n <= n_max; ++n) out.push_back(config.length / (std::numbers::pi * n));
    return out;
}

CKernel::CKernel(const Spectrum& spectrum, int n_terms) : length_(spectrum.config.length), max_k_(0.0) {
    if (!spectrum.normalized)
        fail(Errc::catastrophe_point, "C kernel needs a biorthogonally normalized spectrum");
    if (n_terms < 1 || n_terms > static_cast<int>(spectrum.modes.size()))
        throw std::invalid_argument("n_terms must be between 1 and the number of available modes");
    modes_.assign(spectrum.modes.begin(), spectrum.modes.begin() + n_terms);
    for (const auto& m : modes_) {
        if (!m.pt_eigenvalue) fail(Errc::broken_pt, "C kernel needs PT-symmetric modes");
        max_k_ = std::max(max_k_, std::abs(m.k));
    }
}

cd CKernel::operator()(double x, double xp) const {
    cd sum{};
    for (const auto& m : modes_)
        sum += static_cast<double>(*m.pt_eigenvalue) * eigenfunction_eval(m, x) * eigenfunction_eval(m, xp);
    return sum;
}

cd CKernel::apply(const WaveFunction& psi, double x) const {
    cd sum{};
    for (const auto& m : modes_) {
        auto f = [&](double y) { return eigenfunction_eval(m, y) * psi.value(y); };
        const cd c = quad::integrate_adaptive(f, 0.0, length_, std::abs(m.k) + psi.max_wavenumber, kRelTol);
        sum += static_cast<double>(*m.pt_eigenvalue) * eigenfunction_eval(m, x) * c;
    }
    return sum;
}

cd c_kernel(double x, double xp, const CKernel& kernel) { return kernel(x, xp); }

cd cpt_inner(const WaveFunction& phi, const WaveFunction& psi, const CKernel& kernel) {
    check_lengths(phi, psi);
    if (std::abs(psi.length - kernel.length()) > 1e-14 * kernel.length())
        fail(Errc::grid_mismatch, "wave functions not defined on the kernel interval");
    const double L = kernel.length();
    // The kernel is a finite sum of separable terms, so the tensor-product rule
    // factorizes into one-dimensional sums per mode.
    const double kmax = kernel.max_wavenumber() + std::max(phi.max_wavenumber, psi.max_wavenumber);
    const quad::Rule rule = quad::composite(0.0, L, kmax, quad::kNodesPerWavelength, 2);
    const std::size_t m = rule.nodes.size();
    std::vector<cd> psi_w(m), phi_w(m);
    for (std::size_t i = 0; i < m; ++i) {
        psi_w[i] = rule.weights[i] * psi.value(rule.nodes[i]);
        phi_w[i] = rule.weights[i] * std::conj(phi.value(L - rule.nodes[i]));
    }
    cd total{};
    for (const auto& mode : kernel.modes()) {
        cd left{}, right{};
        for (std::size_t i = 0; i < m; ++i) {
            const cd v = eigenfunction_eval(mode, rule.nodes[i]);
            left += psi_w[i] * v;
            right += phi_w[i] * v;
        }
        total += static_cast<double>(*mode.pt_eigenvalue) * left * right;
    }
    return total;
}

Eigen::MatrixXcd gram_matrix(const Spectrum& spectrum, int size, GramKind kind, int n_terms) {
    if (size < 1 || size > static_cast<int>(spectrum.modes.size()))
        throw std::invalid_argument("gram size must be between 1 and the number of modes");
    std::vector<WaveFunction> psi, phi;
    for (int i = 0; i < size; ++i) {
        psi.push_back(from_mode(spectrum.modes[i]));
        phi.push_back(from_adjoint_mode(spectrum.modes[i]));
    }
    std::optional<CKernel> kernel;
    if (kind == GramKind::cpt) kernel.emplace(spectrum, std::min<int>(n_terms, spectrum.modes.size()));
    Eigen::MatrixXcd g(size, size);
    for (int n = 0; n < size; ++n) {
        for (int m = 0; m < size; ++m) {
            switch (kind) {
                case GramKind::biorthogonal: g(n, m) = canonical_inner(phi[n], psi[m]); break;
                case GramKind::canonical: g(n, m) = canonical_inner(psi[n], psi[m]); break;
                case GramKind::pt: g(n, m) = pt_inner(psi[n], psi[m]); break;
                case GramKind::cpt: g(n, m) = cpt_inner(psi[n], psi[m], *kernel); break;
            }
        }
    }
    return g;
}

}  // namespace ptbox::inner
