#pragma once

#include <algorithm>
#include <complex>
#include <vector>

namespace ptbox::quad {

struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre rule on [-1, 1]. Rules are cached; the reference stays valid.
const Rule& gauss_legendre(int n);

// Composite rule on [a, b] with `points` GL nodes per panel and enough panels
// that each panel spans at most one wavelength of max_wavenumber.
Rule composite(double a, double b, double max_wavenumber, int points = 64, int min_panels = 1);

inline constexpr int kNodesPerWavelength = 64;

template <class F>
auto integrate(const Rule& rule, F&& f) -> decltype(f(0.0)) {
    decltype(f(0.0)) sum{};
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(rule.nodes[i]);
    return sum;
}

int panel_count(double a, double b, double max_wavenumber);

// Composite GL integration, doubling the panel count until two successive
// estimates agree to rel_tol relative to the integral of |f|.
template <class F>
auto integrate_adaptive(F&& f, double a, double b, double max_wavenumber, double rel_tol = 1e-12,
                        int max_doublings = 5) -> decltype(f(0.0)) {
    using T = decltype(f(0.0));
    auto run = [&](int panels, double& magnitude) {
        const Rule r = composite(a, b, max_wavenumber, kNodesPerWavelength, panels);
        T sum{};
        magnitude = 0.0;
        for (std::size_t i = 0; i < r.nodes.size(); ++i) {
            const T v = f(r.nodes[i]);
            sum += r.weights[i] * v;
            magnitude += r.weights[i] * std::abs(v);
        }
        return sum;
    };
    int panels = panel_count(a, b, max_wavenumber);
    double mag = 0.0;
    T prev = run(panels, mag);
    for (int i = 0; i < max_doublings; ++i) {
        panels *= 2;
        T next = run(panels, mag);
        if (std::abs(next - prev) <= rel_tol * std::max(mag, 1e-300)) return next;
        prev = next;
    }
    return prev;
}

// Trapezoid rule on an arbitrary increasing grid.
std::complex<double> trapezoid(const std::vector<double>& grid, const std::vector<std::complex<double>>& values);

}  // namespace ptbox::quad
