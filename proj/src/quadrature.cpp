#include "ptbox/quadrature.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace ptbox::quad {

namespace {

Rule build_gauss_legendre(int n) {
    // legendre_p_zeros returns the non-negative zeros in increasing order.
    const auto positive = boost::math::legendre_p_zeros<double>(n);
    Rule r;
    r.nodes.reserve(n);
    r.weights.reserve(n);
    auto weight = [n](double x) {
        const double dp = boost::math::legendre_p_prime(n, x);
        return 2.0 / ((1.0 - x * x) * dp * dp);
    };
    for (auto it = positive.rbegin(); it != positive.rend(); ++it) {
        if (*it == 0.0) continue;
        r.nodes.push_back(-*it);
        r.weights.push_back(weight(*it));
    }
    for (double x : positive) {
        r.nodes.push_back(x);
        r.weights.push_back(weight(x));
    }
    return r;
}

}  // namespace

const Rule& gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
    static std::mutex mutex;
    static std::map<int, Rule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_gauss_legendre(n)).first;
    return it->second;
}

int panel_count(double a, double b, double max_wavenumber) {
    const double wavelengths = std::abs(max_wavenumber) * std::abs(b - a) / (2.0 * std::numbers::pi);
    return std::max(1, static_cast<int>(std::ceil(wavelengths)));
}

Rule composite(double a, double b, double max_wavenumber, int points, int min_panels) {
    if (!(b > a)) throw std::invalid_argument("composite: need b > a");
    const int panels = std::max(min_panels, panel_count(a, b, max_wavenumber));
    const Rule& base = gauss_legendre(points);
    Rule r;
    r.nodes.reserve(static_cast<std::size_t>(panels) * points);
    r.weights.reserve(r.nodes.capacity());
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        const double mid = lo + 0.5 * h;
        for (int i = 0; i < points; ++i) {
            r.nodes.push_back(mid + 0.5 * h * base.nodes[i]);
            r.weights.push_back(0.5 * h * base.weights[i]);
        }
    }
    return r;
}

std::complex<double> trapezoid(const std::vector<double>& grid, const std::vector<std::complex<double>>& values) {
    if (grid.size() != values.size()) throw std::invalid_argument("trapezoid: size mismatch");
    std::complex<double> sum{};
    for (std::size_t i = 1; i < grid.size(); ++i) sum += 0.5 * (grid[i] - grid[i - 1]) * (values[i] + values[i - 1]);
    return sum;
}

}  // namespace ptbox::quad
