#include "ptbox/kernel_maps.hpp"

#include "ptbox/error.hpp"
#include "ptbox/quadrature.hpp"
#include "ptbox/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

namespace ptbox::kernel {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cd I{0.0, 1.0};

void check_box(double length, double ell2) {
    if (!std::isfinite(length) || !(length > 0.0)) throw std::invalid_argument("length must be finite and > 0");
    if (!std::isfinite(ell2) || ell2 == 0.0) throw std::invalid_argument("ell2 must be finite and nonzero");
}

void check_terms(int terms) {
    if (terms < 1) throw std::invalid_argument("truncation must be >= 1");
}

void check_open(double x, double length, const char* name) {
    if (!std::isfinite(x) || !(x > 0.0) || !(x < length)) {
        std::ostringstream os;
        os << name << " = " << x << " outside (0, " << length << ")";
        fail(Errc::out_of_domain, os.str());
    }
}

void check_closed(double x, double length) {
    if (!std::isfinite(x) || x < 0.0 || x > length) {
        std::ostringstream os;
        os << "x = " << x << " outside [0, " << length << "]";
        fail(Errc::out_of_domain, os.str());
    }
}

double sign(double v) { return v < 0.0 ? -1.0 : 1.0; }

// 1 - u_n^2 with the catastrophe guard.
double gap(int n, double length, double ell2) {
    const double u = kPi * n * ell2 / length;
    const double g = 1.0 - u * u;
    if (std::abs(g) < 1e-10) {
        std::ostringstream os;
        os << "mode n = " << n << " has zero norm at ell2 = " << ell2;
        fail(Errc::catastrophe_point, os.str());
    }
    return g;
}

// Coefficients of sin(kx) sin(kx') and i sin(kx') cos(kx) in K2, without the 2/L.
struct K2Coeff {
    double c;
    double d;
};

K2Coeff k2_coeff(int n, double length, double ell2) {
    const double u = kPi * n * ell2 / length;
    const double root = std::sqrt(std::abs(gap(n, length, ell2)));
    return {1.0 / root - 1.0 / std::abs(u), u / root - sign(ell2)};
}

// Hann weights over the partial sums m in (terms/2, terms], normalized to 1.
// A smooth mean converges much faster than a flat average for sums such as
// sum sin(n theta).
std::vector<double> partial_sum_weights(int terms) {
    const int first = terms / 2 + 1;
    const int count = terms - first + 1;
    std::vector<double> w(terms + 1, 0.0);
    double total = 0.0;
    for (int m = first; m <= terms; ++m) {
        const double s = std::sin(kPi * (m - first + 1) / (count + 1));
        w[m] = s * s;
        total += w[m];
    }
    for (double& v : w) v /= total;
    return w;
}

std::vector<double> uniform_grid(double length, int points) {
    if (points < 2) throw std::invalid_argument("grid needs at least 2 points");
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i) g[i] = length * i / (points - 1);
    return g;
}

}  // namespace

double textbook_mode(int n, double x, double length) {
    if (n < 1) throw std::invalid_argument("textbook mode index must be >= 1");
    if (!(length > 0.0)) throw std::invalid_argument("length must be > 0");
    check_closed(x, length);
    return std::sqrt(2.0 / length) * std::sin(kPi * n * x / length);
}

cd box_mode(int n, double x, double length, double ell2) {
    check_box(length, ell2);
    if (n < 1) throw std::invalid_argument("mode index must be >= 1");
    check_closed(x, length);
    const double k = kPi * n / length;
    const double u = k * ell2;
    const double scale = std::sqrt(2.0 / length / std::abs(gap(n, length, ell2)));
    return scale * cd(std::sin(k * x), u * std::cos(k * x));
}

cd box_adjoint_conj(int n, double x, double length, double ell2) {
    return sign(gap(n, length, ell2)) * box_mode(n, x, length, ell2);
}

cd k1_closed(double x, double xp, double length, double ell2) {
    check_box(length, ell2);
    check_open(x, length, "x");
    check_open(xp, length, "x'");
    if (std::abs(x - xp) < 1e-9) fail(Errc::coincident_points, "K1 diverges at x = x'");
    const double a = kPi * (xp - x) / (2.0 * length);
    const double b = kPi * (xp + x) / (2.0 * length);
    const double im = sign(ell2) / (2.0 * length) * (1.0 / std::tan(a) + 1.0 / std::tan(b));
    const double re = std::log(std::abs(std::sin(b) / std::sin(a))) / (kPi * std::abs(ell2));
    return {re, im};
}

cd k1_direct_sum(double x, double xp, double length, double ell2, int terms) {
    check_box(length, ell2);
    check_terms(terms);
    check_closed(x, length);
    check_closed(xp, length);
    const std::vector<double> w = partial_sum_weights(terms);
    double re = 0.0, im = 0.0, mean_re = 0.0, mean_im = 0.0;
    for (int n = 1; n <= terms; ++n) {
        const double k = kPi * n / length;
        const double sp = std::sin(k * xp);
        re += length / (kPi * std::abs(ell2) * n) * std::sin(k * x) * sp;
        im += sign(ell2) * sp * std::cos(k * x);
        mean_re += w[n] * re;
        mean_im += w[n] * im;
    }
    return 2.0 / length * cd(mean_re, mean_im);
}

cd k2_truncated(double x, double xp, double length, double ell2, int terms) {
    check_box(length, ell2);
    check_terms(terms);
    check_closed(x, length);
    check_closed(xp, length);
    double re = 0.0, im = 0.0;
    for (int n = 1; n <= terms; ++n) {
        const double k = kPi * n / length;
        const K2Coeff c = k2_coeff(n, length, ell2);
        const double sp = std::sin(k * xp);
        re += c.c * std::sin(k * x) * sp;
        im += c.d * sp * std::cos(k * x);
    }
    return 2.0 / length * cd(re, im);
}

KernelEvaluation kernel_K(double x, double xp, double length, double ell2, int terms, Method method) {
    check_terms(terms);
    KernelEvaluation out{x, xp, {}, terms, method};
    if (method == Method::split) {
        out.value = k1_closed(x, xp, length, ell2) + k2_truncated(x, xp, length, ell2, terms);
        return out;
    }
    check_box(length, ell2);
    check_closed(x, length);
    check_closed(xp, length);
    const std::vector<double> w = partial_sum_weights(terms);
    cd partial{}, mean{};
    for (int n = 1; n <= terms; ++n) {
        partial += box_mode(n, x, length, ell2) * textbook_mode(n, xp, length);
        mean += w[n] * partial;
    }
    out.value = mean;
    return out;
}

cd kernel_M(double x, double xp, double length, double ell2, int terms) {
    check_terms(terms);
    cd sum{};
    for (int n = 1; n <= terms; ++n) sum += textbook_mode(n, x, length) * box_adjoint_conj(n, xp, length, ell2);
    return sum;
}

double k2_bound(double length, double ell2, int n_tail) {
    check_box(length, ell2);
    check_terms(n_tail);
    const double step = kPi * std::abs(ell2) / length;  // u_n = step * n
    int n_max = std::max(n_tail, static_cast<int>(std::ceil(2.0 / step)) + 1);
    double sum = 0.0;
    for (int n = 1; n <= n_max; ++n) {
        const K2Coeff c = k2_coeff(n, length, ell2);
        sum += std::abs(c.c) + std::abs(c.d);
    }
    // For u >= u_N > 1: sqrt(u^2 - 1) >= g u with g = sqrt(1 - 1/u_N^2), so
    // d <= 1/(g (1 + g) u^2) and c <= d / u_N; sum_{n>N} 1/n^2 <= 1/N.
    const double u_n = step * n_max;
    const double g = std::sqrt(1.0 - 1.0 / (u_n * u_n));
    const double tail = (1.0 + 1.0 / u_n) / (g * (1.0 + g)) / (step * step) / n_max;
    return 2.0 / length * (sum + tail);
}

NonlocalityReport nonlocality_report(double length, double ell2, int max_level) {
    check_box(length, ell2);
    if (max_level < 1) throw std::invalid_argument("max_level must be >= 1");
    NonlocalityReport rep;
    rep.k2_bound = k2_bound(length, ell2);
    for (int j = 1; j <= max_level; ++j) {
        const double h = length / std::ldexp(1.0, j);
        if (h < 1e-9) break;
        const double x = 0.5 * (length - h), xp = 0.5 * (length + h);
        const cd k1 = k1_closed(x, xp, length, ell2);
        if (std::abs(k1) >= 10.0 * rep.k2_bound) {
            rep.found = true;
            rep.x = x;
            rep.xp = xp;
            rep.k1 = k1;
            rep.margin = std::abs(k1) / rep.k2_bound;
            rep.lower_bound = std::abs(k1) - rep.k2_bound;
            rep.level = j;
            break;
        }
    }
    return rep;
}

namespace {

// Applies M_N to a function sampled on the quadrature nodes.
void apply_M(const quad::Rule& rule, const std::vector<cd>& h, double length, double ell2, int terms,
             const std::vector<double>& grid, std::vector<cd>& out) {
    out.assign(grid.size(), cd{});
    for (int m = 1; m <= terms; ++m) {
        cd dm{};
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
            dm += rule.weights[i] * box_adjoint_conj(m, rule.nodes[i], length, ell2) * h[i];
        for (std::size_t g = 0; g < grid.size(); ++g) out[g] += textbook_mode(m, grid[g], length) * dm;
    }
}

}  // namespace

double left_inverse_residual(double length, double ell2, int terms, int grid_points) {
    check_box(length, ell2);
    check_terms(terms);
    auto g = [length](double x) { return x * (length - x) * std::exp(x / length); };
    const quad::Rule rule = quad::composite(0.0, length, kPi * (terms + 1) / length);
    // K_N g on the nodes.
    std::vector<cd> h(rule.nodes.size());
    for (int n = 1; n <= terms; ++n) {
        double cn = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
            cn += rule.weights[i] * textbook_mode(n, rule.nodes[i], length) * g(rule.nodes[i]);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) h[i] += box_mode(n, rule.nodes[i], length, ell2) * cn;
    }
    const std::vector<double> grid = uniform_grid(length, grid_points);
    std::vector<cd> out;
    apply_M(rule, h, length, ell2, terms, grid, out);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) worst = std::max(worst, std::abs(out[i] - g(grid[i])));
    return worst;
}

double modal_action_residual(double length, double ell2, int terms, int n, int grid_points) {
    check_box(length, ell2);
    check_terms(terms);
    if (n < 1) throw std::invalid_argument("mode index must be >= 1");
    const quad::Rule rule = quad::composite(0.0, length, kPi * (std::max(terms, n) + 1) / length);
    std::vector<cd> h(rule.nodes.size());
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) h[i] = box_mode(n, rule.nodes[i], length, ell2);
    const std::vector<double> grid = uniform_grid(length, grid_points);
    std::vector<cd> out;
    apply_M(rule, h, length, ell2, terms, grid, out);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        worst = std::max(worst, std::abs(out[i] - textbook_mode(n, grid[i], length)));
    return worst;
}

double bicompleteness_residual(double length, double ell2, int terms, const std::function<cd(double)>& f,
                               int grid_points) {
    check_box(length, ell2);
    check_terms(terms);
    const BoxConfig config{length, {0.0, ell2}};
    const Spectrum sp = closed_form_modes(config, terms);
    std::vector<Mode> modes = sp.modes;
    modes.insert(modes.end(), sp.unidirectional.begin(), sp.unidirectional.end());
    double kmax = 0.0;
    for (const auto& m : modes) kmax = std::max(kmax, std::abs(m.k));
    const quad::Rule rule = quad::composite(0.0, length, kmax + kPi / length);
    std::vector<cd> fv(rule.nodes.size());
    for (std::size_t i = 0; i < fv.size(); ++i) fv[i] = f(rule.nodes[i]);
    const std::vector<double> grid = uniform_grid(length, grid_points);
    std::vector<cd> out(grid.size());
    for (const auto& m : modes) {
        cd coeff{};
        for (std::size_t i = 0; i < fv.size(); ++i)
            coeff += rule.weights[i] * std::conj(adjoint_eigenfunction_eval(m, rule.nodes[i])) * fv[i];
        for (std::size_t g = 0; g < grid.size(); ++g) out[g] += eigenfunction_eval(m, grid[g]) * coeff;
    }
    double worst = 0.0;
    for (std::size_t g = 0; g < grid.size(); ++g) worst = std::max(worst, std::abs(out[g] - f(grid[g])));
    return worst;
}

std::vector<KernelEvaluation> kernel_grid(double length, double ell2, const std::vector<double>& grid, int terms,
                                          Method method, int jobs) {
    check_box(length, ell2);
    std::vector<std::pair<double, double>> pairs;
    for (double x : grid)
        for (double xp : grid) {
            if (method == Method::split && std::abs(x - xp) < 1e-9) continue;
            pairs.emplace_back(x, xp);
        }
    std::vector<KernelEvaluation> out(pairs.size());
    const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(pairs.size())));
    std::vector<std::exception_ptr> errors(workers);
    auto work = [&](int w) {
        try {
            for (std::size_t i = w; i < pairs.size(); i += workers)
                out[i] = kernel_K(pairs[i].first, pairs[i].second, length, ell2, terms, method);
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace ptbox::kernel
