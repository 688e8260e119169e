#include "ptbox/roots.hpp"

#include "ptbox/error.hpp"
#include "ptbox/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace ptbox::roots {

namespace {

constexpr cd I{0.0, 1.0};

struct Integrator {
    const AnalyticFn& f;
    const AnalyticFn& df;
    const ContourOptions& opt;
    const quad::Rule& gl = quad::gauss_legendre(32);

    // GL32 estimate of the two moments along a -> b.
    std::array<cd, 2> panel(cd a, cd b) const {
        const cd half = 0.5 * (b - a);
        const cd mid = 0.5 * (a + b);
        std::array<cd, 2> sum{};
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
            const cd z = mid + half * gl.nodes[i];
            const cd fz = f(z);
            const cd dfz = df(z);
            if (std::abs(fz) <= opt.zero_distance * std::abs(dfz) || fz == 0.0) {
                std::ostringstream os;
                os << "contour passes within " << opt.zero_distance << " of a zero near " << z;
                fail(Errc::contour_on_zero, os.str());
            }
            const cd g = dfz / fz * gl.weights[i];
            sum[0] += g;
            sum[1] += z * g;
        }
        sum[0] *= half;
        sum[1] *= half;
        return sum;
    }

    std::array<cd, 2> adaptive(cd a, cd b, const std::array<cd, 2>& whole, int depth) const {
        const cd m = 0.5 * (a + b);
        const auto left = panel(a, m);
        const auto right = panel(m, b);
        const cd refined0 = left[0] + right[0];
        const cd refined1 = left[1] + right[1];
        const double err = std::abs(refined0 - whole[0]);
        const double scale = std::max(1.0, std::abs(a) + std::abs(b));
        if (err <= 1e-10 + 1e-12 * std::abs(refined0) &&
            std::abs(refined1 - whole[1]) <= (1e-10 + 1e-12 * std::abs(refined1)) * scale)
            return {refined0, refined1};
        if (depth >= opt.max_depth || std::abs(b - a) < opt.zero_distance) {
            std::ostringstream os;
            os << "contour integral failed to resolve near " << m;
            fail(Errc::contour_on_zero, os.str());
        }
        const auto l = adaptive(a, m, left, depth + 1);
        const auto r = adaptive(m, b, right, depth + 1);
        return {l[0] + r[0], l[1] + r[1]};
    }

    std::array<cd, 2> edge(cd a, cd b) const { return adaptive(a, b, panel(a, b), 0); }
};

double diameter(const Rect& r) { return std::max(r.re_max - r.re_min, r.im_max - r.im_min); }

// Split fractions slightly off the midpoint so cuts avoid symmetry lines
// (notably the real axis) where zeros tend to sit.
constexpr std::array<double, 6> kSplitFractions{0.5371, 0.4629, 0.5813, 0.4187, 0.6277, 0.3723};

void subdivide(const AnalyticFn& f, const AnalyticFn& df, const Rect& r, int count, cd first,
               const ContourOptions& opt, int depth, std::vector<Zero>& out) {
    if (count <= 0) return;
    if (count == 1) {
        cd z = first;
        const double slack = 1e-12 * std::max(1.0, std::abs(z));
        if (newton_polish(f, df, z, opt) && contains(r, z, slack)) {
            out.push_back({z, 1});
            return;
        }
    }
    if (diameter(r) < opt.min_size || depth >= opt.max_depth) {
        cd z = first / static_cast<double>(count);
        newton_polish(f, df, z, opt);
        out.push_back({z, count});
        return;
    }
    const bool split_re = (r.re_max - r.re_min) >= (r.im_max - r.im_min);
    for (double frac : kSplitFractions) {
        Rect a = r;
        Rect b = r;
        if (split_re) {
            const double cut = r.re_min + frac * (r.re_max - r.re_min);
            a.re_max = cut;
            b.re_min = cut;
        } else {
            const double cut = r.im_min + frac * (r.im_max - r.im_min);
            a.im_max = cut;
            b.im_min = cut;
        }
        ContourMoments ma, mb;
        try {
            ma = contour_moments(f, df, a, opt);
            mb = contour_moments(f, df, b, opt);
        } catch (const Error& e) {
            if (e.code() == Errc::contour_on_zero) continue;
            throw;
        }
        const int ca = static_cast<int>(std::lround(ma.count.real()));
        const int cb = static_cast<int>(std::lround(mb.count.real()));
        if (ca + cb != count) continue;
        subdivide(f, df, a, ca, ma.first, opt, depth + 1, out);
        subdivide(f, df, b, cb, mb.first, opt, depth + 1, out);
        return;
    }
    fail(Errc::no_convergence, "find_zeros: could not split a cell consistently");
}

}  // namespace

void validate(const Rect& r) {
    for (double v : {r.re_min, r.re_max, r.im_min, r.im_max})
        if (!std::isfinite(v)) throw std::invalid_argument("region must be bounded");
    if (!(r.re_max > r.re_min) || !(r.im_max > r.im_min))
        throw std::invalid_argument("region must have positive width and height");
}

bool contains(const Rect& r, cd z, double slack) {
    return z.real() >= r.re_min - slack && z.real() <= r.re_max + slack && z.imag() >= r.im_min - slack &&
           z.imag() <= r.im_max + slack;
}

ContourMoments contour_moments(const AnalyticFn& f, const AnalyticFn& df, const Rect& r,
                               const ContourOptions& opt) {
    validate(r);
    const Integrator integ{f, df, opt};
    const std::array<cd, 4> corners{cd(r.re_min, r.im_min), cd(r.re_max, r.im_min), cd(r.re_max, r.im_max),
                                    cd(r.re_min, r.im_max)};
    cd m0{}, m1{};
    for (int e = 0; e < 4; ++e) {
        const auto part = integ.edge(corners[e], corners[(e + 1) % 4]);
        m0 += part[0];
        m1 += part[1];
    }
    const cd denom = 2.0 * std::numbers::pi * I;
    ContourMoments m{m0 / denom, m1 / denom};
    const double frac = std::abs(m.count.real() - std::round(m.count.real()));
    if (frac > 0.05 || std::abs(m.count.imag()) > 0.05) {
        std::ostringstream os;
        os << "winding integral not near an integer: " << m.count;
        fail(Errc::no_convergence, os.str());
    }
    return m;
}

int winding_number(const AnalyticFn& f, const AnalyticFn& df, const Rect& r, const ContourOptions& opt) {
    return static_cast<int>(std::lround(contour_moments(f, df, r, opt).count.real()));
}

std::vector<Zero> find_zeros(const AnalyticFn& f, const AnalyticFn& df, const Rect& r, const ContourOptions& opt) {
    const auto m = contour_moments(f, df, r, opt);
    const int count = static_cast<int>(std::lround(m.count.real()));
    if (count < 0) fail(Errc::no_convergence, "find_zeros: negative winding (function has poles in region)");
    std::vector<Zero> out;
    subdivide(f, df, r, count, m.first, opt, 0, out);
    std::sort(out.begin(), out.end(), [](const Zero& a, const Zero& b) {
        if (a.z.real() != b.z.real()) return a.z.real() < b.z.real();
        return a.z.imag() < b.z.imag();
    });
    return out;
}

bool newton_polish(const AnalyticFn& f, const AnalyticFn& df, cd& z, const ContourOptions& opt) {
    for (int it = 0; it < opt.max_newton; ++it) {
        const cd fz = f(z);
        if (fz == 0.0) return true;
        const cd d = df(z);
        if (d == 0.0 || !std::isfinite(std::abs(d))) return false;
        const cd step = fz / d;
        z -= step;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        if (std::abs(step) <= opt.newton_tol * std::max(1.0, std::abs(z))) return true;
    }
    // Accept a stagnated iterate if the last correction is already tiny.
    const cd d = df(z);
    return d != 0.0 && std::abs(f(z) / d) <= 1e-12 * std::max(1.0, std::abs(z));
}

AnalyticFn numeric_derivative(AnalyticFn f, double h) {
    return [f = std::move(f), h](cd z) {
        const double step = h * std::max(1.0, std::abs(z));
        return (f(z + step) - f(z - step)) / (2.0 * step);
    };
}

}  // namespace ptbox::roots
