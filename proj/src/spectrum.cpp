#include "ptbox/spectrum.hpp"

#include "ptbox/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace ptbox {

namespace {

constexpr cd I{0.0, 1.0};
constexpr double kPi = std::numbers::pi;

double sum_squares(const BoxConfig& c) {
    return c.boundary.ell1 * c.boundary.ell1 + c.boundary.ell2 * c.boundary.ell2;
}

// Phase function Phi(k) = kL + arg D(k) on the positive real axis; roots of f
// sit at Phi = m pi. For ell1 = 0 arg D is a step of pi at k0 = 1/|ell2|.
struct PhaseFunction {
    double L, l1, l2, s;
    bool has_jump;
    double k0;

    explicit PhaseFunction(const BoxConfig& c)
        : L(c.length), l1(c.boundary.ell1), l2(c.boundary.ell2), s(sum_squares(c)),
          has_jump(c.boundary.ell1 == 0.0 && c.boundary.ell2 != 0.0),
          k0(has_jump ? 1.0 / std::abs(c.boundary.ell2) : 0.0) {}

    double operator()(double k) const {
        if (l1 == 0.0) return k * L + ((has_jump && k > k0) ? kPi : 0.0);
        return k * L + std::atan2(2.0 * k * l1, 1.0 - k * k * s);
    }

    double derivative(double k) const {
        if (l1 == 0.0) return L;
        const double re = 1.0 - k * k * s;
        const double im = 2.0 * k * l1;
        return L + 2.0 * l1 * (1.0 + k * k * s) / (re * re + im * im);
    }

    // Phi(a) < target <= Phi(b); Phi continuous and increasing on [a, b].
    double solve(double a, double b, double target) const {
        double k = 0.5 * (a + b);
        for (int it = 0; it < 300; ++it) {
            const double v = (*this)(k)-target;
            if (v < 0.0)
                a = k;
            else
                b = k;
            double next = k - v / derivative(k);
            if (!(next > a && next < b)) next = 0.5 * (a + b);
            const bool done = std::abs(next - k) <= 2e-16 * next || (b - a) <= 4e-16 * b;
            k = next;
            if (done) break;
        }
        return k;
    }
};

cd coefficient_b(cd k, const PTBoundaryParams& p) { return 0.5 * I * (1.0 + k * p.ell2 - I * k * p.ell1); }
cd coefficient_a(cd k, const PTBoundaryParams& p) { return -0.5 * I * (1.0 - k * p.ell2 + I * k * p.ell1); }

void check_domain(const Mode& mode, double x) {
    const double slack = 1e-12 * mode.length;
    if (!(x >= -slack && x <= mode.length + slack)) {
        std::ostringstream os;
        os << "x = " << x << " outside [0, " << mode.length << "]";
        fail(Errc::out_of_domain, os.str());
    }
}

double catastrophe_measure(const Mode& mode, const BoxConfig& config, cd beta) {
    if (config.boundary.ell1 == 0.0 && mode.kind == ModeKind::standing) {
        const double kl = mode.k.real() * config.boundary.ell2;
        return std::abs(1.0 - kl * kl);
    }
    // Same scale as above: for ell1 = 0 standing modes 2 beta / L = 1 - k^2 ell2^2.
    return std::abs(2.0 * beta.real() / config.length);
}

}  // namespace

void validate(const BoxConfig& config) {
    if (!std::isfinite(config.length) || !(config.length > 0.0))
        throw std::invalid_argument("box length L must be finite and > 0");
    require_finite(config.boundary.ell1, "ell1");
    require_finite(config.boundary.ell2, "ell2");
}

cd quantization_residual(cd k, const BoxConfig& config) {
    const double l1 = config.boundary.ell1;
    const double s = sum_squares(config);
    const cd d = 1.0 + 2.0 * I * k * l1 - k * k * s;
    const cd n = 1.0 - 2.0 * I * k * l1 - k * k * s;
    return std::exp(2.0 * I * k * config.length) * d - n;
}

cd quantization_residual_derivative(cd k, const BoxConfig& config) {
    const double l1 = config.boundary.ell1;
    const double s = sum_squares(config);
    const double L = config.length;
    const cd e = std::exp(2.0 * I * k * L);
    const cd d = 1.0 + 2.0 * I * k * l1 - k * k * s;
    return 2.0 * I * L * e * d + e * (2.0 * I * l1 - 2.0 * k * s) - (-2.0 * I * l1 - 2.0 * k * s);
}

double residual_scale(cd k, const BoxConfig& config) {
    return std::max(1.0, std::norm(k) * sum_squares(config));
}

Mode make_mode(const BoxConfig& config, int n, cd k, ModeKind kind) {
    validate(config);
    Mode m;
    m.n = n;
    m.k = k;
    m.energy = 0.5 * k * k;
    m.kind = kind;
    m.length = config.length;
    cd a = coefficient_a(k, config.boundary);
    cd b = coefficient_b(k, config.boundary);
    if (kind != ModeKind::complex_pair) {
        // PT maps (A, B) to (conj(A) e^{-ikL}, conj(B) e^{ikL}); rotate the
        // phase so the mode is a PT eigenfunction with eigenvalue +-1.
        const double kr = k.real();
        const cd ea = std::conj(a) * std::exp(-I * kr * config.length);
        const cd eb = std::conj(b) * std::exp(I * kr * config.length);
        const cd tau = std::abs(a) >= std::abs(b) ? ea / a : eb / b;
        const int sigma = tau.real() >= 0.0 ? 1 : -1;
        const double alpha = 0.5 * std::arg(tau * static_cast<double>(sigma));
        const cd rot = std::exp(I * alpha);
        a *= rot;
        b *= rot;
        m.pt_eigenvalue = sigma;
    }
    m.coeff_a = a;
    m.coeff_b = b;
    return m;
}

cd self_overlap(const Mode& mode) {
    const cd k = mode.k;
    const double L = mode.length;
    const cd a = mode.coeff_a;
    const cd b = mode.coeff_b;
    const cd e = std::exp(2.0 * I * k * L);
    return a * a * (e - 1.0) / (2.0 * I * k) + b * b * (1.0 - 1.0 / e) / (2.0 * I * k) + 2.0 * a * b * L;
}

Mode with_unit_norm(const Mode& mode) {
    Mode m = mode;
    m.coeff_a /= mode.norm;
    m.coeff_b /= mode.norm;
    m.adjoint_norm /= mode.norm;
    m.norm = 1.0;
    return m;
}

Mode normalize_mode(Mode mode, const BoxConfig& config) {
    if (!mode.pt_eigenvalue) fail(Errc::broken_pt, "normalize_biorthogonal: mode has complex k");
    mode = with_unit_norm(mode);
    const cd beta = self_overlap(mode);
    if (catastrophe_measure(mode, config, beta) < kCatastropheTol) {
        std::ostringstream os;
        os << "mode n = " << mode.n << " (k = " << mode.k.real() << ") has vanishing PT norm at ell2 = "
           << config.boundary.ell2;
        fail(Errc::catastrophe_point, os.str());
    }
    const double b = beta.real();
    const double N = 1.0 / std::sqrt(std::abs(b));
    mode.coeff_a *= N;
    mode.coeff_b *= N;
    mode.norm = N;
    mode.adjoint_norm = b > 0.0 ? N : -N;
    return mode;
}

Spectrum normalize_biorthogonal(Spectrum spectrum) {
    if (spectrum.broken) fail(Errc::broken_pt, "normalize_biorthogonal: spectrum has complex eigenvalues");
    for (std::size_t i = 1; i < spectrum.modes.size(); ++i)
        if (std::abs(spectrum.modes[i].k - spectrum.modes[i - 1].k) <= kImagTol)
            throw std::invalid_argument("normalize_biorthogonal: eigenvalues must be distinct");
    for (auto& m : spectrum.modes) m = normalize_mode(m, spectrum.config);
    for (auto& m : spectrum.unidirectional) m = normalize_mode(m, spectrum.config);
    spectrum.normalized = true;
    return spectrum;
}

Spectrum solve_real_spectrum(const BoxConfig& config, int n_max) {
    validate(config);
    if (config.boundary.ell1 < 0.0)
        throw std::invalid_argument("solve_real_spectrum requires ell1 >= 0; use solve_complex_roots");
    if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");

    const PhaseFunction phase(config);
    const double L = config.length;
    const double h = kPi / (8.0 * L);
    const double k_limit = (n_max + 2) * kPi / L;

    Spectrum out;
    out.config = config;
    double a = 0.0;
    int ladder = 0;
    for (int level = 1; ladder < n_max; ++level) {
        const double target = level * kPi;
        double root = 0.0;
        ModeKind kind = ModeKind::standing;
        while (true) {
            const double b = a + h;
            if (phase.has_jump && a < phase.k0 && phase.k0 <= b) {
                const double left = phase.k0 * L;
                if (std::abs(left - target) <= kCatastropheTol * target) {
                    std::ostringstream os;
                    os << "ladder mode " << level << " coalesces with k = 1/|ell2| at ell2 = " << config.boundary.ell2;
                    fail(Errc::catastrophe_point, os.str());
                }
                if (left > target) {
                    root = phase.solve(a, phase.k0, target);
                } else {
                    root = phase.k0;
                    kind = ModeKind::unidirectional;
                }
                break;
            }
            const double pb = phase(b);
            if (!std::isfinite(pb)) fail(Errc::bracket_failure, "phase function not finite");
            if (pb >= target) {
                root = phase.solve(a, b, target);
                break;
            }
            a = b;
            if (a > k_limit) {
                std::ostringstream os;
                os << "could not isolate " << n_max << " roots below k = " << k_limit;
                fail(Errc::bracket_failure, os.str());
            }
        }
        a = root;
        const double scale = residual_scale(root, config);
        if (std::abs(quantization_residual(root, config)) > 1e-10 * scale) {
            std::ostringstream os;
            os << "root polish failed at k = " << root;
            fail(Errc::no_convergence, os.str());
        }
        if (kind == ModeKind::standing)
            out.modes.push_back(make_mode(config, ++ladder, root, kind));
        else
            out.unidirectional.push_back(make_mode(config, 0, root, kind));
    }
    return normalize_biorthogonal(std::move(out));
}

ComplexRootReport solve_complex_roots(const BoxConfig& config, const roots::Rect& region) {
    validate(config);
    roots::validate(region);
    const bool zero_on_re_edge = (region.re_min == 0.0 || region.re_max == 0.0) &&
                                 region.im_min <= 0.0 && region.im_max >= 0.0;
    const bool zero_on_im_edge = (region.im_min == 0.0 || region.im_max == 0.0) &&
                                 region.re_min <= 0.0 && region.re_max >= 0.0;
    if (zero_on_re_edge || zero_on_im_edge) throw std::invalid_argument("region boundary must not contain k = 0");

    const roots::AnalyticFn f = [&config](cd k) { return quantization_residual(k, config); };
    const roots::AnalyticFn df = [&config](cd k) { return quantization_residual_derivative(k, config); };
    const auto zeros = roots::find_zeros(f, df, region);

    ComplexRootReport rep;
    for (const auto& z : zeros) {
        if (std::abs(z.z) < 1e-10) continue;
        for (int i = 0; i < z.multiplicity; ++i) rep.roots.push_back(z.z);
    }
    auto near_root = [&rep](cd k) {
        return std::any_of(rep.roots.begin(), rep.roots.end(),
                           [&](cd r) { return std::abs(r - k) <= 1e-7 * std::max(1.0, std::abs(k)); });
    };
    for (cd k : rep.roots) {
        if (std::abs(k.imag()) <= kImagTol) continue;
        rep.off_axis.push_back(k);
        PTPair p;
        p.k = k;
        p.partner = -std::conj(k);
        p.partner_residual = std::abs(f(p.partner)) / residual_scale(p.partner, config);
        p.partner_in_roots = roots::contains(region, p.partner) && near_root(p.partner);
        p.conjugate_in_roots = near_root(std::conj(k));
        rep.pairs.push_back(p);
    }
    rep.broken = !rep.off_axis.empty();
    return rep;
}

Spectrum spectrum_from_roots(const BoxConfig& config, const std::vector<cd>& roots_in) {
    validate(config);
    std::vector<cd> roots = roots_in;
    std::sort(roots.begin(), roots.end(), [](cd a, cd b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    Spectrum out;
    out.config = config;
    int n = 0;
    for (cd k : roots) {
        if (std::abs(k.imag()) <= kImagTol) {
            out.modes.push_back(make_mode(config, ++n, cd(k.real(), 0.0), ModeKind::standing));
        } else {
            out.modes.push_back(make_mode(config, ++n, k, ModeKind::complex_pair));
            out.broken = true;
        }
    }
    return out;
}

Spectrum closed_form_modes(const BoxConfig& config, int n_max, Normalization normalization) {
    validate(config);
    if (config.boundary.ell1 != 0.0)
        fail(Errc::not_maximally_non_hermitian, "closed_form_modes requires ell1 = 0");
    if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
    Spectrum out;
    out.config = config;
    for (int n = 1; n <= n_max; ++n)
        out.modes.push_back(make_mode(config, n, n * kPi / config.length, ModeKind::standing));
    if (config.boundary.ell2 != 0.0) {
        const double k0 = 1.0 / std::abs(config.boundary.ell2);
        if (k0 < n_max * kPi / config.length)
            out.unidirectional.push_back(make_mode(config, 0, k0, ModeKind::unidirectional));
    }
    if (normalization == Normalization::biorthogonal) return normalize_biorthogonal(std::move(out));
    return out;
}

cd eigenfunction_eval(const Mode& mode, double x) {
    check_domain(mode, x);
    return mode.coeff_a * std::exp(I * mode.k * x) + mode.coeff_b * std::exp(-I * mode.k * x);
}

cd eigenfunction_derivative(const Mode& mode, double x, int order) {
    check_domain(mode, x);
    if (order < 0) throw std::invalid_argument("derivative order must be >= 0");
    const cd ik = I * mode.k;
    return mode.coeff_a * std::pow(ik, order) * std::exp(ik * x) +
           mode.coeff_b * std::pow(-ik, order) * std::exp(-ik * x);
}

cd adjoint_eigenfunction_eval(const Mode& mode, double x) {
    return (mode.adjoint_norm / std::conj(mode.norm)) * std::conj(eigenfunction_eval(mode, x));
}

cd adjoint_eigenfunction_derivative(const Mode& mode, double x, int order) {
    return (mode.adjoint_norm / std::conj(mode.norm)) * std::conj(eigenfunction_derivative(mode, x, order));
}

std::function<cd(double)> pt_image(const Mode& mode) {
    return [mode](double x) { return std::conj(eigenfunction_eval(mode, mode.length - x)); };
}

std::function<cd(double)> pt_image(std::function<cd(double)> f, double length) {
    return [f = std::move(f), length](double x) { return std::conj(f(length - x)); };
}

}  // namespace ptbox
