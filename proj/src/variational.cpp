#include "ptbox/variational.hpp"

#include "ptbox/error.hpp"
#include "ptbox/quadrature.hpp"
#include "ptbox/random.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ptbox::variational {

namespace {

constexpr cd I{0.0, 1.0};

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

void check_square(const MatrixXd& m, Eigen::Index n, const char* name) {
    if (m.rows() != n || m.cols() != n) {
        std::ostringstream os;
        os << "block " << name << " is " << m.rows() << "x" << m.cols() << ", expected " << n << "x" << n;
        fail(Errc::dimension_mismatch, os.str());
    }
    if (!m.allFinite()) throw std::invalid_argument(std::string("block ") + name + " must be finite");
}

bool symmetric(const MatrixXd& m, double tol) {
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, m.cwiseAbs().maxCoeff());
}

// Newton solve of h psi = lambda psi with quadratic constraints
// psi^dagger W psi = target (and ||psi||^2 = 1 when target = 0).
struct StationarySystem {
    const MatrixXcd& h;
    VectorXd w;  // diagonal of W
    double target;
    bool gauge;
    int m;

    Eigen::Index unknowns() const { return 2 * m + 2; }
    Eigen::Index equations() const { return 2 * m + 1 + (gauge ? 1 : 0); }

    VectorXcd psi_of(const VectorXd& x) const {
        VectorXcd psi(m);
        for (int i = 0; i < m; ++i) psi(i) = cd(x(i), x(m + i));
        return psi;
    }
    cd lambda_of(const VectorXd& x) const { return cd(x(2 * m), x(2 * m + 1)); }

    VectorXd residual(const VectorXd& x) const {
        const VectorXcd psi = psi_of(x);
        const VectorXcd r = h * psi - lambda_of(x) * psi;
        VectorXd out(equations());
        for (int i = 0; i < m; ++i) {
            out(i) = r(i).real();
            out(m + i) = r(i).imag();
        }
        out(2 * m) = (psi.cwiseAbs2().array() * w.array()).sum() - target;
        if (gauge) out(2 * m + 1) = psi.squaredNorm() - 1.0;
        return out;
    }

    MatrixXd jacobian(const VectorXd& x) const {
        // Central differences are exact for this quadratic system up to rounding.
        const double step = 1e-5;
        MatrixXd j(equations(), unknowns());
        VectorXd xp = x, xm = x;
        for (Eigen::Index c = 0; c < unknowns(); ++c) {
            const double hc = step * std::max(1.0, std::abs(x(c)));
            xp(c) = x(c) + hc;
            xm(c) = x(c) - hc;
            j.col(c) = (residual(xp) - residual(xm)) / (2.0 * hc);
            xp(c) = x(c);
            xm(c) = x(c);
        }
        return j;
    }
};

struct StartOutcome {
    bool converged = false;
    VectorXcd psi;
    cd lambda;
};

StartOutcome newton(const StationarySystem& sys, VectorXd x, const ExtremizeOptions& opt, double scale) {
    VectorXd r = sys.residual(x);
    double norm = r.norm();
    double best = norm;
    int stall = 0;
    for (int it = 0; it < opt.max_newton; ++it) {
        if (norm <= opt.tol * scale) return {true, sys.psi_of(x), sys.lambda_of(x)};
        const MatrixXd j = sys.jacobian(x);
        const VectorXd dx = Eigen::CompleteOrthogonalDecomposition<MatrixXd>(j).solve(-r);
        double t = 1.0;
        VectorXd trial = x + dx;
        VectorXd rt = sys.residual(trial);
        for (int k = 0; k < 30 && !(rt.norm() <= norm); ++k) {
            t *= 0.5;
            trial = x + t * dx;
            rt = sys.residual(trial);
        }
        x = trial;
        r = rt;
        norm = r.norm();
        if (!std::isfinite(norm)) break;
        if (norm < 0.5 * best) {
            best = norm;
            stall = 0;
        } else if (++stall > 25) {
            break;
        }
    }
    if (norm <= opt.tol * scale) return {true, sys.psi_of(x), sys.lambda_of(x)};
    return {};
}

ExtremizationReport run_starts(const MatrixXcd& h, const VectorXd& w, int constraint_class, bool reject_complex,
                               const ExtremizeOptions& opt) {
    const int m = static_cast<int>(h.rows());
    const double hnorm = h.norm();
    const double scale = std::max(1.0, hnorm);
    const StationarySystem sys{h, w, static_cast<double>(constraint_class), constraint_class == 0, m};
    ExtremizationReport rep;
    rep.starts = opt.starts > 0 ? opt.starts : 20 * m;
    Rng rng(opt.seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(constraint_class + 2)));
    std::vector<ExtremizationResult> found;
    for (int s = 0; s < rep.starts; ++s) {
        VectorXcd psi(m);
        for (int i = 0; i < m; ++i) psi(i) = cd(rng.normal(), rng.normal());
        const double wn = (psi.cwiseAbs2().array() * w.array()).sum();
        if (constraint_class != 0 && std::abs(wn) > 1e-8)
            psi /= std::sqrt(std::abs(wn));
        else
            psi.normalize();
        VectorXd x(2 * m + 2);
        for (int i = 0; i < m; ++i) {
            x(i) = psi(i).real();
            x(m + i) = psi(i).imag();
        }
        x(2 * m) = rng.uniform(-hnorm, hnorm);
        x(2 * m + 1) = 0.0;
        const StartOutcome out = newton(sys, x, opt, scale);
        if (!out.converged) {
            ++rep.failed_starts;
            continue;
        }
        if (std::abs(out.lambda.imag()) > 1e-8) {
            if (reject_complex) {
                std::ostringstream os;
                os << "stationary point with complex eigenvalue " << out.lambda;
                fail(Errc::broken_pt, os.str());
            }
            ++rep.failed_starts;
            continue;
        }
        ExtremizationResult res;
        res.psi = out.psi;
        res.lambda = out.lambda.real();
        res.constraint_class = constraint_class;
        res.residual = (h * out.psi - res.lambda * out.psi).norm();
        res.pt_norm = (out.psi.cwiseAbs2().array() * w.array()).sum();
        const bool dup = std::any_of(found.begin(), found.end(),
                                     [&](const ExtremizationResult& f) { return std::abs(f.lambda - res.lambda) <= 1e-8; });
        if (!dup) found.push_back(std::move(res));
    }
    std::sort(found.begin(), found.end(),
              [](const ExtremizationResult& a, const ExtremizationResult& b) { return a.lambda < b.lambda; });
    rep.results = std::move(found);
    return rep;
}

}  // namespace

VectorXd ParitySignature::diagonal() const {
    VectorXd s(2 * half_dim);
    s.head(half_dim).setOnes();
    s.tail(half_dim).setConstant(-1.0);
    return s;
}

MatrixXd ParitySignature::matrix() const { return diagonal().asDiagonal(); }

MatrixXcd PTHamiltonian::matrix() const {
    const int n = half_dim();
    MatrixXcd h(2 * n, 2 * n);
    h.topLeftCorner(n, n) = a.cast<cd>();
    h.topRightCorner(n, n) = I * b.cast<cd>();
    h.bottomLeftCorner(n, n) = I * c.cast<cd>();
    h.bottomRightCorner(n, n) = d.cast<cd>();
    return h;
}

bool PTHamiltonian::pt_self_adjoint(double tol) const {
    const double scale = std::max({1.0, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff(), d.cwiseAbs().maxCoeff()});
    return (c - b.transpose()).cwiseAbs().maxCoeff() <= tol * scale && symmetric(a, tol) && symmetric(d, tol);
}

PTHamiltonian pt_hamiltonian_from_blocks(const MatrixXd& a, const MatrixXd& b, const MatrixXd& c, const MatrixXd& d) {
    const Eigen::Index n = a.rows();
    if (n < 1) fail(Errc::dimension_mismatch, "blocks must be non-empty");
    check_square(a, n, "a");
    check_square(b, n, "b");
    check_square(c, n, "c");
    check_square(d, n, "d");
    return {a, b, c, d};
}

PTHamiltonian build_pt_hamiltonian(const MatrixXd& a, const MatrixXd& b, const MatrixXd& d) {
    PTHamiltonian h = pt_hamiltonian_from_blocks(a, b, b.transpose(), d);
    if (!symmetric(a, 1e-12) || !symmetric(d, 1e-12))
        fail(Errc::not_self_adjoint, "diagonal blocks a and d must be symmetric");
    return h;
}

PTHamiltonian random_pt_hamiltonian(int half_dim, double b_scale, std::uint64_t seed) {
    if (half_dim < 1) throw std::invalid_argument("half_dim must be >= 1");
    Rng rng(seed);
    auto sym = [&]() {
        MatrixXd m(half_dim, half_dim);
        for (int i = 0; i < half_dim; ++i)
            for (int j = 0; j < half_dim; ++j) m(i, j) = rng.normal();
        return MatrixXd(0.5 * (m + m.transpose()));
    };
    MatrixXd a = sym();
    MatrixXd d = sym();
    MatrixXd b(half_dim, half_dim);
    for (int i = 0; i < half_dim; ++i)
        for (int j = 0; j < half_dim; ++j) b(i, j) = b_scale * rng.normal();
    return build_pt_hamiltonian(a, b, d);
}

cd b_functional_complex(const VectorXcd& psi, const PTHamiltonian& h) {
    if (psi.size() != 2 * h.half_dim()) fail(Errc::dimension_mismatch, "psi has the wrong dimension");
    const VectorXd s = h.signature().diagonal();
    const VectorXcd hpsi = h.matrix() * psi;
    return psi.dot((s.cast<cd>().array() * hpsi.array()).matrix());
}

double b_functional(const VectorXcd& psi, const PTHamiltonian& h) {
    if (!h.pt_self_adjoint()) fail(Errc::not_self_adjoint, "b_functional needs c = b^T");
    const cd b = b_functional_complex(psi, h);
    const double bound = 1e-12 * psi.squaredNorm() * std::max(1.0, h.matrix().norm());
    if (std::abs(b.imag()) > bound) {
        std::ostringstream os;
        os << "Im B = " << b.imag() << " exceeds " << bound;
        fail(Errc::not_self_adjoint, os.str());
    }
    return b.real();
}

ExtremizationReport extremize(const PTHamiltonian& h, int constraint_class, const ExtremizeOptions& opt) {
    if (constraint_class < -1 || constraint_class > 1) throw std::invalid_argument("constraint class must be -1, 0 or +1");
    if (!h.pt_self_adjoint()) fail(Errc::not_self_adjoint, "extremize needs a PT-self-adjoint h");
    return run_starts(h.matrix(), h.signature().diagonal(), constraint_class, true, opt);
}

ExtremizationReport rayleigh_extremize_hermitian(const MatrixXcd& h, const ExtremizeOptions& opt) {
    if (h.rows() != h.cols() || h.rows() < 1) fail(Errc::dimension_mismatch, "h must be square");
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, h.cwiseAbs().maxCoeff()))
        fail(Errc::not_self_adjoint, "Rayleigh extremization needs a hermitian matrix");
    return run_starts(h, VectorXd::Ones(h.rows()), 1, true, opt);
}

cd box_functional(const BoxConfig& config, const inner::WaveFunction& psi) {
    validate(config);
    if (!psi.value || !psi.d2) throw std::invalid_argument("trial function needs value and second derivative");
    const double L = config.length;
    auto f = [&](double x) { return std::conj(psi.value(L - x)) * (-0.5 * psi.d2(x)); };
    return quad::integrate_adaptive(f, 0.0, L, 2.0 * psi.max_wavenumber);
}

cd box_variational_residual(const BoxConfig& config, const inner::WaveFunction& psi,
                            const inner::WaveFunction& delta_psi) {
    validate(config);
    if (!psi.value || !psi.d2 || !delta_psi.value || !delta_psi.d2)
        throw std::invalid_argument("trial and variation need value and second derivative");
    const double L = config.length;
    const double kmax = psi.max_wavenumber + delta_psi.max_wavenumber;
    const cd b = box_functional(config, psi);
    const cd norm = inner::pt_inner(psi, psi);
    const cd lambda = std::abs(norm) > 0.0 ? b / norm : cd{};
    auto f = [&](double x) {
        const cd db = std::conj(delta_psi.value(L - x)) * (-0.5 * psi.d2(x)) +
                      std::conj(psi.value(L - x)) * (-0.5 * delta_psi.d2(x));
        const cd dn = std::conj(delta_psi.value(L - x)) * psi.value(x) + std::conj(psi.value(L - x)) * delta_psi.value(x);
        return db - lambda * dn;
    };
    return quad::integrate_adaptive(f, 0.0, L, kmax);
}

}  // namespace ptbox::variational
