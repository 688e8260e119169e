#include "ptbox/lineshape.hpp"

#include "ptbox/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

namespace ptbox::em {

namespace {

constexpr cd I{0.0, 1.0};
constexpr double kPi = std::numbers::pi;

using Eigen::MatrixXd;
using Eigen::VectorXd;

void check_inputs(const SlabParams& p, double delta) {
    if (!std::isfinite(p.rho) || !(p.rho > 0.0)) throw std::invalid_argument("rho must be finite and > 0");
    for (double v : {p.mu, p.theta, p.phi})
        if (!std::isfinite(v)) throw std::invalid_argument("slab parameters must be finite");
    if (!std::isfinite(delta) || !(delta > 0.0)) throw std::invalid_argument("delta must be > 0");
}

double resonant_k(double phi, double delta, ResonanceParity parity, double k_hint) {
    // e^{i(k delta + phi)} = +i (even) or -i (odd).
    const double base = (parity == ResonanceParity::even ? 0.5 * kPi : -0.5 * kPi) - phi;
    double m = std::round((k_hint * delta - base) / (2.0 * kPi));
    while (base + 2.0 * kPi * m <= 0.0) m += 1.0;
    return (base + 2.0 * kPi * m) / delta;
}

ResonanceFit common(const SlabParams& p, double delta, ResonanceParity parity, double k_hint) {
    check_inputs(p, delta);
    const double sm = std::sinh(p.mu), cm = std::cosh(p.mu);
    const double st = std::sinh(p.theta), ct = std::cosh(p.theta);
    const double s = sm * sm * ct * ct;
    if (std::abs(1.0 - s) < 1e-10) fail(Errc::delta_pole, "sinh^2(mu) cosh^2(theta) = 1");
    if (st * st + s <= 0.0) fail(Errc::unresolvable_resonance, "no barrier (theta = mu = 0): Q diverges");
    ResonanceFit r;
    r.k_c = resonant_k(p.phi, delta, parity, k_hint);
    r.parity = parity;
    r.rho = p.rho;
    r.Z = (1.0 - s) / (1.0 + s);
    r.Q2 = st != 0.0 ? (1.0 - s) / (2.0 * delta * st * ct * cm) : std::numeric_limits<double>::infinity();
    r.Delta = sm * ct / (1.0 - s);
    return r;
}

// Damped Gauss-Newton (Levenberg-Marquardt) with a central-difference Jacobian.
VectorXd least_squares(const std::function<VectorXd(const VectorXd&)>& residual, VectorXd p, const VectorXd& typical,
                       const char* what) {
    auto jacobian = [&](const VectorXd& x, Eigen::Index rows) {
        MatrixXd j(rows, x.size());
        for (Eigen::Index c = 0; c < x.size(); ++c) {
            const double h = 1e-6 * typical(c);
            VectorXd xp = x, xm = x;
            xp(c) += h;
            xm(c) -= h;
            j.col(c) = (residual(xp) - residual(xm)) / (2.0 * h);
        }
        return j;
    };
    VectorXd r = residual(p);
    double sse = r.squaredNorm();
    double damping = 1e-6;
    for (int it = 0; it < 100; ++it) {
        const MatrixXd j = jacobian(p, r.size());
        const MatrixXd jtj = j.transpose() * j;
        const VectorXd g = j.transpose() * r;
        MatrixXd a = jtj;
        a.diagonal() += damping * jtj.diagonal().cwiseMax(1e-300);
        const VectorXd step = a.ldlt().solve(-g);
        const VectorXd trial = p + step;
        const VectorXd rt = residual(trial);
        const double sse_t = rt.squaredNorm();
        const double rel_step = (step.array() / typical.array()).abs().maxCoeff();
        if (std::isfinite(sse_t) && sse_t <= sse) {
            p = trial;
            r = rt;
            const double prev = sse;
            sse = sse_t;
            damping = std::max(damping * 0.1, 1e-12);
            if (rel_step < 1e-11 || sse < 1e-30 || prev - sse <= 1e-15 * prev) return p;
        } else {
            damping *= 10.0;
            if (rel_step < 1e-13 || damping > 1e12) return p;
        }
    }
    std::ostringstream os;
    os << what << ": no convergence after 100 Gauss-Newton iterations";
    fail(Errc::fit_diverged, os.str());
}

struct ReflectionFit {
    double amplitude = 0.0;
    double zero = 0.0;
};

ReflectionFit fit_reflection(const std::vector<double>& q, const std::vector<double>& r2, double zq) {
    const std::size_t n = q.size();
    const double rmax = *std::max_element(r2.begin(), r2.end());
    if (!(rmax > 0.0)) return {};
    std::vector<double> env(n);
    MatrixXd a(n, 3);
    VectorXd y(n);
    for (std::size_t i = 0; i < n; ++i) {
        env[i] = 1.0 + q[i] * q[i] / (zq * zq);
        a(i, 0) = q[i] * q[i] / env[i];
        a(i, 1) = q[i] / env[i];
        a(i, 2) = 1.0 / env[i];
        y(i) = r2[i];
    }
    const VectorXd c = a.colPivHouseholderQr().solve(y);
    ReflectionFit init;
    init.amplitude = c(0) > 0.0 ? c(0) : rmax / (zq * zq);
    init.zero = c(0) > 0.0 ? -c(1) / (2.0 * c(0)) : 0.0;
    auto residual = [&](const VectorXd& p) {
        VectorXd res(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double d = q[i] - p(1);
            res(i) = (r2[i] - p(0) * d * d / env[i]) / rmax;
        }
        return res;
    };
    VectorXd p0(2), typ(2);
    p0 << init.amplitude, init.zero;
    typ << std::abs(init.amplitude), zq;
    const VectorXd p = least_squares(residual, p0, typ, "reflection fit");
    return {p(0), p(1)};
}

}  // namespace

std::string_view to_string(ResonanceParity p) { return p == ResonanceParity::even ? "even" : "odd"; }

ResonanceFit resonance_predict(const SlabParams& p, double delta, ResonanceParity parity, double k_hint) {
    ResonanceFit r = common(p, delta, parity, k_hint);
    const double st = std::sinh(p.theta), ct = std::cosh(p.theta), sm = std::sinh(p.mu);
    const double s = sm * sm * ct * ct;
    r.Q = (1.0 + s) / (2.0 * delta * (st * st + s));
    r.zero_left = -r.Delta * r.Q2;
    r.zero_right = r.Delta * r.Q2;
    return r;
}

ResonanceFit resonance_linearized(const SlabParams& p, double delta, ResonanceParity parity, double k_hint) {
    ResonanceFit r = common(p, delta, parity, k_hint);
    const double st = std::sinh(p.theta), ct = std::cosh(p.theta), sm = std::sinh(p.mu);
    const double s = sm * sm * ct * ct;
    r.Q = (1.0 + s) / (2.0 * delta * std::sqrt(ct * ct * (st * st + s)));
    r.zero_right = std::atan2(std::tanh(p.mu), st) / delta;
    r.zero_left = -r.zero_right;
    r.Delta = std::isfinite(r.Q2) ? r.zero_right / r.Q2 : 0.0;
    return r;
}

ResonanceParity detect_parity(const DoubleBarrier& db, double k_c) {
    const cd v = std::exp(I * (k_c * db.delta + db.slab.phi)) / I;
    return v.real() >= 0.0 ? ResonanceParity::even : ResonanceParity::odd;
}

std::array<double, 2> peak_window(const std::vector<SweepRow>& rows) {
    std::size_t best = rows.size();
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (!rows[i].pole && (best == rows.size() || rows[i].t2 > rows[best].t2)) best = i;
    if (best == rows.size()) throw std::invalid_argument("sweep has no regular points");
    std::size_t lo = best, hi = best;
    while (lo > 0 && !rows[lo - 1].pole && rows[lo - 1].t2 < rows[lo].t2) --lo;
    while (hi + 1 < rows.size() && !rows[hi + 1].pole && rows[hi + 1].t2 < rows[hi].t2) ++hi;
    return {rows[lo].k, rows[hi].k};
}

ResonanceFit fit_lineshape(const std::vector<SweepRow>& rows, double k_lo, double k_hi, const DoubleBarrier* barrier) {
    std::vector<double> k, t2, rl2, rr2;
    for (const auto& r : rows) {
        if (r.pole || r.k < k_lo || r.k > k_hi) continue;
        k.push_back(r.k);
        t2.push_back(r.t2);
        rl2.push_back(r.rl2);
        rr2.push_back(r.rr2);
    }
    const std::size_t n = k.size();
    if (n < 8) throw std::invalid_argument("fit window holds fewer than 8 regular sweep points");

    const std::size_t imax = std::max_element(t2.begin(), t2.end()) - t2.begin();
    const double peak = t2[imax];
    int peaks = 0;
    for (std::size_t i = 1; i + 1 < n; ++i)
        if (t2[i] > t2[i - 1] && t2[i] >= t2[i + 1] && t2[i] > 0.1 * peak) ++peaks;
    if (peaks != 1) {
        std::ostringstream os;
        os << "fit window holds " << peaks << " interior transmission maxima";
        fail(Errc::multiple_peaks, os.str());
    }

    // Initial guess: discrete peak and half width at half maximum.
    double k0 = k[imax];
    if (imax > 0 && imax + 1 < n) {
        const double a = t2[imax - 1], b = t2[imax], c = t2[imax + 1];
        const double den = a - 2.0 * b + c;
        if (den < 0.0) k0 += 0.5 * (a - c) / den * (k[imax + 1] - k[imax - 1]) * 0.5;
    }
    auto crossing = [&](bool left) -> std::optional<double> {
        if (left) {
            for (std::size_t i = imax; i > 0; --i)
                if (t2[i - 1] < 0.5 * peak)
                    return k[i - 1] + (0.5 * peak - t2[i - 1]) / (t2[i] - t2[i - 1]) * (k[i] - k[i - 1]);
        } else {
            for (std::size_t i = imax; i + 1 < n; ++i)
                if (t2[i + 1] < 0.5 * peak)
                    return k[i] + (t2[i] - 0.5 * peak) / (t2[i] - t2[i + 1]) * (k[i + 1] - k[i]);
        }
        return std::nullopt;
    };
    const auto kl = crossing(true);
    const auto kr = crossing(false);
    double hw = 0.25 * (k.back() - k.front());
    if (kl && kr)
        hw = 0.5 * (*kr - *kl);
    else if (kl)
        hw = k0 - *kl;
    else if (kr)
        hw = *kr - k0;
    const double z0 = 1.0 / std::sqrt(peak);
    const double q0 = hw / z0;

    auto t_residual = [&](const VectorXd& p) {
        VectorXd res(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double q = k[i] - p(0);
            res(i) = (t2[i] - 1.0 / (p(1) * p(1) + q * q / (p(2) * p(2)))) / peak;
        }
        return res;
    };
    VectorXd p0(3), typ(3);
    p0 << k0, z0, q0;
    typ << q0, z0, q0;
    const VectorXd p = least_squares(t_residual, p0, typ, "transmission fit");

    ResonanceFit fit;
    fit.k_c = p(0);
    fit.Z = std::abs(p(1));
    fit.Q = std::abs(p(2));
    fit.residual = std::sqrt(t_residual(p).squaredNorm() / static_cast<double>(n));

    std::vector<double> q(n);
    for (std::size_t i = 0; i < n; ++i) q[i] = k[i] - fit.k_c;
    const double zq = fit.Z * fit.Q;
    const ReflectionFit left = fit_reflection(q, rl2, zq);
    const ReflectionFit right = fit_reflection(q, rr2, zq);
    if (left.amplitude > 0.0 && right.amplitude > 0.0) {
        fit.Q2 = std::pow(left.amplitude * right.amplitude, -0.25);
        fit.rho = std::pow(left.amplitude / right.amplitude, 0.25);
        fit.Delta = (right.zero - left.zero) / (2.0 * fit.Q2);
    } else {
        fit.Q2 = std::numeric_limits<double>::infinity();
        fit.rho = 1.0;
        fit.Delta = 0.0;
    }
    fit.zero_left = left.zero;
    fit.zero_right = right.zero;
    if (barrier) fit.parity = detect_parity(*barrier, fit.k_c);
    return fit;
}

SEigenSystem smatrix_eigensystem(const ScatteringMatrix& s) {
    const Mat2 m = s.matrix();
    if (!m.allFinite()) throw std::invalid_argument("S matrix must be finite");
    const cd a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
    const cd half_tr = 0.5 * (a + d);
    const cd disc = std::sqrt(0.25 * (a - d) * (a - d) + b * c);
    SEigenSystem out;
    out.values = {half_tr + disc, half_tr - disc};
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    for (int i = 0; i < 2; ++i) {
        const cd lam = out.values[i];
        Eigen::Vector2cd v;
        if (std::abs(b) >= std::abs(c) && std::abs(b) > 1e-14 * scale)
            v << b, lam - a;
        else if (std::abs(c) > 1e-14 * scale)
            v << lam - d, c;
        else if ((i == 0) == (std::abs(lam - a) <= std::abs(lam - d)))
            v << 1.0, 0.0;
        else
            v << 0.0, 1.0;
        out.vectors[i] = v.normalized();
    }
    out.overlap = out.vectors[0].dot(out.vectors[1]);
    if (std::abs(1.0 - std::abs(out.overlap)) < 1e-10)
        fail(Errc::defective_matrix, "S-matrix eigenvectors are parallel (exceptional point)");
    return out;
}

ScatteringMatrix near_resonance_smatrix(double rho, double q_over_Q, double phi, ResonanceParity parity) {
    if (!(rho > 0.0)) throw std::invalid_argument("rho must be > 0");
    const cd pref = std::exp(2.0 * I * phi) / (1.0 - I * q_over_Q);
    const double sign = parity == ResonanceParity::even ? -1.0 : 1.0;
    ScatteringMatrix s;
    s.t_left = s.t_right = pref;
    s.r_right = pref * sign * I * q_over_Q / rho;
    s.r_left = pref * sign * I * q_over_Q * rho;
    return s;
}

InterferencePower interference_power(cd alpha, cd beta, double rho, double xi) {
    const double g = (1.0 - rho * rho) / (1.0 + rho * rho);
    const double base = std::norm(alpha) + std::norm(beta);
    const cd cross = std::conj(alpha) * beta;
    return {base + 2.0 * g * cross.real(), base + 2.0 * g * (cross * std::exp(2.0 * I * xi)).real()};
}

}  // namespace ptbox::em
