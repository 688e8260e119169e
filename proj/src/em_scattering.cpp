#include "ptbox/em_scattering.hpp"

#include "ptbox/error.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

namespace ptbox::em {

namespace {

constexpr cd I{0.0, 1.0};

void validate(const SlabParams& p) {
    if (!std::isfinite(p.rho) || !(p.rho > 0.0)) throw std::invalid_argument("rho must be finite and > 0");
    require_finite(p.mu, "mu");
    require_finite(p.theta, "theta");
    require_finite(p.phi, "phi");
}

void require_finite_c(cd z, const char* name) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw std::invalid_argument(std::string(name) + " must be finite");
}

// Wrap to (-pi, pi]; -pi maps to +pi.
double wrap_phase(double a) {
    constexpr double pi = std::numbers::pi;
    double r = std::remainder(a, 2.0 * pi);
    if (r <= -pi) r += 2.0 * pi;
    return r;
}

Mat2 vacuum_basis(double x, double k) {
    Mat2 w;
    const cd e = std::exp(I * k * x);
    w << e, 1.0 / e, e, -1.0 / e;
    return w;
}

Mat2 medium_basis(double x, double k, cd n, cd eta) {
    Mat2 w;
    const cd e = std::exp(I * n * k * x);
    w << e, 1.0 / e, eta * e, -eta / e;
    return w;
}

}  // namespace

Mat2 ScatteringMatrix::matrix() const {
    Mat2 s;
    s << t_left, r_right, r_left, t_right;
    return s;
}

cd interface_reflection(const MediumParams& medium, Side side) {
    require_finite_c(medium.n, "n");
    require_finite_c(medium.mu_r, "mu_r");
    if (std::abs(medium.mu_r) == 0.0) throw std::invalid_argument("mu_r must be non-zero");
    const cd ratio = medium.n / medium.mu_r;
    if (side == Side::left) {
        if (std::abs(1.0 + ratio) < 1e-12) fail(Errc::pole_at_interface, "1 + n/mu_r vanishes");
        return (1.0 - ratio) / (1.0 + ratio);
    }
    const cd rc = std::conj(ratio);
    if (std::abs(1.0 - rc) < 1e-12) fail(Errc::pole_at_interface, "1 - n*/mu_r* vanishes");
    return (1.0 + rc) / (1.0 - rc);
}

cd box_reflection(cd k, const PTBoundaryParams& p, Side side) {
    const double l1 = p.ell1;
    const double l2 = p.ell2;
    cd num, den;
    if (side == Side::left) {
        num = -(1.0 + k * l2 + I * k * l1);
        den = 1.0 - k * l2 - I * k * l1;
    } else {
        num = -(1.0 - k * l2 + I * k * l1);
        den = 1.0 + k * l2 - I * k * l1;
    }
    if (std::abs(den) < 1e-12) fail(Errc::pole_at_interface, "box wall reflection has a pole");
    return num / den;
}

std::vector<cd> cavity_modes(cd r_left, cd r_right, double length, const roots::Rect& region) {
    require_finite_c(r_left, "r_left");
    require_finite_c(r_right, "r_right");
    if (!(length > 0.0)) throw std::invalid_argument("cavity length must be > 0");
    const cd prod = r_left * r_right;
    if (std::abs(prod) == 0.0) throw std::invalid_argument("cavity_modes needs r_left * r_right != 0");
    const roots::AnalyticFn f = [=](cd k) { return prod * std::exp(2.0 * I * k * length) - 1.0; };
    const roots::AnalyticFn df = [=](cd k) { return 2.0 * I * length * prod * std::exp(2.0 * I * k * length); };
    std::vector<cd> out;
    for (const auto& z : roots::find_zeros(f, df, region))
        for (int i = 0; i < z.multiplicity; ++i) out.push_back(z.z);
    return out;
}

std::vector<cd> cavity_modes(const std::function<cd(cd)>& r_left, const std::function<cd(cd)>& r_right, double length,
                             const roots::Rect& region) {
    if (!(length > 0.0)) throw std::invalid_argument("cavity length must be > 0");
    const roots::AnalyticFn f = [=](cd k) { return r_left(k) * r_right(k) * std::exp(2.0 * I * k * length) - 1.0; };
    const roots::AnalyticFn df = roots::numeric_derivative(f);
    std::vector<cd> out;
    for (const auto& z : roots::find_zeros(f, df, region))
        for (int i = 0; i < z.multiplicity; ++i) out.push_back(z.z);
    return out;
}

TransferMatrix transfer_from_params(const SlabParams& p, double k) {
    validate(p);
    const double cm = std::cosh(p.mu), sm = std::sinh(p.mu);
    const double ct = std::cosh(p.theta), st = std::sinh(p.theta);
    const cd den = cm + I * sm * st;
    const cd off = (sm + I * cm * st) / den;
    TransferMatrix t;
    t.k = k;
    t.m << p.rho * ct * std::exp(I * p.phi) / den, off, -off, ct * std::exp(-I * p.phi) / (p.rho * den);
    return t;
}

SlabParams params_from_transfer(const TransferMatrix& t) {
    if (!t.m.allFinite()) throw std::invalid_argument("transfer matrix must be finite");
    const double scale = std::max(1.0, t.m.cwiseAbs().maxCoeff());
    if (std::abs(t.m(0, 1) + t.m(1, 0)) > 1e-10 * scale)
        fail(Errc::not_parity_symmetric, "t12 != -t21");
    if (std::abs(t.m.determinant() - 1.0) > 1e-10 * scale * scale)
        fail(Errc::not_parity_symmetric, "det T != 1");
    const cd b = t.m(0, 1);
    const cd d = t.m(1, 1);
    if (std::abs(d) < 1e-12) fail(Errc::degenerate_d, "|t22| below 1e-12 (S-matrix pole)");
    const cd z1 = (1.0 + b) / d;
    const cd z2 = (1.0 - b) / d;
    if (std::abs(z1) == 0.0 || std::abs(z2) == 0.0) fail(Errc::degenerate_d, "S-matrix eigenvalue vanishes");
    SlabParams p;
    p.rho = std::sqrt(std::abs(z1) * std::abs(z2));
    p.mu = 0.5 * std::log(std::abs(z1) / std::abs(z2));
    const double diff = wrap_phase(std::arg(z1) - std::arg(z2));
    const double alpha = 0.5 * diff;
    p.theta = std::asinh(std::tan(alpha));
    p.phi = wrap_phase(std::arg(z1) - alpha);
    return p;
}

TransferMatrix physical_slab_transfer(const MediumParams& medium, double thickness, double k) {
    require_finite_c(medium.n, "n");
    require_finite_c(medium.mu_r, "mu_r");
    if (!(thickness > 0.0) || !std::isfinite(thickness)) throw std::invalid_argument("thickness must be > 0");
    if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("k must be > 0");
    if (std::abs(medium.mu_r) == 0.0) throw std::invalid_argument("mu_r must be non-zero");
    const cd eta = medium.n / medium.mu_r;
    if (std::abs(eta) < 1e-12) fail(Errc::pole_at_interface, "slab admittance n/mu_r vanishes");
    const double h = 0.5 * thickness;
    // Continuity of E and H at x = -d/2 and x = +d/2.
    const Mat2 in = medium_basis(-h, k, medium.n, eta).inverse() * vacuum_basis(-h, k);
    const Mat2 out = vacuum_basis(h, k).inverse() * medium_basis(h, k, medium.n, eta);
    TransferMatrix t;
    t.k = k;
    t.m = out * in;
    return t;
}

TransferMatrix time_reverse(const TransferMatrix& t) {
    TransferMatrix r;
    r.k = t.k;
    r.m << std::conj(t.m(1, 1)), std::conj(t.m(1, 0)), std::conj(t.m(0, 1)), std::conj(t.m(0, 0));
    return r;
}

TransferMatrix shift(const TransferMatrix& t, double delta, double k) {
    const cd e = std::exp(2.0 * I * k * delta);
    TransferMatrix s;
    s.k = k;
    s.m << t.m(0, 0), t.m(0, 1) / e, t.m(1, 0) * e, t.m(1, 1);
    return s;
}

TransferMatrix compose(const TransferMatrix& right, const TransferMatrix& left) {
    TransferMatrix t;
    t.k = right.k;
    t.m = right.m * left.m;
    return t;
}

ScatteringMatrix to_smatrix(const TransferMatrix& t) {
    const cd t22 = t.m(1, 1);
    if (!(std::abs(t22) > 1e-12)) {
        std::ostringstream os;
        os << "|t22| = " << std::abs(t22) << " at k = " << t.k;
        fail(Errc::smatrix_pole, os.str());
    }
    ScatteringMatrix s;
    s.t_left = t.m.determinant() / t22;
    s.r_right = t.m(0, 1) / t22;
    s.r_left = -t.m(1, 0) / t22;
    s.t_right = 1.0 / t22;
    return s;
}

TransferMatrix double_barrier_transfer(const TransferMatrix& absorber, double delta, double k) {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw std::invalid_argument("delta must be > 0");
    if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("k must be > 0");
    const TransferMatrix left = shift(absorber, -0.5 * delta, k);
    const TransferMatrix right = shift(time_reverse(absorber), 0.5 * delta, k);
    return compose(right, left);
}

TransferMatrix double_barrier_transfer(const DoubleBarrier& db, double k) {
    return double_barrier_transfer(transfer_from_params(db.slab, k), db.delta, k);
}

std::vector<SweepRow> transmission_sweep(const TransferBuilder& builder, const std::vector<double>& k_grid, int jobs) {
    std::vector<SweepRow> rows(k_grid.size());
    auto work = [&](std::size_t i) {
        SweepRow& r = rows[i];
        r.k = k_grid[i];
        try {
            r.s = to_smatrix(builder(r.k));
        } catch (const Error& e) {
            if (e.code() != Errc::smatrix_pole) throw;
            const double nan = std::numeric_limits<double>::quiet_NaN();
            r.pole = true;
            r.t2 = r.rl2 = r.rr2 = r.al2 = r.ar2 = nan;
            return;
        }
        r.t2 = std::norm(r.s.t_left);
        r.rl2 = std::norm(r.s.r_left);
        r.rr2 = std::norm(r.s.r_right);
        r.al2 = 1.0 - r.t2 - r.rl2;
        r.ar2 = 1.0 - std::norm(r.s.t_right) - r.rr2;
    };
    const std::size_t n = rows.size();
    const std::size_t workers = std::min<std::size_t>(std::max(jobs, 1), std::max<std::size_t>(n, 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) work(i);
        return rows;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) work(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return rows;
}

std::vector<SweepRow> transmission_sweep(const DoubleBarrier& db, const std::vector<double>& k_grid, int jobs) {
    const TransferMatrix slab = transfer_from_params(db.slab);
    if (!(db.delta > 0.0)) throw std::invalid_argument("delta must be > 0");
    return transmission_sweep([&](double k) { return double_barrier_transfer(slab, db.delta, k); }, k_grid, jobs);
}

std::vector<double> linear_grid(double k_min, double k_max, int steps) {
    if (!std::isfinite(k_min) || !std::isfinite(k_max) || !(k_max > k_min))
        throw std::invalid_argument("k grid needs finite k_min < k_max");
    if (steps < 2) throw std::invalid_argument("k grid needs at least 2 points");
    std::vector<double> g(steps);
    for (int i = 0; i < steps; ++i) g[i] = k_min + (k_max - k_min) * i / (steps - 1);
    return g;
}

}  // namespace ptbox::em
