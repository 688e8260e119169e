#include "check.hpp"
#include "oracles.hpp"

#include "ptbox/error.hpp"
#include "ptbox/spectrum.hpp"

#include <doctest.h>

#include <numbers>

using namespace ptbox;

namespace {

constexpr double kPi = std::numbers::pi;

// psi(0) - lambda1 psi'(0) and psi(L) - lambda2 psi'(L) relative to |psi'|.
double boundary_defect(const Mode& m, const BoxConfig& c) {
    const BoundaryPair bc = pt_pair(c.boundary);
    const double h = 1e-6, L = c.length;
    const cd d0 = (eigenfunction_eval(m, h) - eigenfunction_eval(m, 0.0)) / h;
    const cd dL = (eigenfunction_eval(m, L) - eigenfunction_eval(m, L - h)) / h;
    const cd exact0 = eigenfunction_derivative(m, 0.0), exactL = eigenfunction_derivative(m, L);
    const double fd = std::max(std::abs(d0 - exact0) / std::abs(exact0), std::abs(dL - exactL) / std::abs(exactL));
    const double r0 = std::abs(eigenfunction_eval(m, 0.0) - bc.lambda1 * exact0) / std::abs(exact0);
    const double rL = std::abs(eigenfunction_eval(m, L) - bc.lambda2 * exactL) / std::abs(exactL);
    CHECK(fd < 1e-4);
    return std::max(r0, rL);
}

}  // namespace

TEST_CASE("quantization_residual examples") {
    CHECK(std::abs(quantization_residual(kPi, {1.0, {0.0, 0.0}})) < 1e-14);
    CHECK(std::abs(quantization_residual(kPi, {1.0, {0.0, 0.3}})) < 1e-14);
    const cd expected = cd(0.0, 2.0) * (std::exp(cd(0.0, 2.0)) + 1.0);
    CHECK(std::abs(quantization_residual(1.0, {1.0, {1.0, 0.0}}) - expected) < 1e-14);
}

TEST_CASE("residual zeros coincide with the boundary determinant") {
    for (double l1 : {0.0, 0.5, -0.4})
        for (double l2 : {0.0, 0.2, 0.3}) {
            const BoxConfig c{1.3, {l1, l2}};
            for (cd k : {cd(1.0, 0.2), cd(4.0, -0.5), cd(7.5, 1.0)}) {
                // f(k) = -e^{ikL} det(k) (1 + ...) up to a nonvanishing factor: compare ratios at two points.
                const cd f = quantization_residual(k, c);
                const cd d = oracle::pt_det(k, c.length, l1, l2);
                CHECK(std::abs(f / d + std::exp(cd(0.0, 1.0) * k * c.length)) < 1e-12 * std::abs(f / d));
            }
        }
}

TEST_CASE("analytic derivative matches finite differences") {
    const BoxConfig c{1.0, {0.5, 0.2}};
    for (cd k : {cd(1.0, 0.0), cd(3.0, 0.5), cd(10.0, -1.0)}) {
        const double h = 1e-6;
        const cd fd = (quantization_residual(k + h, c) - quantization_residual(k - h, c)) / (2.0 * h);
        CHECK(std::abs(quantization_residual_derivative(k, c) - fd) < 1e-6 * std::max(1.0, std::abs(fd)));
    }
}

TEST_CASE("maximally non-hermitian ladder is n pi / L") {
    const Spectrum sp = solve_real_spectrum({1.0, {0.0, 0.1}}, 3);
    REQUIRE(sp.modes.size() == 3);
    for (int n = 1; n <= 3; ++n) CHECK(std::abs(sp.modes[n - 1].k - kPi * n) < 1e-10);
    CHECK_FALSE(sp.broken);
    CHECK(sp.normalized);
    const Spectrum hard = solve_real_spectrum({1.0, {0.0, 0.0}}, 10);
    for (int n = 1; n <= 10; ++n) CHECK(std::abs(hard.modes[n - 1].k - kPi * n) < 1e-10);
    CHECK(hard.unidirectional.empty());
}

TEST_CASE("extra unidirectional root at k = 1/|ell2|") {
    for (double l2 : {0.1, -0.1}) {
        const Spectrum sp = solve_real_spectrum({1.0, {0.0, l2}}, 5);
        REQUIRE(sp.unidirectional.size() == 1);
        CHECK(std::abs(sp.unidirectional[0].k - 10.0) < 1e-10);
        CHECK(sp.unidirectional[0].kind == ModeKind::unidirectional);
        CHECK(std::abs(quantization_residual(sp.unidirectional[0].k, {1.0, {0.0, l2}})) < 1e-9);
    }
}

TEST_CASE("general ell1 > 0 roots agree with a dense sign-scan oracle") {
    const BoxConfig c{1.0, {0.5, 0.2}};
    const Spectrum sp = solve_real_spectrum(c, 5);
    const auto oracle_roots = oracle::sign_scan_roots(
        [](double k) { return oracle::pt_real_function(k, 1.0, 0.5, 0.2); }, 1e-4, 16.0, 160000);
    REQUIRE(oracle_roots.size() >= 5);
    for (int i = 0; i < 5; ++i) CHECK(std::abs(sp.modes[i].k.real() - oracle_roots[i]) < 1e-8);
    for (const auto& m : sp.modes) {
        CHECK(std::abs(quantization_residual(m.k, c)) < 1e-10 * residual_scale(m.k, c));
        CHECK(boundary_defect(m, c) < 1e-8);
    }
}

TEST_CASE("hermitian overlap line ell2 = 0 matches the self-adjoint box") {
    const BoxConfig c{1.0, {0.7, 0.0}};
    const Spectrum sp = solve_real_spectrum(c, 8);
    const auto oracle_roots = oracle::sign_scan_roots(
        [](double k) { return oracle::pt_real_function(k, 1.0, 0.7, 0.0); }, 1e-4, 30.0, 300000);
    for (int i = 0; i < 8; ++i) CHECK(std::abs(sp.modes[i].k.real() - oracle_roots[i]) < 1e-10);
}

TEST_CASE("negative ell1 is rejected by the real solver") {
    CHECK_THROWS_AS(solve_real_spectrum({1.0, {-0.1, 0.2}}, 3), std::invalid_argument);
    CHECK_THROWS_AS(solve_real_spectrum({0.0, {0.1, 0.2}}, 3), std::invalid_argument);
}

TEST_CASE("complex roots") {
    const roots::Rect region{0.1, 20.0, -5.0, 5.0};
    SUBCASE("ell1 > 0 and ell1 = 0 stay on the real axis") {
        for (PTBoundaryParams p : {PTBoundaryParams{0.5, 0.0}, PTBoundaryParams{0.0, 0.1}}) {
            const auto rep = solve_complex_roots({1.0, p}, region);
            CHECK(rep.off_axis.empty());
            CHECK_FALSE(rep.broken);
            CHECK_FALSE(rep.roots.empty());
        }
    }
    SUBCASE("ell1 < 0 breaks PT, roots pair as {k, -k*}") {
        const BoxConfig c{1.0, {-0.4, 0.3}};
        const auto rep = solve_complex_roots(c, region);
        CHECK(rep.broken);
        REQUIRE_FALSE(rep.pairs.empty());
        for (const auto& p : rep.pairs) {
            CHECK(p.partner == -std::conj(p.k));
            CHECK(p.partner_residual < 1e-10);
            CHECK(p.conjugate_in_roots);
        }
        auto scaled = [](cd k) { return oracle::pt_det(k, 1.0, -0.4, 0.3) / std::max(1.0, std::norm(k) * 0.25); };
        const auto grid = oracle::grid_zeros(scaled, 0.1, 20.0, -5.0, 5.0, 600, 300, 1e-9);
        for (cd z : rep.off_axis) {
            const bool seen = std::any_of(grid.begin(), grid.end(), [&](cd w) { return std::abs(w - z) < 1e-7; });
            CHECK(seen);
        }
        int oracle_off_axis = 0;
        for (cd w : grid)
            if (std::abs(w.imag()) > 1e-6) ++oracle_off_axis;
        CHECK(oracle_off_axis == static_cast<int>(rep.off_axis.size()));
    }
    SUBCASE("k = 0 on the contour is rejected") {
        CHECK_THROWS(solve_complex_roots({1.0, {0.5, 0.2}}, {0.0, 5.0, -1.0, 1.0}));
    }
}

TEST_CASE("closed_form_modes") {
    const Spectrum a = closed_form_modes({1.0, {0.0, 0.0}}, 3);
    CHECK(std::abs(a.modes[0].energy - kPi * kPi / 2.0) < 1e-12);
    for (const auto& m : a.modes) CHECK(std::abs(m.norm - std::sqrt(2.0)) < 1e-12);
    const Spectrum b = closed_form_modes({2.0, {0.0, 0.0}}, 3);
    CHECK(std::abs(b.modes[1].k - kPi) < 1e-14);
    CHECK(std::abs(b.modes[1].energy - kPi * kPi / 2.0) < 1e-12);
    CHECK(std::abs(b.modes[0].energy - kPi * kPi / 8.0) < 1e-12);

    const Spectrum c = closed_form_modes({1.0, {0.0, 0.1}}, 3);
    const double expected_n1 = std::sqrt(2.0) / std::sqrt(std::abs(1.0 - kPi * kPi * 0.01));
    CHECK(std::abs(std::abs(c.modes[0].norm) - expected_n1) < 1e-12);
    CHECK(std::abs(c.modes[0].adjoint_norm * c.modes[0].norm - 2.0 / (1.0 - kPi * kPi * 0.01)) < 1e-12);
    // sgn(1) = sign(pi^2 0.01 - 1) = -1, so the adjoint norm is +N1.
    CHECK(std::abs(c.modes[0].adjoint_norm - c.modes[0].norm) < 1e-12);

    CHECK(check::errc_of([] { closed_form_modes({1.0, {0.1, 0.1}}, 3); }) == Errc::not_maximally_non_hermitian);
    CHECK(check::errc_of([] { closed_form_modes({1.0, {0.0, 1.0 / kPi}}, 3); }) == Errc::catastrophe_point);
}

TEST_CASE("root finder and closed form agree for n <= 20") {
    for (double l2 : {0.05, 0.1, 0.2, -0.15}) {
        const BoxConfig c{1.0, {0.0, l2}};
        const Spectrum a = solve_real_spectrum(c, 20), b = closed_form_modes(c, 20);
        for (int i = 0; i < 20; ++i) {
            CHECK(std::abs(a.modes[i].k - b.modes[i].k) < 1e-10);
            CHECK(std::abs(a.modes[i].norm - b.modes[i].norm) < 1e-9);
        }
    }
}

TEST_CASE("eigenfunctions match the sin/cos form") {
    const BoxConfig c{1.0, {0.0, 0.1}};
    const Spectrum sp = closed_form_modes(c, 6);
    for (const auto& m : sp.modes) {
        const double k = m.k.real();
        for (double x : {0.0, 0.13, 0.5, 0.77, 1.0}) {
            const cd expected = m.norm * cd(std::sin(k * x), k * 0.1 * std::cos(k * x));
            CHECK(std::abs(eigenfunction_eval(m, x) - expected) < 1e-12);
            const cd adj_expected = m.adjoint_norm * cd(std::sin(k * x), -k * 0.1 * std::cos(k * x));
            CHECK(std::abs(adjoint_eigenfunction_eval(m, x) - adj_expected) < 1e-12);
            // phi_n = psi_n* (N~_n / N_n*)
            CHECK(std::abs(adjoint_eigenfunction_eval(m, x) -
                           std::conj(eigenfunction_eval(m, x)) * (m.adjoint_norm / std::conj(m.norm))) < 1e-12);
        }
        CHECK(std::abs(eigenfunction_eval(m, 0.0) - cd(0.0, 1.0) * m.norm * k * 0.1) < 1e-12);
        CHECK(boundary_defect(m, c) < 1e-8);
    }
    const Spectrum hard = closed_form_modes({1.0, {0.0, 0.0}}, 1);
    CHECK(std::abs(eigenfunction_eval(hard.modes[0], 0.5) - std::sqrt(2.0)) < 1e-12);
    CHECK(check::errc_of([&] { eigenfunction_eval(sp.modes[0], 1.1); }) == Errc::out_of_domain);
    CHECK(check::errc_of([&] { adjoint_eigenfunction_eval(sp.modes[0], -0.1); }) == Errc::out_of_domain);
}

TEST_CASE("PT image of a mode is (-1)^{n+1} psi") {
    for (double l2 : {0.0, 0.1}) {
        const Spectrum sp = closed_form_modes({1.0, {0.0, l2}}, 4);
        for (const auto& m : sp.modes) {
            const auto xi = pt_image(m);
            const double sign = m.n % 2 ? 1.0 : -1.0;
            for (double x : {0.1, 0.4, 0.9}) CHECK(std::abs(xi(x) - sign * eigenfunction_eval(m, x)) < 1e-10);
            REQUIRE(m.pt_eigenvalue.has_value());
            CHECK(*m.pt_eigenvalue == static_cast<int>(sign));
        }
    }
    const auto f = pt_image([](double x) { return cd(x * x, 0.0); }, 2.0);
    CHECK(std::abs(f(0.5) - 2.25) < 1e-14);
}

TEST_CASE("general ell1 modes are PT eigenfunctions and biorthonormal") {
    const BoxConfig c{1.0, {0.5, 0.2}};
    const Spectrum sp = solve_real_spectrum(c, 6);
    for (const auto& m : sp.modes) {
        const auto xi = pt_image(m);
        REQUIRE(m.pt_eigenvalue.has_value());
        for (double x : {0.2, 0.6}) CHECK(std::abs(xi(x) - double(*m.pt_eigenvalue) * eigenfunction_eval(m, x)) < 1e-10);
    }
    for (std::size_t i = 0; i < sp.modes.size(); ++i)
        for (std::size_t j = 0; j < sp.modes.size(); ++j) {
            const cd g = oracle::simpson(
                [&](double x) {
                    return std::conj(adjoint_eigenfunction_eval(sp.modes[i], x)) * eigenfunction_eval(sp.modes[j], x);
                },
                0.0, 1.0, 4000);
            CHECK(std::abs(g - (i == j ? 1.0 : 0.0)) < 1e-9);
        }
}
