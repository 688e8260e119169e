#include "check.hpp"
#include "oracles.hpp"

#include "ptbox/inner_products.hpp"
#include "ptbox/random.hpp"

#include <doctest.h>

#include <numbers>

using namespace ptbox;
using namespace ptbox::inner;

namespace {

constexpr double kPi = std::numbers::pi;

// Unnormalized ell1 = 0 mode sin(kx) + i k ell2 cos(kx) with derivatives.
WaveFunction raw_mode(int n, double L, double ell2) {
    const double k = n * kPi / L, u = k * ell2;
    WaveFunction f;
    f.length = L;
    f.value = [=](double x) { return cd(std::sin(k * x), u * std::cos(k * x)); };
    f.d1 = [=](double x) { return k * cd(std::cos(k * x), -u * std::sin(k * x)); };
    f.d2 = [=](double x) { return -k * k * cd(std::sin(k * x), u * std::cos(k * x)); };
    f.max_wavenumber = k;
    return f;
}

}  // namespace

TEST_CASE("canonical_inner examples") {
    const WaveFunction one = from_callable(2.0, [](double) { return cd(1.0, 0.0); });
    CHECK(std::abs(canonical_inner(one, one) - 2.0) < 1e-13);

    const Spectrum hard = closed_form_modes({1.0, {0.0, 0.0}}, 2);
    CHECK(std::abs(canonical_inner(from_mode(hard.modes[0]), from_mode(hard.modes[0])) - 1.0) < 1e-12);

    const Spectrum sp = closed_form_modes({1.0, {0.0, 0.1}}, 2);
    const cd c12 = canonical_inner(from_mode(sp.modes[0]), from_mode(sp.modes[1]));
    CHECK(std::abs(c12) > 1e-3);
    const cd oracle = oracle::simpson(
        [&](double x) { return std::conj(eigenfunction_eval(sp.modes[0], x)) * eigenfunction_eval(sp.modes[1], x); },
        0.0, 1.0, 4000);
    CHECK(std::abs(c12 - oracle) < 1e-10);
}

TEST_CASE("pt_inner of unnormalized modes") {
    const double L = 1.3, l2 = 0.15;
    for (int n = 1; n <= 4; ++n)
        for (int m = 1; m <= 4; ++m) {
            const cd g = pt_inner(raw_mode(n, L, l2), raw_mode(m, L, l2));
            const double k = n * kPi / L;
            const double expected = n == m ? (n % 2 ? 1.0 : -1.0) * (L / 2.0) * (1.0 - k * k * l2 * l2) : 0.0;
            CHECK(std::abs(g - expected) < 1e-12);
        }
    const WaveFunction one = from_callable(1.7, [](double) { return cd(1.0, 0.0); });
    CHECK(std::abs(pt_inner(one, one) - 1.7) < 1e-13);
}

TEST_CASE("normalized PT norms are (-1)^n sgn(n)") {
    const Spectrum sp = closed_form_modes({1.0, {0.0, 0.2}}, 6);
    for (const auto& a : sp.modes)
        for (const auto& b : sp.modes) {
            const cd g = pt_inner(from_mode(a), from_mode(b));
            const double k = a.k.real();
            const double sgn = k * k * 0.04 - 1.0 > 0 ? 1.0 : -1.0;
            const double expected = a.n == b.n ? (a.n % 2 ? -1.0 : 1.0) * sgn : 0.0;
            CHECK(std::abs(g - expected) < 1e-10);
        }
}

TEST_CASE("pt_inner is conjugate symmetric") {
    Rng rng(11);
    for (int t = 0; t < 20; ++t) {
        const double a = rng.normal(), b = rng.normal(), c = rng.uniform(0.5, 6.0);
        const WaveFunction f = from_callable(1.0, [=](double x) { return cd(a * x, b * std::cos(c * x)); }, c);
        const WaveFunction g = from_callable(1.0, [=](double x) { return std::exp(cd(b, c) * x); }, c);
        CHECK(std::abs(pt_inner(f, g) - std::conj(pt_inner(g, f))) < 1e-12);
    }
}

TEST_CASE("sampled inputs") {
    std::vector<double> grid;
    for (int i = 0; i <= 4000; ++i) grid.push_back(i / 4000.0);
    const WaveFunction f = from_callable(1.0, [](double x) { return cd(std::sin(kPi * x), x); });
    const WaveFunctionSample s = sample(f, grid);
    CHECK(std::abs(canonical_inner(s, s) - canonical_inner(f, f)) < 1e-7);
    CHECK(std::abs(pt_inner(s, s) - pt_inner(f, f)) < 1e-7);

    std::vector<double> other(grid);
    other[5] += 1e-4;
    const WaveFunctionSample t = sample(f, other);
    CHECK(check::errc_of([&] { canonical_inner(s, t); }) == Errc::grid_mismatch);
    WaveFunctionSample bad = s;
    bad.grid.pop_back();
    bad.values.pop_back();
    CHECK(check::errc_of([&] { validate(bad, 1.0); }) == Errc::grid_mismatch);
    const WaveFunction g = from_callable(2.0, [](double) { return cd(1.0, 0.0); });
    CHECK(check::errc_of([&] { canonical_inner(f, g); }) == Errc::grid_mismatch);
}

TEST_CASE("PT self-adjointness residual") {
    SUBCASE("eigenmodes of the same box") {
        const BoxConfig c{1.0, {0.0, 0.2}};
        const Spectrum sp = closed_form_modes(c, 4);
        for (const auto& a : sp.modes)
            for (const auto& b : sp.modes)
                CHECK(std::abs(pt_selfadjoint_residual(c, from_mode(a), from_mode(b))) < 1e-8);
    }
    SUBCASE("general ell1 modes") {
        const BoxConfig c{1.0, {0.5, 0.2}};
        const Spectrum sp = solve_real_spectrum(c, 3);
        for (const auto& a : sp.modes)
            for (const auto& b : sp.modes)
                CHECK(std::abs(pt_selfadjoint_residual(c, from_mode(a), from_mode(b))) < 1e-8);
    }
    SUBCASE("hard-wall mode against an ell2 = 0.2 mode") {
        const BoxConfig c{1.0, {0.0, 0.2}};
        const WaveFunction phi = raw_mode(1, 1.0, 0.0);
        const WaveFunction psi = raw_mode(2, 1.0, 0.2);
        const cd r = pt_selfadjoint_residual(c, phi, psi);
        CHECK(std::abs(r) > 1e-3);
        // Independent surface bracket [phi*(L-x) psi'(x) + phi'*(L-x) psi(x)] from 0 to L.
        auto bracket = [&](double x) {
            return std::conj(phi.value(1.0 - x)) * psi.d1(x) + std::conj(phi.d1(1.0 - x)) * psi.value(x);
        };
        const cd surface = bracket(1.0) - bracket(0.0);
        CHECK(std::abs(r + 0.5 * surface) < 1e-8);
        CHECK(std::abs(pt_surface_term(phi, psi) - surface) < 1e-12);
    }
    SUBCASE("hermitian overlap line") {
        const BoxConfig c{1.0, {0.4, 0.0}};
        const Spectrum sp = solve_real_spectrum(c, 2);
        const WaveFunction f = from_mode(sp.modes[1]);
        CHECK(std::abs(pt_selfadjoint_residual(c, f, f)) < 1e-8);
    }
}

TEST_CASE("catastrophe_levels") {
    const auto a = catastrophe_levels({1.0, {0.0, 0.1}}, 3);
    REQUIRE(a.size() == 3);
    for (int n = 1; n <= 3; ++n) CHECK(std::abs(a[n - 1] - 1.0 / (kPi * n)) < 1e-15);
    const auto b = catastrophe_levels({kPi, {0.0, 0.1}}, 3);
    for (int n = 1; n <= 3; ++n) CHECK(std::abs(b[n - 1] - 1.0 / n) < 1e-15);
    const WaveFunction psi = raw_mode(1, 1.0, 1.0 / kPi);
    CHECK(std::abs(pt_inner(psi, psi)) < 1e-8);
    CHECK_THROWS_AS(catastrophe_levels({1.0, {0.2, 0.1}}, 3), std::invalid_argument);
}

TEST_CASE("C kernel") {
    const Spectrum sp = closed_form_modes({1.0, {0.0, 0.2}}, 24);
    const CKernel kernel(sp, 24);
    CHECK(kernel.n_terms() == 24);
    Rng rng(5);
    for (int t = 0; t < 20; ++t) {
        const double x = rng.uniform(0.0, 1.0), y = rng.uniform(0.0, 1.0);
        CHECK(c_kernel(x, y, kernel) == c_kernel(y, x, kernel));
    }
    // C psi_n = eps_n psi_n, where eps_n = (psi_n, psi_n)_PT = (-1)^n sgn(n).
    for (int n = 1; n <= 22; ++n) {
        const Mode& m = sp.modes[n - 1];
        const WaveFunction psi = from_mode(m);
        const double eps = pt_inner(psi, psi).real();
        CHECK(std::abs(std::abs(eps) - 1.0) < 1e-10);
        double worst = 0.0;
        for (int i = 0; i <= 10; ++i) {
            const double x = i / 10.0;
            worst = std::max(worst, std::abs(kernel.apply(psi, x) - eps * psi.value(x)));
        }
        CHECK(worst < 1e-6);
    }
    // C applied twice returns the input; C psi_3 is represented by its verified form eps_3 psi_3.
    const WaveFunction psi3 = from_mode(sp.modes[2]);
    const double eps3 = pt_inner(psi3, psi3).real();
    const WaveFunction cpsi = from_callable(
        1.0, [&](double x) { return eps3 * psi3.value(x); }, psi3.max_wavenumber);
    for (double x : {0.25, 0.6}) CHECK(std::abs(kernel.apply(cpsi, x) - psi3.value(x)) < 1e-6);
    CHECK_THROWS_AS(CKernel(sp, 30), std::invalid_argument);
    const Spectrum cat = closed_form_modes({1.0, {0.0, 0.3}}, 4);
    CHECK_NOTHROW(CKernel(cat, 4));
}

TEST_CASE("CPT inner product") {
    const Spectrum sp = closed_form_modes({1.0, {0.0, 0.1}}, 24);
    const Eigen::MatrixXcd g = gram_matrix(sp, 8, GramKind::cpt, 24);
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(8, 8);
    CHECK((g - id).cwiseAbs().maxCoeff() < 1e-6);
    const Eigen::MatrixXcd bio = gram_matrix(sp, 8, GramKind::biorthogonal);
    CHECK((bio - id).cwiseAbs().maxCoeff() < 1e-10);

    const CKernel kernel(sp, 24);
    Rng rng(7);
    for (int t = 0; t < 5; ++t) {
        std::vector<cd> c(6);
        for (auto& z : c) z = cd(rng.normal(), rng.normal());
        const WaveFunction psi = from_callable(
            1.0,
            [&](double x) {
                cd s = 0.0;
                for (int n = 0; n < 6; ++n) s += c[n] * eigenfunction_eval(sp.modes[n], x);
                return s;
            },
            sp.modes[5].k.real());
        const cd norm = cpt_inner(psi, psi, kernel);
        double expected = 0.0;
        for (const auto& z : c) expected += std::norm(z);
        CHECK(norm.real() > 0.0);
        CHECK(std::abs(norm - expected) < 1e-6 * expected);
    }
}

TEST_CASE("hermitian line: PT and canonical products differ by the parity sign") {
    const Spectrum sp = closed_form_modes({1.0, {0.0, 0.0}}, 5);
    for (const auto& m : sp.modes) {
        const WaveFunction f = from_mode(m);
        const double parity = m.n % 2 ? 1.0 : -1.0;
        CHECK(std::abs(pt_inner(f, f) - parity * canonical_inner(f, f)) < 1e-12);
    }
}
