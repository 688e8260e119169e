#pragma once

#include "ptbox/boundary.hpp"
#include "ptbox/roots.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace ptbox {

// Units hbar = m = 1.
struct BoxConfig {
    double length = 1.0;
    PTBoundaryParams boundary;
};

void validate(const BoxConfig& config);

inline constexpr double kImagTol = 1e-8;          // |Im k| above this counts as off-axis
inline constexpr double kCatastropheTol = 1e-10;  // |1 - k^2 ell2^2| guard

enum class ModeKind {
    standing,        // member of the n-indexed ladder
    unidirectional,  // ell1 = 0 only: k = 1/|ell2|, psi ~ exp(-i x / ell2)
    complex_pair,    // broken PT root
};

// psi(x) = coeff_a exp(ikx) + coeff_b exp(-ikx); the coefficients already
// include the normalization `norm`.
struct Mode {
    int n = 0;
    cd k;
    cd energy;
    cd coeff_a;
    cd coeff_b;
    cd norm{1.0, 0.0};
    cd adjoint_norm{1.0, 0.0};
    std::optional<int> pt_eigenvalue;
    ModeKind kind = ModeKind::standing;
    double length = 1.0;
};

struct Spectrum {
    BoxConfig config;
    std::vector<Mode> modes;           // standing ladder (or all roots when broken), sorted by Re k
    std::vector<Mode> unidirectional;  // extra ell1 = 0 root, not part of the ladder
    bool broken = false;
    bool normalized = false;
};

enum class Normalization { biorthogonal, none };

// Cleared quantization condition f(k) = e^{2ikL} D(k) - N(k).
cd quantization_residual(cd k, const BoxConfig& config);
cd quantization_residual_derivative(cd k, const BoxConfig& config);
double residual_scale(cd k, const BoxConfig& config);

Spectrum solve_real_spectrum(const BoxConfig& config, int n_max);

struct PTPair {
    cd k;
    cd partner;                 // -conj(k)
    double partner_residual;    // |f(-conj k)| / scale
    bool partner_in_roots;      // -conj(k) also lies in the searched region
    bool conjugate_in_roots;    // conj(k) found (k -> -k symmetry of f)
};

struct ComplexRootReport {
    std::vector<cd> roots;     // k = 0 excluded
    std::vector<cd> off_axis;  // |Im k| > kImagTol
    std::vector<PTPair> pairs;
    bool broken = false;
};

ComplexRootReport solve_complex_roots(const BoxConfig& config, const roots::Rect& region);

// Modes built from a root list (e.g. complex search results); not normalized.
Spectrum spectrum_from_roots(const BoxConfig& config, const std::vector<cd>& roots);

Spectrum closed_form_modes(const BoxConfig& config, int n_max,
                           Normalization normalization = Normalization::biorthogonal);

// Unnormalized mode at a root; real k gets its phase fixed so PT psi = +-psi.
Mode make_mode(const BoxConfig& config, int n, cd k, ModeKind kind);

Spectrum normalize_biorthogonal(Spectrum spectrum);
Mode normalize_mode(Mode mode, const BoxConfig& config);
Mode with_unit_norm(const Mode& mode);

// Integral of psi^2 over the box, computed in closed form.
cd self_overlap(const Mode& mode);

cd eigenfunction_eval(const Mode& mode, double x);
cd eigenfunction_derivative(const Mode& mode, double x, int order = 1);
cd adjoint_eigenfunction_eval(const Mode& mode, double x);
cd adjoint_eigenfunction_derivative(const Mode& mode, double x, int order = 1);

std::function<cd(double)> pt_image(const Mode& mode);
std::function<cd(double)> pt_image(std::function<cd(double)> f, double length);

}  // namespace ptbox
