#pragma once

#include "ptbox/em_scattering.hpp"

#include <array>
#include <optional>
#include <string_view>

namespace ptbox::em {

enum class ResonanceParity { even, odd };

std::string_view to_string(ResonanceParity p);

struct ResonanceFit {
    double k_c = 0.0;
    double Q = 0.0;
    double Z = 1.0;
    double Delta = 0.0;
    double Q2 = 0.0;
    std::optional<ResonanceParity> parity;
    double residual = 0.0;
    double rho = 1.0;         // fitted (|rL|^2 / |rR|^2)^{1/4}
    double zero_left = 0.0;   // detuning of the r_L minimum
    double zero_right = 0.0;  // detuning of the r_R minimum
};

// Closed-form near-resonance parameters. k_c is the resonance of the given
// parity nearest k_hint (the smallest positive one by default).
ResonanceFit resonance_predict(const SlabParams& p, double delta, ResonanceParity parity, double k_hint = 0.0);

// Second-order expansion of the exact double-barrier response: width
// 1/Q = 2 delta sqrt(cosh^2 theta (sinh^2 theta + s)) / (1 + s), s = sinh^2 mu cosh^2 theta,
// and reflection zeros at q = -+ atan(tanh mu / sinh theta) / delta.
ResonanceFit resonance_linearized(const SlabParams& p, double delta, ResonanceParity parity, double k_hint = 0.0);

ResonanceParity detect_parity(const DoubleBarrier& db, double k_c);

// Least-squares fit of |t|^2 = 1/(Z^2 + q^2/Q^2) and of each reflection to
// A (q - q0)^2 / (1 + q^2/(Z Q)^2) over rows with k in [k_lo, k_hi].
ResonanceFit fit_lineshape(const std::vector<SweepRow>& rows, double k_lo, double k_hi,
                           const DoubleBarrier* barrier = nullptr);

// Window around the highest transmission peak bounded by the neighbouring minima.
std::array<double, 2> peak_window(const std::vector<SweepRow>& rows);

struct SEigenSystem {
    std::array<cd, 2> values;
    std::array<Eigen::Vector2cd, 2> vectors;  // unit norm
    cd overlap;                               // v1^dagger v2
};

SEigenSystem smatrix_eigensystem(const ScatteringMatrix& s);

// Near-resonance S matrix of the mu = 0 double barrier.
ScatteringMatrix near_resonance_smatrix(double rho, double q_over_Q, double phi, ResonanceParity parity);

struct InterferencePower {
    double incident = 0.0;
    double transmitted = 0.0;
};

InterferencePower interference_power(cd alpha, cd beta, double rho, double xi);

}  // namespace ptbox::em
