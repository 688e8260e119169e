#include "ptbox/error.hpp"

#include <cmath>

namespace ptbox {

std::string_view to_string(Errc code) {
    switch (code) {
        case Errc::bracket_failure: return "BracketFailure";
        case Errc::contour_on_zero: return "ContourOnZero";
        case Errc::not_maximally_non_hermitian: return "NotMaximallyNonHermitian";
        case Errc::out_of_domain: return "OutOfDomain";
        case Errc::catastrophe_point: return "CatastrophePoint";
        case Errc::grid_mismatch: return "GridMismatch";
        case Errc::dimension_mismatch: return "DimensionMismatch";
        case Errc::not_self_adjoint: return "NotSelfAdjoint";
        case Errc::no_convergence: return "NoConvergence";
        case Errc::broken_pt: return "BrokenPT";
        case Errc::pole_at_interface: return "PoleAtInterface";
        case Errc::not_parity_symmetric: return "NotParitySymmetric";
        case Errc::degenerate_d: return "DegenerateD";
        case Errc::smatrix_pole: return "SMatrixPole";
        case Errc::delta_pole: return "DeltaPole";
        case Errc::unresolvable_resonance: return "UnresolvableResonance";
        case Errc::fit_diverged: return "FitDiverged";
        case Errc::multiple_peaks: return "MultiplePeaks";
        case Errc::defective_matrix: return "DefectiveMatrix";
        case Errc::coincident_points: return "CoincidentPoints";
    }
    return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(Errc code, const std::string& message) { throw Error(code, message); }

void require(bool condition, const std::string& message) {
    if (!condition) throw std::invalid_argument(message);
}

void require_finite(double value, const char* name) {
    if (!std::isfinite(value)) throw std::invalid_argument(std::string(name) + " must be finite");
}

}  // namespace ptbox
