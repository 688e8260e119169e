#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ptbox {

enum class Errc {
    bracket_failure,
    contour_on_zero,
    not_maximally_non_hermitian,
    out_of_domain,
    catastrophe_point,
    grid_mismatch,
    dimension_mismatch,
    not_self_adjoint,
    no_convergence,
    broken_pt,
    pole_at_interface,
    not_parity_symmetric,
    degenerate_d,
    smatrix_pole,
    delta_pole,
    unresolvable_resonance,
    fit_diverged,
    multiple_peaks,
    defective_matrix,
    coincident_points,
};

std::string_view to_string(Errc code);

// Domain failures raised by the numerical routines. Precondition violations
// (non-finite input, bad sizes of user parameters) use std::invalid_argument.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message);
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& message);

void require(bool condition, const std::string& message);
void require_finite(double value, const char* name);

}  // namespace ptbox
