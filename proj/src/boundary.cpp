#include "ptbox/boundary.hpp"

#include <cmath>
#include <stdexcept>

namespace ptbox {

namespace {

void require_finite(cd z, const char* what) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw std::invalid_argument(std::string(what) + " must be finite (lambda = infinity is not supported)");
}

}  // namespace

BoundaryPair pt_pair(const PTBoundaryParams& p) {
    if (!std::isfinite(p.ell1) || !std::isfinite(p.ell2)) throw std::invalid_argument("pt_pair: ell must be finite");
    return {cd(p.ell1, p.ell2), cd(-p.ell1, p.ell2)};
}

BoundaryPair adjoint_pair(const BoundaryPair& bc) {
    require_finite(bc.lambda1, "lambda1");
    require_finite(bc.lambda2, "lambda2");
    return {std::conj(bc.lambda1), std::conj(bc.lambda2)};
}

BoundaryClass classify(const BoundaryPair& bc, double tol) {
    require_finite(bc.lambda1, "lambda1");
    require_finite(bc.lambda2, "lambda2");
    const bool hermitian = std::abs(bc.lambda1.imag()) <= tol && std::abs(bc.lambda2.imag()) <= tol;
    // PT-symmetric family: lambda2 = -conj(lambda1).
    const bool pt = std::abs(bc.lambda2 + std::conj(bc.lambda1)) <= tol;
    if (hermitian && pt) return BoundaryClass::both;
    if (hermitian) return BoundaryClass::hermitian;
    if (pt) return BoundaryClass::pt_symmetric;
    return BoundaryClass::neither;
}

RingSymmetry ring_is_pt(const RingTwist& twist, double tol) {
    require_finite(twist.lambda, "lambda");
    RingSymmetry s;
    s.pt = std::abs(twist.lambda.imag()) <= tol;
    s.hermitian = std::abs(std::abs(twist.lambda) - 1.0) <= tol;
    return s;
}

std::string_view to_string(BoundaryClass c) {
    switch (c) {
        case BoundaryClass::hermitian: return "Hermitian";
        case BoundaryClass::pt_symmetric: return "PTSymmetric";
        case BoundaryClass::both: return "Both";
        case BoundaryClass::neither: return "Neither";
    }
    return "Neither";
}

}  // namespace ptbox
