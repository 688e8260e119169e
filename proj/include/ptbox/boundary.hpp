#pragma once

#include <complex>
#include <string_view>

namespace ptbox {

using cd = std::complex<double>;

inline constexpr double kBoundaryTol = 1e-12;

// Robin data psi(0) = lambda1 psi'(0), psi(L) = lambda2 psi'(L).
struct BoundaryPair {
    cd lambda1;
    cd lambda2;
};

// PT-symmetric family lambda1 = ell1 + i ell2, lambda2 = -ell1 + i ell2.
struct PTBoundaryParams {
    double ell1 = 0.0;
    double ell2 = 0.0;
};

enum class BoundaryClass { hermitian, pt_symmetric, both, neither };

// Twisted ring condition psi(x + L) = lambda psi(x).
struct RingTwist {
    cd lambda;
};

struct RingSymmetry {
    bool pt = false;
    bool hermitian = false;
};

BoundaryPair pt_pair(const PTBoundaryParams& p);
BoundaryPair adjoint_pair(const BoundaryPair& bc);
BoundaryClass classify(const BoundaryPair& bc, double tol = kBoundaryTol);
RingSymmetry ring_is_pt(const RingTwist& twist, double tol = kBoundaryTol);

std::string_view to_string(BoundaryClass c);

}  // namespace ptbox
