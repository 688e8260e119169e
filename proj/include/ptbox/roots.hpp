#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace ptbox::roots {

using cd = std::complex<double>;
using AnalyticFn = std::function<cd(cd)>;

struct Rect {
    double re_min = 0.0;
    double re_max = 0.0;
    double im_min = 0.0;
    double im_max = 0.0;
};

struct Zero {
    cd z;
    int multiplicity = 1;
};

struct ContourOptions {
    double zero_distance = 1e-9;  // |f/f'| below this on the contour raises ContourOnZero
    double newton_tol = 1e-14;
    int max_newton = 60;
    int max_depth = 60;
    double min_size = 1e-9;
};

// (1/2 pi i) of the contour integrals of f'/f and z f'/f around the rectangle.
struct ContourMoments {
    cd count;
    cd first;
};

void validate(const Rect& r);
bool contains(const Rect& r, cd z, double slack = 0.0);

ContourMoments contour_moments(const AnalyticFn& f, const AnalyticFn& df, const Rect& r,
                               const ContourOptions& opt = {});
int winding_number(const AnalyticFn& f, const AnalyticFn& df, const Rect& r, const ContourOptions& opt = {});

// All zeros inside the rectangle, by recursive subdivision until each cell
// winds once, followed by Newton polish. Sorted by real then imaginary part.
std::vector<Zero> find_zeros(const AnalyticFn& f, const AnalyticFn& df, const Rect& r,
                             const ContourOptions& opt = {});

// Newton iteration; returns false if it fails to converge.
bool newton_polish(const AnalyticFn& f, const AnalyticFn& df, cd& z, const ContourOptions& opt = {});

// Central-difference derivative for callables without an analytic one.
AnalyticFn numeric_derivative(AnalyticFn f, double h = 1e-6);

}  // namespace ptbox::roots
