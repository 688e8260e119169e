#pragma once

#include "ptbox/boundary.hpp"
#include "ptbox/roots.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace ptbox::em {

using Mat2 = Eigen::Matrix2cd;

// Units c = mu0 = 1. n = sqrt(eps_r mu_r); an absorber has Im n > 0.
struct MediumParams {
    cd n{1.0, 0.0};
    cd mu_r{1.0, 0.0};
};

enum class Side { left, right };

// (C, D) = T (A, B) for fields A e^{ikx} + B e^{-ikx} left and
// C e^{ikx} + D e^{-ikx} right of the scatterer.
struct TransferMatrix {
    Mat2 m = Mat2::Identity();
    double k = 0.0;
};

struct SlabParams {
    double rho = 1.0;
    double mu = 0.0;
    double theta = 0.0;
    double phi = 0.0;
};

// Outgoing (C, B) = [[tL, rR], [rL, tR]] (A, D).
struct ScatteringMatrix {
    cd t_left, t_right, r_left, r_right;
    Mat2 matrix() const;
};

struct DoubleBarrier {
    SlabParams slab;
    double delta = 1.0;
};

cd interface_reflection(const MediumParams& medium, Side side);

// Box walls of the PT boundary family seen as mirrors; r_L r_R e^{2ikL} = 1
// reproduces the cleared quantization condition.
cd box_reflection(cd k, const PTBoundaryParams& p, Side side);

std::vector<cd> cavity_modes(cd r_left, cd r_right, double length, const roots::Rect& region);
std::vector<cd> cavity_modes(const std::function<cd(cd)>& r_left, const std::function<cd(cd)>& r_right,
                             double length, const roots::Rect& region);

TransferMatrix transfer_from_params(const SlabParams& p, double k = 0.0);
SlabParams params_from_transfer(const TransferMatrix& t);
TransferMatrix physical_slab_transfer(const MediumParams& medium, double thickness, double k);
TransferMatrix time_reverse(const TransferMatrix& t);
TransferMatrix shift(const TransferMatrix& t, double delta, double k);
TransferMatrix compose(const TransferMatrix& right, const TransferMatrix& left);
ScatteringMatrix to_smatrix(const TransferMatrix& t);

// Absorber centred at -delta/2 followed by its time-reversed partner at +delta/2.
TransferMatrix double_barrier_transfer(const DoubleBarrier& db, double k);
TransferMatrix double_barrier_transfer(const TransferMatrix& absorber, double delta, double k);

struct SweepRow {
    double k = 0.0;
    double t2 = 0.0;
    double rl2 = 0.0;
    double rr2 = 0.0;
    double al2 = 0.0;
    double ar2 = 0.0;
    bool pole = false;
    ScatteringMatrix s;
};

using TransferBuilder = std::function<TransferMatrix(double)>;

std::vector<SweepRow> transmission_sweep(const DoubleBarrier& db, const std::vector<double>& k_grid, int jobs = 1);
std::vector<SweepRow> transmission_sweep(const TransferBuilder& builder, const std::vector<double>& k_grid,
                                         int jobs = 1);

std::vector<double> linear_grid(double k_min, double k_max, int steps);

}  // namespace ptbox::em
