#pragma once

#include "bp/family.hpp"
#include "bp/spectral.hpp"
#include "bp/tolerances.hpp"

#include <vector>

namespace bp {

/// Spectral discriminant of H(a): the product over eigenvalue pairs of
/// (E_R - E_R')^2. Analytic in a, zero exactly at degeneracies; for n = 2 it
/// equals (eps1 - eps2)^2 + 4 v^2.
Complex discriminant(const FamilySpec& spec, Complex a,
                     const Tolerances& tol = Tolerances::defaults());

struct RootIterate {
    Complex a;
    double abs_f = 0.0;
};

struct BranchPoint {
    Complex a_bp;
    Complex value_bp; // degenerate eigenvalue (mean of the coalescing pair)
    int r1 = 0;       // coalescing pair, positions in the descending-Re ordering at a_bp
    int r2 = 1;
    double disc_residual = 0.0;
    double coalescence = 0.0; // coalescence_residual at the closest non-defective sample
    std::vector<RootIterate> history;
    bool certified = false; // set by list_branch_points after a monodromy check
};

/// Root of the discriminant from a complex seed: Muller iteration (bounded by
/// 200 steps) polished by secant steps. Throws NumericalError on
/// non-convergence (the message carries the iterate history) and on a root
/// where more than two eigenvalues collide ("higher-order degeneracy").
BranchPoint find_branch_point(const FamilySpec& spec, Complex seed, double tol_step = 1e-12,
                              const Tolerances& tol = Tolerances::defaults());

struct MonodromyResult {
    Complex loop_center;
    double loop_radius = 0.0;
    int steps = 0;
    std::vector<int> permutation; // 0-based: starting label -> ending label
    double max_tracking_gap = 0.0; // worst second-best/best matching ratio on the loop
};

/// Walks a closed circle in the parameter plane, tracking eigenvalue labels
/// with the sweep matcher, and returns the label permutation after one loop.
/// Requires steps >= 64; refuses circles passing too close to a discriminant
/// zero (estimated by |F|/|F'| sampling).
MonodromyResult encircle(const FamilySpec& spec, Complex center, double radius, int steps,
                         const Tolerances& tol = Tolerances::defaults());

struct BranchPointList {
    std::vector<BranchPoint> points; // ordered by (Re, Im)
    /// True when the coupling vanishes: the discriminant factorizes into the
    /// squared linear diagonal differences, whose zeros are the real
    /// unperturbed crossings (see unperturbed_crossings), not branch points.
    bool coupling_free = false;
};

/// Grid-seeded search over a rectangle [lo.re, hi.re] x [lo.im, hi.im]
/// (grid >= 4 seeds per side), deduplicated and monodromy-certified.
/// Points whose certification fails are returned flagged, not dropped.
BranchPointList list_branch_points(const FamilySpec& spec, Complex lo, Complex hi, int grid,
                                   const Tolerances& tol = Tolerances::defaults());

/// Number of discriminant zeros (with multiplicity) inside the rectangle,
/// by argument-principle contour integration along its boundary.
int count_discriminant_zeros(const FamilySpec& spec, Complex lo, Complex hi,
                             int samples_per_side = 512,
                             const Tolerances& tol = Tolerances::defaults());

} // namespace bp
