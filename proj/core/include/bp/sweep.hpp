#pragma once

#include "bp/family.hpp"
#include "bp/spectral.hpp"
#include "bp/tolerances.hpp"

#include <vector>

namespace bp {

/// One grid point of a parameter sweep. Row order of values/norms/b_sq is the
/// tracked-state label, fixed by continuation from the sweep start (labels
/// start out ordered by descending unperturbed energy e_k(a_from)). Columns
/// of b_sq are the v = 0 basis states ordered by descending Re eps_k(a) at
/// this record's a, so b_sq(r, r) -> 1 away from crossings on both sides.
struct SweepRecord {
    double a = 0.0;
    std::vector<Complex> values;
    std::vector<double> norms;
    Eigen::MatrixXcd b_sq;
    double match_confidence = 1.0; // (best - second best)/best of this step's matching
    std::vector<int> dominant_level; // argmax_i |b(r, level i)|^2, level index per tracked state
    bool label_swap = false;         // this step's permutation was not the identity
    bool continuity_fault = false;   // |delta value| exceeded the Lipschitz bound
};

/// Permutation pi maximizing sum_R |<prev_R | cur_pi(R)>|, exact enumeration
/// for n <= 8, greedy + pairwise swaps above. Sum ties are broken by minimal
/// sum |delta value|; an unresolvable tie (relative margin < match_tie) throws
/// CertificationError advising step refinement. If confidence is non-null it
/// receives (best - second best)/best.
std::vector<int> match_states(const EigenSystem& prev, const EigenSystem& cur,
                              double* confidence = nullptr,
                              const Tolerances& tol = Tolerances::defaults());

/// State-tracked sweep over a real parameter grid with steps intervals
/// (steps + 1 points, so midpoints land on exact grid values). Adaptive mode
/// bisects intervals where any |delta b_sq| entry exceeds 0.05, up to depth 12,
/// and throws NumericalError naming the interval if the continuity bound is
/// still violated after maximal refinement.
std::vector<SweepRecord> sweep(const FamilySpec& spec, double a_from, double a_to, int steps,
                               bool adaptive, const Tolerances& tol = Tolerances::defaults());

struct CrossingEvent {
    double a_min = 0.0; // parabolically refined location of the gap minimum
    int r1 = 0;         // tracked-state pair, r1 < r2
    int r2 = 0;
    double gap_min = 0.0;
    bool exchanged = false;
    double mixing_halfwidth = 0.0; // at the default 0.25 threshold
    bool width_truncated = false;
    double cell = 0.0; // local grid spacing at the event
};

/// One event per interior local minimum of each pairwise gap |E_r - E_r'|.
/// exchanged is true when the dominant unperturbed level of each tracked
/// state differs between the two sides of the event.
std::vector<CrossingEvent> detect_avoided_crossings(const std::vector<SweepRecord>& records);

/// Half-width of the maximal interval around event.a_min where the pair's
/// off-diagonal |b_sq| stays >= threshold (0 < threshold < 0.5). Edges are
/// linearly interpolated between grid points; truncated reports whether the
/// interval was cut off by the sweep boundary.
double mixing_region_width(const std::vector<SweepRecord>& records, const CrossingEvent& event,
                           double threshold, bool* truncated = nullptr);

/// Smallest coupling v at which the mixing intervals of two adjacent
/// crossings start to intersect, scanned over ascending v_values and linearly
/// interpolated between the bracketing samples.
struct OnsetResult {
    bool reached = false;
    double v_onset = 0.0;
    double threshold = 0.25;
    struct Sample {
        double v = 0.0;
        double min_separation = 0.0; // gap between closest adjacent intervals, < 0 = overlap
    };
    std::vector<Sample> samples;
};

OnsetResult overlap_onset(const FamilySpec& spec, const std::vector<double>& v_values,
                          double threshold, const Tolerances& tol = Tolerances::defaults());

} // namespace bp
