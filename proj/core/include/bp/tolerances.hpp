#pragma once

namespace bp {

/// Numerical tolerances used across the toolkit. Defaults are tuned for
/// double precision; every value can be rescaled globally through the
/// BP_TOLERANCE_SCALE environment variable (a positive multiplier).
struct Tolerances {
    double c_norm_unit     = 1e-10; // |(Phi)^2 - 1| after c-normalization
    double eig_residual    = 1e-9;  // ||M v - lambda v|| / ||v||, relative to ||M||
    double trace_rel       = 1e-10; // eigenvalue-sum vs trace, relative
    double c_orth          = 1e-8;  // B B^T = I departure
    double norm_floor      = 1e-10; // |Phi|^2 >= 1 - norm_floor
    double defective_ratio = 1e-12; // |(Phi)^2| < ratio * <Phi|Phi> marks defective
    double basis_orth      = 1e-10; // orthonormality check on mixing bases
    double match_tie       = 1e-9;  // relative margin below which a matching is ambiguous
    double dedup_radius    = 1e-6;  // branch-point deduplication distance
    double loop_clearance  = 1e-6;  // minimum distance of a monodromy loop to a zero
    double disc_residual   = 1e-10; // |discriminant| at a converged root, relative to scale
    double mixing_row_sum  = 1e-8;  // sum_i b^2 = 1 departure
    double root_step       = 1e-12; // root-search termination on |delta a|
    double sweep_slack     = 1e-9;  // absolute slack in the sweep continuity bound

    /// Defaults with BP_TOLERANCE_SCALE applied (read once per process).
    static const Tolerances& defaults();

    /// Copy with every field multiplied by s (s > 0).
    Tolerances scaled(double s) const;
};

} // namespace bp
