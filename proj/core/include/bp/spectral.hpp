#pragma once

#include "bp/family.hpp"
#include "bp/tolerances.hpp"

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace bp {

/// One eigenvalue/eigenvector of a complex symmetric matrix. Non-defective
/// vectors are c-normalized, (Phi)^2 = sum_k Phi_k^2 = 1 (no conjugation),
/// with the sign fixed so that the component of largest modulus has a
/// positive real part (ties broken by lowest index, Re = 0 by positive
/// imaginary part). Defective vectors are left with unit Hermitian norm.
struct EigenPair {
    Complex value;
    Eigen::VectorXcd vector;
    Complex c_norm_sq; // (Phi)^2 of the unit-norm vector before rescaling
    bool defective = false;
};

struct EigenSystem {
    Eigen::MatrixXcd matrix;
    std::vector<EigenPair> pairs; // descending Re(value), ties by descending Im
    Complex parameter{0.0, 0.0};  // a at which the matrix was built, when known

    int n() const { return static_cast<int>(pairs.size()); }
    bool any_defective() const;
};

/// Dense eigendecomposition of a complex symmetric matrix, 2 <= n <= 64.
/// Throws NumericalError (carrying the matrix in its message) if the solver
/// fails to converge or a residual / trace invariant is violated.
EigenSystem eigendecompose(const Eigen::MatrixXcd& m,
                           const Tolerances& tol = Tolerances::defaults());

/// build_matrix + eigendecompose, tagging the parameter.
EigenSystem eigendecompose_at(const FamilySpec& spec, Complex a,
                              const Tolerances& tol = Tolerances::defaults());

/// Eigenvalues of [[eps1, v], [v, eps2]]:
///   (eps1+eps2)/2 +- (1/2) sqrt((eps1-eps2)^2 + 4 v^2),
/// principal square root (argument in (-pi/2, pi/2]). Returned as (plus, minus).
std::pair<Complex, Complex> closed_form_2x2(Complex eps1, Complex eps2, Complex v);

/// Hermitian-product diagnostics of a c-normalized system. Defective states
/// get norms[R] = +infinity and NaN overlap entries.
struct BiorthMetrics {
    Eigen::VectorXd norms;     // |Phi_R|^2 = <Phi_R|Phi_R>, >= 1
    Eigen::MatrixXcd overlaps; // overlaps(R', R) = <Phi_R'|Phi_R>
    double max_norm = 0.0;
    /// Largest |Re <Phi_R'|Phi_R>|, R' != R. The off-diagonal Hermitian
    /// overlap is provably purely imaginary for n = 2; for larger n it is
    /// measured and reported here rather than assumed.
    double max_offdiag_real = 0.0;
};

BiorthMetrics biorthogonality_metrics(const EigenSystem& sys);

/// Distance of the pair from the coalescence relation Phi_1 -> +-i Phi_2:
/// min over s in {+1, -1} of ||u1 - s i u2|| with u_k the Hermitian-unit
/// rescaled vectors. Lies in [0, 2] and tends to 0 at a branch point.
/// Throws on a zero vector.
double coalescence_residual(const EigenPair& p1, const EigenPair& p2);

/// Expansion of each eigenvector over a real orthonormal basis:
/// b(R, i) = sum_k basis(k, i) vector_R(k), b_sq = elementwise square.
struct MixingMatrix {
    Eigen::MatrixXcd b;
    Eigen::MatrixXcd b_sq;
};

MixingMatrix mixing_coefficients(const EigenSystem& sys, const Eigen::MatrixXd& basis,
                                 const Tolerances& tol = Tolerances::defaults());

/// Sign convention shared by eigendecompose and the tests: flip v so the
/// largest-modulus component has Re > 0 (tie: lowest index; Re == 0: Im > 0).
void fix_sign(Eigen::VectorXcd& v);

/// Max-row-sum norm.
double max_row_sum_norm(const Eigen::MatrixXcd& m);

} // namespace bp
