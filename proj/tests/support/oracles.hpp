#pragma once

// Test-only oracles, kept independent of the library implementation paths
// they are used to check. Closed forms below are for the two-level family
//   e1(a) = 1 - a/2,  e2(a) = a,  c = 0,  uniform real coupling v,
// whose diagonal gap is eps1 - eps2 = 1 - (3/2) a.

#include <Eigen/Dense>

#include <complex>
#include <random>
#include <vector>

namespace oracles {

using Complex = std::complex<double>;

// ---- two-level closed forms -------------------------------------------------

// Root of (eps1 - eps2)^2 + 4 v^2 = 0 with positive imaginary part:
// 1 - (3/2) a = -2 i v  =>  a = 2/3 + (4/3) v i.
inline Complex a_branch(double v) {
    return {2.0 / 3.0, 4.0 / 3.0 * v};
}

// Degenerate eigenvalue (eps1 + eps2)/2 = 1/2 + a/4 at the branch point.
inline Complex value_branch(double v) {
    return Complex(0.5, 0.0) + 0.25 * a_branch(v);
}

// Half-gap between the diagonal entries.
inline Complex delta(Complex a) {
    return 0.5 * (Complex(1.0, 0.0) - 1.5 * a);
}

// Squared mixing of an energy-sorted eigenstate with the other sorted
// unperturbed level, real a: (1 - |d|/r)/2 with r = sqrt(d^2 + v^2).
inline double b2_off(double a, double v) {
    const double d = delta(Complex(a, 0.0)).real();
    const double r = std::sqrt(d * d + v * v);
    return 0.5 * (1.0 - std::abs(d) / r);
}

// Half-width of { a : b2_off(a, v) >= theta }: the condition |d| <= beta r
// with beta = 1 - 2 theta gives |a - 2/3| <= (4/3) v beta / sqrt(1 - beta^2).
inline double mixing_halfwidth(double v, double theta) {
    const double beta = 1.0 - 2.0 * theta;
    return (4.0 / 3.0) * v * beta / std::sqrt(1.0 - beta * beta);
}

// Along the ray a(t) = 2/3 + i t (4/3) v toward the branch point the complex
// rotation angle solves tan 2phi = i/t: e^{2i(2phi)} = (t-1)/(t+1), i.e.
// phi = pi/4 + (i/4) ln((2-s)/s) with s = 1 - t. The Hermitian norms are
// |Phi|^2 = cosh 2y, y = Im phi (independent of v).
inline double biorth_norm(double t) {
    const double s = 1.0 - t;
    const double e2y = std::sqrt((2.0 - s) / s);
    return 0.5 * (e2y + 1.0 / e2y);
}

// Same ray: min over signs of || u1 -+ i u2 || for the Hermitian-unit
// eigenvectors is 2/sqrt(e^{4y} + 1), which collapses to exactly sqrt(2 s).
inline double coalescence(double t) {
    return std::sqrt(2.0 * (1.0 - t));
}

// ---- generic oracles --------------------------------------------------------

// Characteristic polynomial evaluated by LU determinant of (M - lambda I);
// independent of any eigenvector route.
inline Complex char_poly(const Eigen::MatrixXcd& m, Complex lambda) {
    const Eigen::MatrixXcd shifted =
        m - lambda * Eigen::MatrixXcd::Identity(m.rows(), m.cols());
    return Eigen::PartialPivLU<Eigen::MatrixXcd>(shifted).determinant();
}

inline double max_row_sum(const Eigen::MatrixXcd& m) {
    double best = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        best = std::max(best, m.row(i).cwiseAbs().sum());
    return best;
}

// Random complex symmetric matrix, entries ~ N(0, 1) + i N(0, 1) symmetrized.
inline Eigen::MatrixXcd random_complex_symmetric(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const Complex z(gauss(rng), gauss(rng));
            m(i, j) = z;
            m(j, i) = z;
        }
    return m;
}

// Random real symmetric matrix (the Hermitian regime).
inline Eigen::MatrixXcd random_real_symmetric(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const Complex z(gauss(rng), 0.0);
            m(i, j) = z;
            m(j, i) = z;
        }
    return m;
}

// Random real orthonormal basis from a QR factorization.
inline Eigen::MatrixXd random_orthonormal(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m(i, j) = gauss(rng);
    return Eigen::HouseholderQR<Eigen::MatrixXd>(m).householderQ();
}

// Dense-grid scan of |eps_i - eps_j| used to confirm reported real crossings.
struct GridMin {
    double a = 0.0;
    double value = 0.0;
};

template <typename EpsFn>
GridMin grid_minimum(EpsFn&& gap, double a_from, double a_to, int samples) {
    GridMin best{a_from, gap(a_from)};
    for (int k = 1; k <= samples; ++k) {
        const double a = a_from + (a_to - a_from) * static_cast<double>(k) / samples;
        const double g = gap(a);
        if (g < best.value)
            best = {a, g};
    }
    return best;
}

} // namespace oracles
