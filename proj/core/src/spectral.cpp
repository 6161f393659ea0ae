#include "bp/spectral.hpp"

#include "bp/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace bp {

namespace {

std::string matrix_to_string(const Eigen::MatrixXcd& m) {
    std::ostringstream os;
    os.precision(17);
    os << m;
    return os.str();
}

} // namespace

bool EigenSystem::any_defective() const {
    return std::any_of(pairs.begin(), pairs.end(),
                       [](const EigenPair& p) { return p.defective; });
}

double max_row_sum_norm(const Eigen::MatrixXcd& m) {
    double best = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        best = std::max(best, m.row(i).cwiseAbs().sum());
    return best;
}

void fix_sign(Eigen::VectorXcd& v) {
    Eigen::Index k = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double m = std::norm(v[i]);
        if (m > best) {
            best = m;
            k = i;
        }
    }
    const Complex c = v[k];
    if (c.real() < 0.0 || (c.real() == 0.0 && c.imag() < 0.0))
        v = -v;
}

EigenSystem eigendecompose(const Eigen::MatrixXcd& m, const Tolerances& tol) {
    const Eigen::Index n = m.rows();
    if (n != m.cols() || n < 2 || n > 64)
        throw ConfigError("eigendecompose requires a square matrix with 2 <= n <= 64");
    const double scale = std::max(1e-300, m.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            if (std::abs(m(i, j) - m(j, i)) > 1e-12 * scale)
                throw ConfigError("eigendecompose requires a complex symmetric matrix");

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success)
        throw NumericalError("eigendecomposition did not converge for matrix:\n" +
                             matrix_to_string(m));

    EigenSystem sys;
    sys.matrix = m;
    sys.pairs.reserve(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        EigenPair pair;
        pair.value = solver.eigenvalues()[k];
        Eigen::VectorXcd vec = solver.eigenvectors().col(k);
        vec /= vec.norm(); // unit Hermitian norm
        const Complex c_sq = (vec.array() * vec.array()).sum();
        pair.c_norm_sq = c_sq;
        if (std::abs(c_sq) < tol.defective_ratio * vec.squaredNorm()) {
            pair.defective = true;
        } else {
            vec /= std::sqrt(c_sq);
        }
        fix_sign(vec);
        pair.vector = std::move(vec);
        sys.pairs.push_back(std::move(pair));
    }

    std::sort(sys.pairs.begin(), sys.pairs.end(), [](const EigenPair& a, const EigenPair& b) {
        if (a.value.real() != b.value.real())
            return a.value.real() > b.value.real();
        return a.value.imag() > b.value.imag();
    });

    const double mnorm = max_row_sum_norm(m);
    for (const auto& pair : sys.pairs) {
        const double residual =
            (m * pair.vector - pair.value * pair.vector).norm() / pair.vector.norm();
        if (!(residual <= tol.eig_residual * std::max(mnorm, 1e-300)))
            throw NumericalError("eigenpair residual " + std::to_string(residual) +
                                 " exceeds tolerance for matrix:\n" + matrix_to_string(m));
    }
    Complex sum(0.0, 0.0);
    for (const auto& pair : sys.pairs)
        sum += pair.value;
    const Complex tr = m.trace();
    if (!(std::abs(sum - tr) <= tol.trace_rel * (1.0 + std::abs(tr))))
        throw NumericalError("eigenvalue sum deviates from trace for matrix:\n" +
                             matrix_to_string(m));
    return sys;
}

EigenSystem eigendecompose_at(const FamilySpec& spec, Complex a, const Tolerances& tol) {
    EigenSystem sys = eigendecompose(build_matrix(spec, a), tol);
    sys.parameter = a;
    return sys;
}

std::pair<Complex, Complex> closed_form_2x2(Complex eps1, Complex eps2, Complex v) {
    const Complex mean = 0.5 * (eps1 + eps2);
    const Complex d = eps1 - eps2;
    const Complex root = std::sqrt(d * d + 4.0 * v * v);
    return {mean + 0.5 * root, mean - 0.5 * root};
}

BiorthMetrics biorthogonality_metrics(const EigenSystem& sys) {
    const int n = sys.n();
    BiorthMetrics metrics;
    metrics.norms.resize(n);
    metrics.overlaps.resize(n, n);
    const double inf = std::numeric_limits<double>::infinity();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (int r = 0; r < n; ++r)
        metrics.norms[r] = sys.pairs[r].defective ? inf : sys.pairs[r].vector.squaredNorm();
    for (int rp = 0; rp < n; ++rp) {
        for (int r = 0; r < n; ++r) {
            if (sys.pairs[rp].defective || sys.pairs[r].defective) {
                metrics.overlaps(rp, r) = Complex(nan, nan);
                continue;
            }
            metrics.overlaps(rp, r) = sys.pairs[rp].vector.dot(sys.pairs[r].vector);
            if (rp != r)
                metrics.max_offdiag_real =
                    std::max(metrics.max_offdiag_real, std::abs(metrics.overlaps(rp, r).real()));
        }
    }
    metrics.max_norm = metrics.norms.maxCoeff();
    return metrics;
}

double coalescence_residual(const EigenPair& p1, const EigenPair& p2) {
    const double n1 = p1.vector.norm();
    const double n2 = p2.vector.norm();
    if (n1 == 0.0 || n2 == 0.0)
        throw Error("coalescence_residual: zero vector");
    const Eigen::VectorXcd u1 = p1.vector / n1;
    const Eigen::VectorXcd u2 = p2.vector / n2;
    const Complex i_unit(0.0, 1.0);
    const double plus = (u1 - i_unit * u2).norm();
    const double minus = (u1 + i_unit * u2).norm();
    return std::min(plus, minus);
}

MixingMatrix mixing_coefficients(const EigenSystem& sys, const Eigen::MatrixXd& basis,
                                 const Tolerances& tol) {
    const int n = sys.n();
    if (basis.rows() != n || basis.cols() != n)
        throw Error("mixing_coefficients: basis must be n x n");
    const Eigen::MatrixXd gram = basis.transpose() * basis;
    const double departure =
        (gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
    if (departure > tol.basis_orth)
        throw Error("mixing_coefficients: basis is not orthonormal (departure " +
                    std::to_string(departure) + ")");
    MixingMatrix mm;
    mm.b.resize(n, n);
    for (int r = 0; r < n; ++r)
        for (int i = 0; i < n; ++i) {
            Complex acc(0.0, 0.0);
            for (int k = 0; k < n; ++k)
                acc += basis(k, i) * sys.pairs[r].vector[k];
            mm.b(r, i) = acc;
        }
    mm.b_sq = mm.b.array().square();
    return mm;
}

} // namespace bp
