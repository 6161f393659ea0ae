#pragma once

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <string_view>
#include <vector>

namespace bp {

using Complex = std::complex<double>;

/// One diagonal level of a parametrized family: energy e(a) = e0 + e_slope*a
/// and width c(a) = c0 + c_slope*a, both exactly linear in the (possibly
/// complex) parameter a. The complex diagonal entry is eps(a) = e(a) - (i/2) c(a).
struct LevelSpec {
    double e0 = 0.0;
    double e_slope = 0.0;
    double c0 = 0.0; // >= 0
    double c_slope = 0.0;

    Complex energy(Complex a) const { return Complex(e0) + e_slope * a; }
    Complex width(Complex a) const { return Complex(c0) + c_slope * a; }
    Complex eps(Complex a) const { return energy(a) - Complex(0.0, 0.5) * width(a); }
};

enum class CouplingMode { Uniform, Full };

/// Constant (a-independent) off-diagonal coupling. Uniform mode fills every
/// off-diagonal entry with the same scalar v; full mode carries an explicit
/// symmetric matrix with zero diagonal.
struct CouplingSpec {
    CouplingMode mode = CouplingMode::Uniform;
    Complex uniform_value{0.0, 0.0};
    Eigen::MatrixXcd full_matrix; // used only in Full mode

    Complex at(int i, int j) const;
    bool is_zero() const;
    bool is_real() const;
    /// Max-row-sum norm of the materialized coupling matrix.
    double max_row_sum(int n) const;
};

/// Declarative description of an N-level family H(a) with parameter-linear
/// diagonal and constant symmetric coupling.
struct FamilySpec {
    int n = 0;
    std::vector<LevelSpec> levels;
    CouplingSpec coupling;

    /// True when H(a) is real symmetric for every real a: all widths vanish
    /// and the coupling is real.
    bool hermitian_on_real_axis() const;

    /// Lipschitz bound on eigenvalue motion along the real axis:
    /// max_k(|e_slope| + |c_slope|/2) + 2 ||V||.
    double lipschitz_bound() const;
};

/// Throws ConfigError if any structural invariant is violated.
void validate_family(const FamilySpec& spec);

/// Parses a JSON family description (schema in the README). Unknown fields
/// are rejected; syntax errors are reported with a line number, semantic
/// errors with the offending field path.
FamilySpec parse_family(std::string_view config_text);

/// Canonical JSON echo of a spec; parse_family(family_to_json(s)) == s.
std::string family_to_json(const FamilySpec& spec);

/// H(a): diagonal eps_k(a), off-diagonal V. Always complex symmetric.
Eigen::MatrixXcd build_matrix(const FamilySpec& spec, Complex a);

struct LevelCrossing {
    int i = 0; // 0-based level indices, i < j
    int j = 0;
    Complex a_cr;
};

enum class DegeneratePairKind { Parallel, Identical };

struct DegeneratePair {
    int i = 0;
    int j = 0;
    DegeneratePairKind kind = DegeneratePairKind::Parallel;
};

struct CrossingReport {
    std::vector<LevelCrossing> crossings; // sorted by Re(a_cr), then Im, then (i, j)
    std::vector<DegeneratePair> degenerate;
};

/// Level pairs (i < j) with the unique parameter where eps_i(a) = eps_j(a).
/// Pairs whose diagonal difference is constant in a are classified as
/// parallel or identical instead of contributing a crossing.
CrossingReport unperturbed_crossings(const FamilySpec& spec);

} // namespace bp
