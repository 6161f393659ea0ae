#include "bp/branch_points.hpp"

#include "bp/errors.hpp"
#include "bp/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

namespace bp {

namespace {

std::string history_to_string(const std::vector<RootIterate>& history) {
    std::ostringstream os;
    os.precision(17);
    for (const auto& it : history)
        os << "  a = " << it.a << "  |F| = " << it.abs_f << "\n";
    return os.str();
}

// Scale for the discriminant residual: max pairwise squared splitting at a
// reference point (the search seed).
double discriminant_scale(const FamilySpec& spec, Complex reference, const Tolerances& tol) {
    const EigenSystem sys = eigendecompose_at(spec, reference, tol);
    double best = 0.0;
    for (int i = 0; i < sys.n(); ++i)
        for (int j = i + 1; j < sys.n(); ++j)
            best = std::max(best, std::norm(sys.pairs[i].value - sys.pairs[j].value));
    return std::max(best, 1e-300);
}

} // namespace

Complex discriminant(const FamilySpec& spec, Complex a, const Tolerances& tol) {
    const EigenSystem sys = eigendecompose_at(spec, a, tol);
    Complex prod(1.0, 0.0);
    for (int i = 0; i < sys.n(); ++i)
        for (int j = i + 1; j < sys.n(); ++j) {
            const Complex d = sys.pairs[i].value - sys.pairs[j].value;
            prod *= d * d;
        }
    return prod;
}

BranchPoint find_branch_point(const FamilySpec& spec, Complex seed, double tol_step,
                              const Tolerances& tol) {
    validate_family(spec);
    if (!(tol_step > 0.0))
        throw ConfigError("find_branch_point: tol must be positive");

    const auto f = [&](Complex a) { return discriminant(spec, a, tol); };

    std::vector<RootIterate> history;
    const auto record = [&](Complex a, Complex fa) {
        history.push_back({a, std::abs(fa)});
    };

    const double h = 1e-3 * std::max(1.0, std::abs(seed));
    Complex x0 = seed + Complex(h, 0.0);
    Complex x1 = seed + Complex(0.0, h);
    Complex x2 = seed;
    Complex f0 = f(x0);
    Complex f1 = f(x1);
    Complex f2 = f(x2);
    record(x2, f2);

    bool converged = false;
    for (int iter = 0; iter < 200; ++iter) {
        // Muller step from divided differences
        const Complex f21 = (f1 - f2) / (x1 - x2);
        const Complex f20 = (f0 - f2) / (x0 - x2);
        const Complex f10 = (f0 - f1) / (x0 - x1);
        const Complex w = f21 + f20 - f10;
        const Complex f210 = (f10 - f21) / (x0 - x2);
        if (w == Complex(0.0, 0.0) && f210 == Complex(0.0, 0.0))
            break;
        Complex r = std::sqrt(w * w - 4.0 * f2 * f210);
        if (std::abs(w - r) > std::abs(w + r))
            r = -r;
        const Complex denom = w + r;
        if (denom == Complex(0.0, 0.0))
            break;
        const Complex step = 2.0 * f2 / denom;
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
        x2 = x2 - step;
        f2 = f(x2);
        record(x2, f2);
        if (std::abs(step) <= tol_step * std::max(1.0, std::abs(x2)) ||
            f2 == Complex(0.0, 0.0)) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw NumericalError("find_branch_point: no convergence in 200 iterations from seed " +
                             std::to_string(seed.real()) + "+" + std::to_string(seed.imag()) +
                             "i; iterates:\n" + history_to_string(history));

    // secant polish on the last two iterates
    for (int k = 0; k < 4; ++k) {
        if (f2 == f1 || f2 == Complex(0.0, 0.0))
            break;
        const Complex xn = x2 - f2 * (x2 - x1) / (f2 - f1);
        const Complex fn = f(xn);
        if (!(std::abs(fn) < std::abs(f2)))
            break;
        x1 = x2;
        f1 = f2;
        x2 = xn;
        f2 = fn;
        record(x2, f2);
    }

    BranchPoint bp;
    bp.a_bp = x2;
    bp.history = std::move(history);

    const double scale = discriminant_scale(spec, seed, tol);
    bp.disc_residual = std::abs(f2);
    if (!(bp.disc_residual <= tol.disc_residual * scale))
        throw NumericalError("find_branch_point: converged iterate is not a discriminant root "
                             "(|F| = " + std::to_string(bp.disc_residual) + "); iterates:\n" +
                             history_to_string(bp.history));

    // coalescing pair: the two eigenvalues of minimal mutual distance
    const EigenSystem sys = eigendecompose_at(spec, bp.a_bp, tol);
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < sys.n(); ++i)
        for (int j = i + 1; j < sys.n(); ++j) {
            const double d = std::abs(sys.pairs[i].value - sys.pairs[j].value);
            if (d < best) {
                best = d;
                bp.r1 = i;
                bp.r2 = j;
            }
        }
    bp.value_bp = 0.5 * (sys.pairs[bp.r1].value + sys.pairs[bp.r2].value);

    // higher-order degeneracy: a third eigenvalue inside the collision cluster
    double value_scale = 0.0;
    for (const auto& p : sys.pairs)
        value_scale = std::max(value_scale, std::abs(p.value));
    const double cluster = std::max(100.0 * best, 1e-10 * std::max(1.0, value_scale));
    for (int k = 0; k < sys.n(); ++k) {
        if (k == bp.r1 || k == bp.r2)
            continue;
        if (std::abs(sys.pairs[k].value - bp.value_bp) <= cluster)
            throw NumericalError(
                "find_branch_point: higher-order degeneracy (three or more eigenvalues "
                "collide) at a = " + std::to_string(bp.a_bp.real()) + "+" +
                std::to_string(bp.a_bp.imag()) + "i");
    }

    // coalescence residual at the closest non-defective sample
    Complex dir = seed - bp.a_bp;
    if (dir == Complex(0.0, 0.0))
        dir = Complex(1.0, 0.0);
    dir /= std::abs(dir);
    const Complex near = bp.a_bp + dir * (1e-8 * std::max(1.0, std::abs(bp.a_bp)));
    const EigenSystem near_sys = eigendecompose_at(spec, near, tol);
    // pick the two eigenvalues closest to the degenerate value
    std::vector<int> order(near_sys.n());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return std::abs(near_sys.pairs[a].value - bp.value_bp) <
               std::abs(near_sys.pairs[b].value - bp.value_bp);
    });
    bp.coalescence = coalescence_residual(near_sys.pairs[order[0]], near_sys.pairs[order[1]]);
    return bp;
}

MonodromyResult encircle(const FamilySpec& spec, Complex center, double radius, int steps,
                         const Tolerances& tol) {
    validate_family(spec);
    if (steps < 64)
        throw ConfigError("encircle: steps must be >= 64");
    if (!(radius > 0.0))
        throw ConfigError("encircle: radius must be positive");

    const int n = spec.n;
    MonodromyResult result;
    result.loop_center = center;
    result.loop_radius = radius;
    result.steps = steps;

    const auto point = [&](int k) {
        const double phi = 2.0 * std::numbers::pi * static_cast<double>(k % steps) /
                           static_cast<double>(steps);
        return center + radius * Complex(std::cos(phi), std::sin(phi));
    };

    // clearance check: Newton estimate |F|/|F'| of the distance to a zero
    const double dh = radius * 1e-5;
    for (int k = 0; k < steps; k += std::max(1, steps / 64)) {
        const Complex a = point(k);
        const Complex fa = discriminant(spec, a, tol);
        const Complex fp =
            (discriminant(spec, a + Complex(dh, 0.0), tol) - discriminant(spec, a - Complex(dh, 0.0), tol)) /
            Complex(2.0 * dh, 0.0);
        if (fp != Complex(0.0, 0.0)) {
            const double dist = std::abs(fa) / std::abs(fp);
            if (dist < tol.loop_clearance)
                throw CertificationError(
                    "encircle: loop passes within clearance of a discriminant zero");
        }
    }

    EigenSystem prev = eigendecompose_at(spec, point(0), tol);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double worst_gap = 0.0;
    for (int k = 1; k <= steps; ++k) {
        const EigenSystem cur = eigendecompose_at(spec, point(k), tol);
        double conf = 1.0;
        std::vector<int> step;
        try {
            step = match_states(prev, cur, &conf, tol);
        } catch (const CertificationError& e) {
            throw CertificationError(std::string(e.what()) +
                                     " (monodromy loop; increase the number of steps)");
        }
        worst_gap = std::max(worst_gap, 1.0 - conf);
        for (int l = 0; l < n; ++l)
            perm[l] = step[perm[l]];
        prev = std::move(cur);
    }
    result.permutation = std::move(perm);
    result.max_tracking_gap = worst_gap;
    return result;
}

BranchPointList list_branch_points(const FamilySpec& spec, Complex lo, Complex hi, int grid,
                                   const Tolerances& tol) {
    validate_family(spec);
    if (grid < 4)
        throw ConfigError("list_branch_points: grid must be >= 4");
    if (!(lo.real() < hi.real() && lo.imag() < hi.imag()))
        throw ConfigError("list_branch_points: empty rectangle");

    BranchPointList result;
    if (spec.coupling.is_zero()) {
        result.coupling_free = true;
        return result;
    }

    const double dre = hi.real() - lo.real();
    const double dim = hi.imag() - lo.imag();
    const double step_tol = 1e-13;

    std::vector<BranchPoint> found;
    for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
            const Complex seed(lo.real() + dre * (i + 0.5) / grid,
                               lo.imag() + dim * (j + 0.5) / grid);
            BranchPoint bp;
            try {
                bp = find_branch_point(spec, seed, step_tol, tol);
            } catch (const Error&) {
                continue; // seed failed to converge or hit a higher-order cluster
            }
            if (bp.a_bp.real() < lo.real() || bp.a_bp.real() > hi.real() ||
                bp.a_bp.imag() < lo.imag() || bp.a_bp.imag() > hi.imag())
                continue;
            bool dup = false;
            for (auto& kept : found)
                if (std::abs(kept.a_bp - bp.a_bp) < tol.dedup_radius) {
                    if (bp.disc_residual < kept.disc_residual)
                        kept = bp;
                    dup = true;
                    break;
                }
            if (!dup)
                found.push_back(std::move(bp));
        }
    }

    // monodromy certification with a loop radius of half the distance to the
    // nearest other branch point, capped at 0.05
    for (auto& bp : found) {
        double nearest = std::numeric_limits<double>::infinity();
        for (const auto& other : found)
            if (&other != &bp)
                nearest = std::min(nearest, std::abs(other.a_bp - bp.a_bp));
        const double radius = std::min(0.05, nearest / 2.0);
        bp.certified = false;
        if (radius > 10.0 * tol.loop_clearance) {
            try {
                const MonodromyResult mono = encircle(spec, bp.a_bp, radius, 256, tol);
                // the coalescing pair at loop start: the two eigenvalues
                // closest to the degenerate value
                const EigenSystem start =
                    eigendecompose_at(spec, bp.a_bp + Complex(radius, 0.0), tol);
                std::vector<int> order(start.n());
                std::iota(order.begin(), order.end(), 0);
                std::sort(order.begin(), order.end(), [&](int a, int b) {
                    return std::abs(start.pairs[a].value - bp.value_bp) <
                           std::abs(start.pairs[b].value - bp.value_bp);
                });
                std::vector<int> expected(start.n());
                std::iota(expected.begin(), expected.end(), 0);
                std::swap(expected[order[0]], expected[order[1]]);
                bp.certified = (mono.permutation == expected);
            } catch (const Error&) {
                bp.certified = false;
            }
        }
    }

    std::sort(found.begin(), found.end(), [](const BranchPoint& a, const BranchPoint& b) {
        if (a.a_bp.real() != b.a_bp.real())
            return a.a_bp.real() < b.a_bp.real();
        return a.a_bp.imag() < b.a_bp.imag();
    });
    result.points = std::move(found);
    return result;
}

namespace {

double wrapped_arg_delta(double from, double to) {
    double d = to - from;
    while (d > std::numbers::pi)
        d -= 2.0 * std::numbers::pi;
    while (d < -std::numbers::pi)
        d += 2.0 * std::numbers::pi;
    return d;
}

// Phase change of the discriminant along a segment, bisecting until each
// sub-step turns by less than pi/2 so the winding cannot alias.
double segment_arg_delta(const FamilySpec& spec, Complex a0, Complex a1, Complex f0, Complex f1,
                         int depth, const Tolerances& tol) {
    if (f0 == Complex(0.0, 0.0) || f1 == Complex(0.0, 0.0))
        throw NumericalError("count_discriminant_zeros: zero on the contour");
    const double d = wrapped_arg_delta(std::arg(f0), std::arg(f1));
    if (std::abs(d) < std::numbers::pi / 2.0 || depth >= 24)
        return d;
    const Complex mid = 0.5 * (a0 + a1);
    const Complex fm = discriminant(spec, mid, tol);
    return segment_arg_delta(spec, a0, mid, f0, fm, depth + 1, tol) +
           segment_arg_delta(spec, mid, a1, fm, f1, depth + 1, tol);
}

} // namespace

int count_discriminant_zeros(const FamilySpec& spec, Complex lo, Complex hi,
                             int samples_per_side, const Tolerances& tol) {
    validate_family(spec);
    if (samples_per_side < 8)
        throw ConfigError("count_discriminant_zeros: samples_per_side must be >= 8");

    const Complex corners[5] = {lo, Complex(hi.real(), lo.imag()), hi,
                                Complex(lo.real(), hi.imag()), lo};

    double total = 0.0;
    for (int edge = 0; edge < 4; ++edge) {
        Complex a_prev = corners[edge];
        Complex f_prev = discriminant(spec, a_prev, tol);
        for (int k = 1; k <= samples_per_side; ++k) {
            const double t = static_cast<double>(k) / samples_per_side;
            const Complex a = corners[edge] + t * (corners[edge + 1] - corners[edge]);
            const Complex fa = discriminant(spec, a, tol);
            total += segment_arg_delta(spec, a_prev, a, f_prev, fa, 0, tol);
            a_prev = a;
            f_prev = fa;
        }
    }
    return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

} // namespace bp
