#include "bp/sweep.hpp"

#include "bp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

namespace bp {

namespace {

Eigen::MatrixXd overlap_table(const EigenSystem& prev, const EigenSystem& cur) {
    const int n = prev.n();
    Eigen::MatrixXd table(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            const Complex ov = prev.pairs[r].vector.dot(cur.pairs[c].vector);
            table(r, c) = std::abs(ov) /
                          (prev.pairs[r].vector.norm() * cur.pairs[c].vector.norm());
        }
    return table;
}

double perm_sum(const Eigen::MatrixXd& table, const std::vector<int>& perm) {
    double s = 0.0;
    for (std::size_t r = 0; r < perm.size(); ++r)
        s += table(static_cast<int>(r), perm[r]);
    return s;
}

double perm_value_distance(const EigenSystem& prev, const EigenSystem& cur,
                           const std::vector<int>& perm) {
    double s = 0.0;
    for (std::size_t r = 0; r < perm.size(); ++r)
        s += std::abs(prev.pairs[r].value - cur.pairs[perm[r]].value);
    return s;
}

// Greedy assignment plus pairwise-swap improvement, for n > 8.
std::vector<int> greedy_assignment(const Eigen::MatrixXd& table) {
    const int n = static_cast<int>(table.rows());
    std::vector<int> perm(n, -1);
    std::vector<bool> taken(n, false);
    for (int pass = 0; pass < n; ++pass) {
        int best_r = -1, best_c = -1;
        double best = -1.0;
        for (int r = 0; r < n; ++r) {
            if (perm[r] >= 0)
                continue;
            for (int c = 0; c < n; ++c) {
                if (taken[c])
                    continue;
                if (table(r, c) > best) {
                    best = table(r, c);
                    best_r = r;
                    best_c = c;
                }
            }
        }
        perm[best_r] = best_c;
        taken[best_c] = true;
    }
    bool improved = true;
    while (improved) {
        improved = false;
        for (int r1 = 0; r1 < n; ++r1)
            for (int r2 = r1 + 1; r2 < n; ++r2) {
                const double cur = table(r1, perm[r1]) + table(r2, perm[r2]);
                const double swapped = table(r1, perm[r2]) + table(r2, perm[r1]);
                if (swapped > cur) {
                    std::swap(perm[r1], perm[r2]);
                    improved = true;
                }
            }
    }
    return perm;
}

} // namespace

std::vector<int> match_states(const EigenSystem& prev, const EigenSystem& cur,
                              double* confidence, const Tolerances& tol) {
    const int n = prev.n();
    if (cur.n() != n)
        throw Error("match_states: dimension mismatch");
    if (prev.any_defective() || cur.any_defective())
        throw NumericalError("match_states requires non-defective systems");

    const Eigen::MatrixXd table = overlap_table(prev, cur);

    std::vector<int> best_perm;
    double best_sum = -1.0;
    double second_sum = -1.0;
    double best_dist = std::numeric_limits<double>::infinity();

    if (n <= 8) {
        const double tie = tol.match_tie;
        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        do {
            const double s = perm_sum(table, perm);
            if (s > best_sum + tie * std::max(1.0, best_sum)) {
                if (!best_perm.empty())
                    second_sum = std::max(second_sum, best_sum);
                best_sum = s;
                best_perm = perm;
                best_dist = perm_value_distance(prev, cur, perm);
            } else if (s > best_sum - tie * std::max(1.0, best_sum)) {
                // overlap-sum tie: prefer smaller total eigenvalue motion
                const double d = perm_value_distance(prev, cur, perm);
                second_sum = std::max(second_sum, std::min(s, best_sum));
                if (d < best_dist * (1.0 - tie)) {
                    best_sum = std::max(best_sum, s);
                    best_perm = perm;
                    best_dist = d;
                } else if (d < best_dist * (1.0 + tie) && perm != best_perm) {
                    throw CertificationError(
                        "match_states: degenerate matching tie; refine the step size");
                }
            } else {
                second_sum = std::max(second_sum, s);
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
    } else {
        best_perm = greedy_assignment(table);
        best_sum = perm_sum(table, best_perm);
        // second best approximated by the best single transposition
        for (int r1 = 0; r1 < n; ++r1)
            for (int r2 = r1 + 1; r2 < n; ++r2) {
                std::vector<int> alt = best_perm;
                std::swap(alt[r1], alt[r2]);
                second_sum = std::max(second_sum, perm_sum(table, alt));
            }
    }

    if (best_sum <= 0.0)
        throw CertificationError("match_states: vanishing overlaps; refine the step size");
    const double margin = (best_sum - std::max(second_sum, 0.0)) / best_sum;
    if (confidence)
        *confidence = std::max(margin, std::numeric_limits<double>::min());
    return best_perm;
}

namespace {

struct SweepWorkspace {
    const FamilySpec* spec = nullptr;
    const Tolerances* tol = nullptr;
    std::map<double, EigenSystem> cache;

    const EigenSystem& at(double a) {
        auto it = cache.find(a);
        if (it == cache.end())
            it = cache.emplace(a, eigendecompose_at(*spec, Complex(a, 0.0), *tol)).first;
        return it->second;
    }
};

// Tracked labels ordered by descending Re eps_k(a_from); label -> level index.
std::vector<int> label_levels(const FamilySpec& spec, double a_from) {
    std::vector<int> order(spec.n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<Complex> eps(spec.n);
    for (int k = 0; k < spec.n; ++k)
        eps[k] = spec.levels[k].eps(Complex(a_from, 0.0));
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return eps[a].real() > eps[b].real();
    });
    return order;
}

// Pseudo-system holding the unperturbed basis states, used to anchor the
// initial label assignment.
EigenSystem unperturbed_system(const FamilySpec& spec, double a_from,
                               const std::vector<int>& labels) {
    EigenSystem sys;
    sys.parameter = Complex(a_from, 0.0);
    sys.pairs.resize(spec.n);
    for (int l = 0; l < spec.n; ++l) {
        const int level = labels[l];
        EigenPair p;
        p.value = spec.levels[level].eps(Complex(a_from, 0.0));
        p.vector = Eigen::VectorXcd::Zero(spec.n);
        p.vector[level] = Complex(1.0, 0.0);
        p.c_norm_sq = Complex(1.0, 0.0);
        sys.pairs[l] = std::move(p);
    }
    return sys;
}

// Unperturbed levels sorted by descending Re eps at a (ties by level index).
std::vector<int> sorted_levels_at(const FamilySpec& spec, double a) {
    std::vector<int> order(spec.n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> re(spec.n);
    for (int k = 0; k < spec.n; ++k)
        re[k] = spec.levels[k].eps(Complex(a, 0.0)).real();
    std::stable_sort(order.begin(), order.end(),
                     [&](int x, int y) { return re[x] > re[y]; });
    return order;
}

struct Chain {
    std::vector<std::vector<int>> positions; // positions[k][label] = pair index at grid[k]
    std::vector<double> confidences;
    std::vector<bool> swaps;
    bool ok = true;
    std::size_t tie_index = 0; // right end of the ambiguous interval when !ok
};

Chain build_chain(SweepWorkspace& ws, const std::vector<double>& grid,
                  const EigenSystem& anchor) {
    const int n = anchor.n();
    Chain chain;
    chain.positions.resize(grid.size());
    chain.confidences.resize(grid.size());
    chain.swaps.assign(grid.size(), false);

    double conf = 1.0;
    std::vector<int> pos = match_states(anchor, ws.at(grid[0]), &conf, *ws.tol);
    chain.positions[0] = pos;
    chain.confidences[0] = conf;

    for (std::size_t k = 1; k < grid.size(); ++k) {
        std::vector<int> step;
        try {
            step = match_states(ws.at(grid[k - 1]), ws.at(grid[k]), &conf, *ws.tol);
        } catch (const CertificationError&) {
            chain.ok = false;
            chain.tie_index = k;
            return chain;
        }
        bool identity = true;
        for (int r = 0; r < n; ++r)
            if (step[r] != r)
                identity = false;
        std::vector<int> next(n);
        for (int l = 0; l < n; ++l)
            next[l] = step[pos[l]];
        pos = std::move(next);
        chain.positions[k] = pos;
        chain.confidences[k] = conf;
        chain.swaps[k] = !identity;
    }
    return chain;
}

std::vector<SweepRecord> build_records(SweepWorkspace& ws, const std::vector<double>& grid,
                                       const Chain& chain, double lipschitz) {
    const FamilySpec& spec = *ws.spec;
    const int n = spec.n;
    std::vector<SweepRecord> records(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const EigenSystem& sys = ws.at(grid[k]);
        SweepRecord& rec = records[k];
        rec.a = grid[k];
        rec.values.resize(n);
        rec.norms.resize(n);
        rec.b_sq.resize(n, n);
        rec.dominant_level.resize(n);
        rec.match_confidence = chain.confidences[k];
        rec.label_swap = chain.swaps[k];
        const std::vector<int> cols = sorted_levels_at(spec, grid[k]);
        for (int l = 0; l < n; ++l) {
            const EigenPair& pair = sys.pairs[chain.positions[k][l]];
            rec.values[l] = pair.value;
            rec.norms[l] = pair.defective ? std::numeric_limits<double>::infinity()
                                          : pair.vector.squaredNorm();
            int dom = 0;
            double dom_mag = -1.0;
            for (int i = 0; i < n; ++i) {
                const double mag = std::norm(pair.vector[i]);
                if (mag > dom_mag) {
                    dom_mag = mag;
                    dom = i;
                }
            }
            rec.dominant_level[l] = dom;
            for (int j = 0; j < n; ++j) {
                const Complex b = pair.vector[cols[j]];
                rec.b_sq(l, j) = b * b;
            }
        }
        if (k > 0) {
            const double da = grid[k] - grid[k - 1];
            for (int l = 0; l < n; ++l) {
                const double move = std::abs(rec.values[l] - records[k - 1].values[l]);
                const double bound = lipschitz * da +
                                     ws.tol->sweep_slack * (1.0 + std::abs(rec.values[l]));
                if (move > bound) {
                    rec.continuity_fault = true;
                    break;
                }
            }
        }
    }
    return records;
}

double max_bsq_jump(const SweepRecord& a, const SweepRecord& b) {
    return (a.b_sq - b.b_sq).cwiseAbs().maxCoeff();
}

struct Interval {
    double left = 0.0;
    double right = 0.0;
    bool truncated = false;
};

// Maximal interval around the event where the pair's off-diagonal |b^2|
// stays >= threshold, with linearly interpolated edges. The b_sq columns are
// energy-sorted unperturbed slots, so the pair's off-diagonal entries sit at
// the pair's current energy ranks (tracked labels can part ways with ranks
// after a real degeneracy).
std::optional<Interval> mixing_interval(const std::vector<SweepRecord>& records,
                                        const CrossingEvent& event, double threshold) {
    const auto level = [&](std::size_t k) {
        const auto& rec = records[k];
        const int n = static_cast<int>(rec.values.size());
        int rank1 = 0, rank2 = 0;
        for (int r = 0; r < n; ++r) {
            if (r == event.r1 || r == event.r2)
                continue;
            const auto above = [&](int who) {
                const Complex a = rec.values[r];
                const Complex b = rec.values[who];
                return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
            };
            if (above(event.r1))
                ++rank1;
            if (above(event.r2))
                ++rank2;
        }
        // the pair members rank against each other as well
        const Complex v1 = rec.values[event.r1];
        const Complex v2 = rec.values[event.r2];
        const bool first_above =
            v1.real() != v2.real() ? v1.real() > v2.real() : v1.imag() >= v2.imag();
        (first_above ? rank2 : rank1) += 1;
        return std::max(std::abs(rec.b_sq(event.r1, rank2)),
                        std::abs(rec.b_sq(event.r2, rank1)));
    };
    // record nearest the event
    std::size_t k0 = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < records.size(); ++k) {
        const double d = std::abs(records[k].a - event.a_min);
        if (d < best) {
            best = d;
            k0 = k;
        }
    }
    if (level(k0) < threshold)
        return std::nullopt;

    Interval iv;
    std::size_t k = k0;
    while (k > 0 && level(k - 1) >= threshold)
        --k;
    if (k == 0) {
        iv.left = records.front().a;
        iv.truncated = true;
    } else {
        const double y1 = level(k - 1), y2 = level(k);
        const double t = (threshold - y1) / (y2 - y1);
        iv.left = records[k - 1].a + t * (records[k].a - records[k - 1].a);
    }
    k = k0;
    while (k + 1 < records.size() && level(k + 1) >= threshold)
        ++k;
    if (k + 1 == records.size()) {
        iv.right = records.back().a;
        iv.truncated = true;
    } else {
        const double y1 = level(k), y2 = level(k + 1);
        const double t = (threshold - y1) / (y2 - y1);
        iv.right = records[k].a + t * (records[k + 1].a - records[k].a);
    }
    return iv;
}

} // namespace

std::vector<SweepRecord> sweep(const FamilySpec& spec, double a_from, double a_to, int steps,
                               bool adaptive, const Tolerances& tol) {
    validate_family(spec);
    if (steps < 2)
        throw ConfigError("sweep: steps must be >= 2");
    if (!(a_from < a_to))
        throw ConfigError("sweep: a_from must be < a_to");

    SweepWorkspace ws;
    ws.spec = &spec;
    ws.tol = &tol;

    std::vector<double> grid(steps + 1);
    for (int k = 0; k <= steps; ++k)
        grid[k] = a_from + (a_to - a_from) * (static_cast<double>(k) / steps);
    grid.front() = a_from;
    grid.back() = a_to;

    const std::vector<int> labels = label_levels(spec, a_from);
    const EigenSystem anchor = unperturbed_system(spec, a_from, labels);
    const double lipschitz = spec.lipschitz_bound();

    const int max_depth = 12;
    std::vector<SweepRecord> records;
    for (int pass = 0;; ++pass) {
        std::vector<double> midpoints;
        const Chain chain = build_chain(ws, grid, anchor);
        if (!chain.ok) {
            const std::size_t k = chain.tie_index;
            if (!adaptive || pass >= max_depth) {
                std::ostringstream os;
                os << "sweep: ambiguous state matching in interval [" << grid[k - 1] << ", "
                   << grid[k] << "]; refine the step size";
                throw CertificationError(os.str());
            }
            midpoints.push_back(0.5 * (grid[k - 1] + grid[k]));
        } else {
            records = build_records(ws, grid, chain, lipschitz);
            if (!adaptive)
                break;
            for (std::size_t k = 1; k < records.size(); ++k) {
                const bool jump = max_bsq_jump(records[k], records[k - 1]) > 0.05;
                const bool fault = records[k].continuity_fault;
                if (jump || fault)
                    midpoints.push_back(0.5 * (grid[k - 1] + grid[k]));
            }
            if (midpoints.empty())
                break;
            if (pass >= max_depth) {
                std::ostringstream os;
                for (std::size_t k = 1; k < records.size(); ++k)
                    if (records[k].continuity_fault) {
                        os << "tracking fault in interval [" << grid[k - 1] << ", " << grid[k]
                           << "] after maximal refinement";
                        throw NumericalError(os.str());
                    }
                break; // b_sq still moving fast but depth exhausted: accept
            }
        }

        grid.insert(grid.end(), midpoints.begin(), midpoints.end());
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    }
    return records;
}

std::vector<CrossingEvent> detect_avoided_crossings(const std::vector<SweepRecord>& records) {
    if (records.size() < 3)
        throw ConfigError("detect_avoided_crossings: need at least 3 records");
    const int n = static_cast<int>(records.front().values.size());

    std::vector<CrossingEvent> events;
    for (int r1 = 0; r1 < n; ++r1) {
        for (int r2 = r1 + 1; r2 < n; ++r2) {
            for (std::size_t k = 1; k + 1 < records.size(); ++k) {
                const auto gap = [&](std::size_t idx) {
                    return std::abs(records[idx].values[r1] - records[idx].values[r2]);
                };
                const double g0 = gap(k - 1), g1 = gap(k), g2 = gap(k + 1);
                if (!(g1 <= g0 && g1 < g2))
                    continue;
                // rounding noise on a flat gap is not a minimum
                if (std::min(g0, g2) - g1 <= 1e-10 * (1.0 + g1))
                    continue;
                // a third state between the pair marks a composite of two
                // adjacent events, not an avoided crossing of this pair
                bool separated = false;
                const Complex mid = 0.5 * (records[k].values[r1] + records[k].values[r2]);
                for (int r3 = 0; r3 < n && !separated; ++r3)
                    if (r3 != r1 && r3 != r2 &&
                        std::abs(records[k].values[r3] - mid) < 0.5 * g1)
                        separated = true;
                if (separated)
                    continue;
                const double x0 = records[k - 1].a, x1 = records[k].a, x2 = records[k + 1].a;
                // quadratic fit through the three samples
                const double d0 = g0 / ((x0 - x1) * (x0 - x2));
                const double d1 = g1 / ((x1 - x0) * (x1 - x2));
                const double d2 = g2 / ((x2 - x0) * (x2 - x1));
                const double A = d0 + d1 + d2;
                const double B = -(d0 * (x1 + x2) + d1 * (x0 + x2) + d2 * (x0 + x1));
                CrossingEvent ev;
                ev.r1 = r1;
                ev.r2 = r2;
                if (A > 0.0) {
                    const double vx = -B / (2.0 * A);
                    ev.a_min = std::clamp(vx, x0, x2);
                    const double c = d0 * x1 * x2 + d1 * x0 * x2 + d2 * x0 * x1;
                    ev.gap_min = std::max(0.0, A * ev.a_min * ev.a_min + B * ev.a_min + c);
                } else {
                    ev.a_min = x1;
                    ev.gap_min = g1;
                }
                ev.cell = std::max(x1 - x0, x2 - x1);
                events.push_back(ev);
            }
        }
    }
    std::sort(events.begin(), events.end(),
              [](const CrossingEvent& a, const CrossingEvent& b) { return a.a_min < b.a_min; });

    // merge duplicate minima of the same pair within two cells
    std::vector<CrossingEvent> merged;
    for (const auto& ev : events) {
        bool dup = false;
        for (auto& kept : merged)
            if (kept.r1 == ev.r1 && kept.r2 == ev.r2 &&
                std::abs(kept.a_min - ev.a_min) < 2.0 * std::max(kept.cell, ev.cell)) {
                if (ev.gap_min < kept.gap_min)
                    kept = ev;
                dup = true;
                break;
            }
        if (!dup)
            merged.push_back(ev);
    }
    events = std::move(merged);

    // exchange determination: dominant unperturbed level on the two sides
    for (std::size_t e = 0; e < events.size(); ++e) {
        double left_ref = records.front().a;
        double right_ref = records.back().a;
        if (e > 0)
            left_ref = 0.5 * (events[e - 1].a_min + events[e].a_min);
        if (e + 1 < events.size())
            right_ref = 0.5 * (events[e].a_min + events[e + 1].a_min);
        const auto record_at = [&](double a) -> const SweepRecord& {
            std::size_t best_k = 0;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < records.size(); ++k) {
                const double d = std::abs(records[k].a - a);
                if (d < best) {
                    best = d;
                    best_k = k;
                }
            }
            return records[best_k];
        };
        const SweepRecord& left = record_at(left_ref);
        const SweepRecord& right = record_at(right_ref);
        events[e].exchanged =
            left.dominant_level[events[e].r1] != right.dominant_level[events[e].r1] &&
            left.dominant_level[events[e].r2] != right.dominant_level[events[e].r2];
        bool truncated = false;
        events[e].mixing_halfwidth = mixing_region_width(records, events[e], 0.25, &truncated);
        events[e].width_truncated = truncated;
    }
    return events;
}

double mixing_region_width(const std::vector<SweepRecord>& records, const CrossingEvent& event,
                           double threshold, bool* truncated) {
    if (!(threshold > 0.0 && threshold < 0.5))
        throw ConfigError("mixing_region_width: threshold must be in (0, 0.5)");
    const auto iv = mixing_interval(records, event, threshold);
    if (truncated)
        *truncated = iv && iv->truncated;
    if (!iv)
        return 0.0;
    return 0.5 * (iv->right - iv->left);
}

OnsetResult overlap_onset(const FamilySpec& spec, const std::vector<double>& v_values,
                          double threshold, const Tolerances& tol) {
    validate_family(spec);
    if (v_values.empty())
        throw ConfigError("overlap_onset: empty v list");
    if (!std::is_sorted(v_values.begin(), v_values.end()))
        throw ConfigError("overlap_onset: v_values must be ascending");
    if (!(threshold > 0.0 && threshold < 0.5))
        throw ConfigError("overlap_onset: threshold must be in (0, 0.5)");

    // distinct real unperturbed crossings define the scan window
    const CrossingReport report = unperturbed_crossings(spec);
    std::vector<double> reals;
    for (const auto& cr : report.crossings)
        if (std::abs(cr.a_cr.imag()) <= 1e-12 * (1.0 + std::abs(cr.a_cr.real())))
            reals.push_back(cr.a_cr.real());
    std::sort(reals.begin(), reals.end());
    std::vector<double> distinct;
    for (double a : reals)
        if (distinct.empty() || a - distinct.back() > 1e-9)
            distinct.push_back(a);
    if (distinct.size() < 2)
        throw ConfigError("overlap_onset: needs at least 2 distinct real unperturbed crossings");

    const double pad = 0.1;
    const double a_from = distinct.front() - pad;
    const double a_to = distinct.back() + pad;

    OnsetResult result;
    result.threshold = threshold;

    double prev_sep = std::numeric_limits<double>::quiet_NaN();
    double prev_v = 0.0;
    for (double v : v_values) {
        FamilySpec sample = spec;
        sample.coupling.mode = CouplingMode::Uniform;
        sample.coupling.uniform_value = Complex(v, 0.0);
        sample.coupling.full_matrix.resize(0, 0);

        const auto records = sweep(sample, a_from, a_to, 800, /*adaptive=*/true, tol);
        const auto events = detect_avoided_crossings(records);

        // Coincident crossings (several pairs degenerating at the same
        // critical value) form one region: group each event's interval under
        // the nearest distinct crossing and take the hull per group.
        std::vector<Interval> regions(distinct.size());
        std::vector<bool> populated(distinct.size(), false);
        for (const auto& ev : events) {
            const auto iv = mixing_interval(records, ev, threshold);
            if (!iv)
                continue;
            std::size_t g = 0;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < distinct.size(); ++k) {
                const double d = std::abs(ev.a_min - distinct[k]);
                if (d < best) {
                    best = d;
                    g = k;
                }
            }
            if (!populated[g]) {
                regions[g] = *iv;
                populated[g] = true;
            } else {
                regions[g].left = std::min(regions[g].left, iv->left);
                regions[g].right = std::max(regions[g].right, iv->right);
            }
        }

        double min_sep = std::numeric_limits<double>::infinity();
        int last = -1;
        for (std::size_t g = 0; g < distinct.size(); ++g) {
            if (!populated[g])
                continue;
            if (last >= 0)
                min_sep = std::min(min_sep, regions[g].left - regions[last].right);
            last = static_cast<int>(g);
        }
        result.samples.push_back({v, min_sep});

        if (!result.reached && min_sep <= 0.0) {
            result.reached = true;
            if (std::isfinite(prev_sep) && prev_sep > 0.0 && std::isfinite(min_sep)) {
                result.v_onset = prev_v + prev_sep * (v - prev_v) / (prev_sep - min_sep);
            } else {
                result.v_onset = v;
            }
        }
        prev_sep = min_sep;
        prev_v = v;
    }
    return result;
}

} // namespace bp
