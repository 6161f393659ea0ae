#pragma once

#include "bp/branch_points.hpp"
#include "bp/family.hpp"
#include "bp/sweep.hpp"

#include <map>
#include <string>
#include <vector>

namespace bp {

/// Fixed 17-significant-digit decimal rendering used by every CSV emitter:
/// identical inputs always give byte-identical output.
std::string format_double(double x);
std::string format_int(long long x);

/// Sweep CSV. Header: a,E_1_re,E_1_im,...,norm_1,...,b2_1_1,...,confidence.
/// b2 entries are single real columns when the family is Hermitian on the
/// real axis, and re/im column pairs otherwise.
std::string sweep_csv(const FamilySpec& spec, const std::vector<SweepRecord>& records);

std::string branch_points_csv(const std::vector<BranchPoint>& points);
std::string monodromy_csv(const MonodromyResult& result);
std::string onset_csv(const OnsetResult& result, double v_min, double v_max);
std::string onset_samples_csv(const OnsetResult& result);
/// Single-parameter diagnostics: one row per state with value, norm and b^2
/// against the unperturbed (v = 0) basis.
std::string mixing_csv(const FamilySpec& spec, const EigenSystem& sys);

/// Minimal standalone SVG line charts (axes, polylines, labels).
struct LineSeries {
    std::vector<double> x;
    std::vector<double> y;
    std::string label;
    bool dashed = false;
};

std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<LineSeries>& series);

/// Tracked energies Re E_i(a) with the unperturbed levels dashed underneath.
std::string energies_svg(const FamilySpec& spec, const std::vector<SweepRecord>& records);
/// |b^2| mixing curves: diagonal solid, off-diagonal dashed.
std::string mixing_svg(const FamilySpec& spec, const std::vector<SweepRecord>& records);

/// Manifest echoed next to every output: command, full config echo, flags and
/// tool version. Identical manifests reproduce byte-identical outputs.
std::string run_manifest(const std::string& command, const std::string& config_path,
                         const FamilySpec& spec,
                         const std::map<std::string, std::string>& parameters,
                         const std::vector<std::string>& outputs);

extern const char* const kToolVersion;

} // namespace bp
