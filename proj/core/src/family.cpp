#include "bp/family.hpp"

#include "bp/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bp {

namespace {

using json = nlohmann::ordered_json;

int line_of_byte(std::string_view text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + byte, '\n'));
}

void reject_unknown_fields(const json& obj, std::initializer_list<const char*> allowed,
                           const std::string& path) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed)
            if (item.key() == key) {
                known = true;
                break;
            }
        if (!known)
            throw ConfigError("unknown field '" + item.key() + "' in " + path);
    }
}

double require_number(const json& j, const std::string& path) {
    if (!j.is_number())
        throw ConfigError(path + " must be a number");
    return j.get<double>();
}

Complex parse_complex(const json& j, const std::string& path) {
    if (j.is_number())
        return Complex(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return Complex(j[0].get<double>(), j[1].get<double>());
    throw ConfigError(path + " must be a number or a [re, im] pair");
}

json complex_to_json(Complex z) {
    if (z.imag() == 0.0)
        return json(z.real());
    return json::array({z.real(), z.imag()});
}

} // namespace

Complex CouplingSpec::at(int i, int j) const {
    if (i == j)
        return Complex(0.0, 0.0);
    return mode == CouplingMode::Uniform ? uniform_value : full_matrix(i, j);
}

bool CouplingSpec::is_zero() const {
    if (mode == CouplingMode::Uniform)
        return uniform_value == Complex(0.0, 0.0);
    return full_matrix.size() == 0 || full_matrix.cwiseAbs().maxCoeff() == 0.0;
}

bool CouplingSpec::is_real() const {
    if (mode == CouplingMode::Uniform)
        return uniform_value.imag() == 0.0;
    if (full_matrix.size() == 0)
        return true;
    return full_matrix.imag().cwiseAbs().maxCoeff() == 0.0;
}

double CouplingSpec::max_row_sum(int n) const {
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j)
            row += std::abs(at(i, j));
        best = std::max(best, row);
    }
    return best;
}

bool FamilySpec::hermitian_on_real_axis() const {
    for (const auto& lv : levels)
        if (lv.c0 != 0.0 || lv.c_slope != 0.0)
            return false;
    return coupling.is_real();
}

double FamilySpec::lipschitz_bound() const {
    double diag = 0.0;
    for (const auto& lv : levels)
        diag = std::max(diag, std::abs(lv.e_slope) + 0.5 * std::abs(lv.c_slope));
    return diag + 2.0 * coupling.max_row_sum(n);
}

void validate_family(const FamilySpec& spec) {
    if (spec.n < 2)
        throw ConfigError("n must be >= 2, got " + std::to_string(spec.n));
    if (static_cast<int>(spec.levels.size()) != spec.n)
        throw ConfigError("levels has " + std::to_string(spec.levels.size()) +
                          " entries but n = " + std::to_string(spec.n));
    for (int k = 0; k < spec.n; ++k)
        if (spec.levels[k].c0 < 0.0)
            throw ConfigError("levels[" + std::to_string(k) + "].c0 must be >= 0");
    if (spec.coupling.mode == CouplingMode::Full) {
        const auto& m = spec.coupling.full_matrix;
        if (m.rows() != spec.n || m.cols() != spec.n)
            throw ConfigError("coupling.matrix must be n x n");
        for (int i = 0; i < spec.n; ++i) {
            if (m(i, i) != Complex(0.0, 0.0))
                throw ConfigError("coupling.matrix[" + std::to_string(i) + "][" +
                                  std::to_string(i) + "] must be 0");
            for (int j = i + 1; j < spec.n; ++j)
                if (m(i, j) != m(j, i))
                    throw ConfigError("coupling.matrix is not symmetric at [" +
                                      std::to_string(i) + "][" + std::to_string(j) + "]");
        }
    }
}

FamilySpec parse_family(std::string_view config_text) {
    json root;
    try {
        root = json::parse(config_text);
    } catch (const json::parse_error& e) {
        throw ConfigError("syntax error at line " +
                          std::to_string(line_of_byte(config_text, e.byte)) + ": " + e.what());
    }
    if (!root.is_object())
        throw ConfigError("config root must be an object");
    reject_unknown_fields(root, {"n", "levels", "coupling"}, "config root");

    FamilySpec spec;
    if (!root.contains("n") || !root["n"].is_number_integer())
        throw ConfigError("missing or non-integer field 'n'");
    spec.n = root["n"].get<int>();

    if (!root.contains("levels") || !root["levels"].is_array())
        throw ConfigError("missing or non-array field 'levels'");
    int k = 0;
    for (const auto& entry : root["levels"]) {
        const std::string path = "levels[" + std::to_string(k) + "]";
        if (!entry.is_object())
            throw ConfigError(path + " must be an object");
        reject_unknown_fields(entry, {"e0", "e_slope", "c0", "c_slope"}, path);
        LevelSpec lv;
        if (!entry.contains("e0"))
            throw ConfigError(path + " is missing 'e0'");
        lv.e0 = require_number(entry["e0"], path + ".e0");
        if (!entry.contains("e_slope"))
            throw ConfigError(path + " is missing 'e_slope'");
        lv.e_slope = require_number(entry["e_slope"], path + ".e_slope");
        if (entry.contains("c0"))
            lv.c0 = require_number(entry["c0"], path + ".c0");
        if (entry.contains("c_slope"))
            lv.c_slope = require_number(entry["c_slope"], path + ".c_slope");
        spec.levels.push_back(lv);
        ++k;
    }

    if (!root.contains("coupling") || !root["coupling"].is_object())
        throw ConfigError("missing or non-object field 'coupling'");
    const json& cp = root["coupling"];
    if (!cp.contains("mode") || !cp["mode"].is_string())
        throw ConfigError("coupling.mode must be a string");
    const std::string mode = cp["mode"].get<std::string>();
    if (mode == "uniform") {
        reject_unknown_fields(cp, {"mode", "v"}, "coupling");
        if (!cp.contains("v"))
            throw ConfigError("coupling (uniform) is missing 'v'");
        spec.coupling.mode = CouplingMode::Uniform;
        spec.coupling.uniform_value = parse_complex(cp["v"], "coupling.v");
    } else if (mode == "full") {
        reject_unknown_fields(cp, {"mode", "matrix"}, "coupling");
        if (!cp.contains("matrix") || !cp["matrix"].is_array())
            throw ConfigError("coupling (full) is missing array field 'matrix'");
        const json& rows = cp["matrix"];
        if (static_cast<int>(rows.size()) != spec.n)
            throw ConfigError("coupling.matrix must have n rows");
        spec.coupling.mode = CouplingMode::Full;
        spec.coupling.full_matrix.resize(spec.n, spec.n);
        for (int i = 0; i < spec.n; ++i) {
            if (!rows[i].is_array() || static_cast<int>(rows[i].size()) != spec.n)
                throw ConfigError("coupling.matrix[" + std::to_string(i) +
                                  "] must have n entries");
            for (int j = 0; j < spec.n; ++j)
                spec.coupling.full_matrix(i, j) =
                    parse_complex(rows[i][j], "coupling.matrix[" + std::to_string(i) + "][" +
                                                  std::to_string(j) + "]");
        }
    } else {
        throw ConfigError("coupling.mode must be \"uniform\" or \"full\", got \"" + mode + "\"");
    }

    validate_family(spec);
    return spec;
}

std::string family_to_json(const FamilySpec& spec) {
    json root;
    root["n"] = spec.n;
    root["levels"] = json::array();
    for (const auto& lv : spec.levels) {
        json entry;
        entry["e0"] = lv.e0;
        entry["e_slope"] = lv.e_slope;
        entry["c0"] = lv.c0;
        entry["c_slope"] = lv.c_slope;
        root["levels"].push_back(entry);
    }
    json cp;
    if (spec.coupling.mode == CouplingMode::Uniform) {
        cp["mode"] = "uniform";
        cp["v"] = complex_to_json(spec.coupling.uniform_value);
    } else {
        cp["mode"] = "full";
        json rows = json::array();
        for (int i = 0; i < spec.n; ++i) {
            json row = json::array();
            for (int j = 0; j < spec.n; ++j)
                row.push_back(complex_to_json(spec.coupling.full_matrix(i, j)));
            rows.push_back(row);
        }
        cp["matrix"] = rows;
    }
    root["coupling"] = cp;
    return root.dump(2);
}

Eigen::MatrixXcd build_matrix(const FamilySpec& spec, Complex a) {
    validate_family(spec);
    Eigen::MatrixXcd m(spec.n, spec.n);
    for (int i = 0; i < spec.n; ++i) {
        for (int j = 0; j < spec.n; ++j)
            m(i, j) = spec.coupling.at(i, j);
        m(i, i) = spec.levels[i].eps(a);
    }
    return m;
}

CrossingReport unperturbed_crossings(const FamilySpec& spec) {
    validate_family(spec);
    CrossingReport report;
    for (int i = 0; i < spec.n; ++i) {
        for (int j = i + 1; j < spec.n; ++j) {
            const auto& li = spec.levels[i];
            const auto& lj = spec.levels[j];
            // eps_i(a) - eps_j(a) = beta + alpha * a
            const Complex alpha(li.e_slope - lj.e_slope, -0.5 * (li.c_slope - lj.c_slope));
            const Complex beta(li.e0 - lj.e0, -0.5 * (li.c0 - lj.c0));
            if (alpha == Complex(0.0, 0.0)) {
                report.degenerate.push_back({i, j,
                                             beta == Complex(0.0, 0.0)
                                                 ? DegeneratePairKind::Identical
                                                 : DegeneratePairKind::Parallel});
                continue;
            }
            report.crossings.push_back({i, j, -beta / alpha});
        }
    }
    std::sort(report.crossings.begin(), report.crossings.end(),
              [](const LevelCrossing& a, const LevelCrossing& b) {
                  if (a.a_cr.real() != b.a_cr.real())
                      return a.a_cr.real() < b.a_cr.real();
                  if (a.a_cr.imag() != b.a_cr.imag())
                      return a.a_cr.imag() < b.a_cr.imag();
                  return std::tie(a.i, a.j) < std::tie(b.i, b.j);
              });
    return report;
}

} // namespace bp
