#include "bp/report.hpp"

#include "bp/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>

namespace bp {

const char* const kToolVersion = "0.1.0";

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", x);
    return buf;
}

std::string format_int(long long x) {
    return std::to_string(x);
}

std::string sweep_csv(const FamilySpec& spec, const std::vector<SweepRecord>& records) {
    const int n = spec.n;
    const bool hermitian = spec.hermitian_on_real_axis();
    std::ostringstream os;
    os << "a";
    for (int r = 1; r <= n; ++r)
        os << ",E_" << r << "_re,E_" << r << "_im";
    for (int r = 1; r <= n; ++r)
        os << ",norm_" << r;
    for (int r = 1; r <= n; ++r)
        for (int i = 1; i <= n; ++i) {
            if (hermitian)
                os << ",b2_" << r << "_" << i;
            else
                os << ",b2_" << r << "_" << i << "_re,b2_" << r << "_" << i << "_im";
        }
    os << ",confidence\n";
    for (const auto& rec : records) {
        os << format_double(rec.a);
        for (int r = 0; r < n; ++r)
            os << "," << format_double(rec.values[r].real()) << ","
               << format_double(rec.values[r].imag());
        for (int r = 0; r < n; ++r)
            os << "," << format_double(rec.norms[r]);
        for (int r = 0; r < n; ++r)
            for (int i = 0; i < n; ++i) {
                if (hermitian)
                    os << "," << format_double(rec.b_sq(r, i).real());
                else
                    os << "," << format_double(rec.b_sq(r, i).real()) << ","
                       << format_double(rec.b_sq(r, i).imag());
            }
        os << "," << format_double(rec.match_confidence) << "\n";
    }
    return os.str();
}

std::string branch_points_csv(const std::vector<BranchPoint>& points) {
    std::ostringstream os;
    os << "a_bp_re,a_bp_im,value_re,value_im,pair_i,pair_j,disc_residual,coalescence,"
          "iterations,certified\n";
    for (const auto& bp : points) {
        os << format_double(bp.a_bp.real()) << "," << format_double(bp.a_bp.imag()) << ","
           << format_double(bp.value_bp.real()) << "," << format_double(bp.value_bp.imag())
           << "," << bp.r1 + 1 << "," << bp.r2 + 1 << "," << format_double(bp.disc_residual)
           << "," << format_double(bp.coalescence) << "," << bp.history.size() << ","
           << (bp.certified ? 1 : 0) << "\n";
    }
    return os.str();
}

std::string monodromy_csv(const MonodromyResult& result) {
    std::ostringstream os;
    os << "key,value\n";
    os << "center," << format_double(result.loop_center.real()) << " "
       << format_double(result.loop_center.imag()) << "\n";
    os << "radius," << format_double(result.loop_radius) << "\n";
    os << "steps," << result.steps << "\n";
    os << "max_tracking_gap," << format_double(result.max_tracking_gap) << "\n";
    os << "permutation,";
    for (std::size_t l = 0; l < result.permutation.size(); ++l) {
        if (l)
            os << " ";
        os << result.permutation[l] + 1;
    }
    os << "\n";
    return os.str();
}

std::string onset_csv(const OnsetResult& result, double v_min, double v_max) {
    std::ostringstream os;
    os << "onset_v,reached,threshold,v_min,v_max,samples\n";
    os << (result.reached ? format_double(result.v_onset) : std::string("")) << ","
       << (result.reached ? 1 : 0) << "," << format_double(result.threshold) << ","
       << format_double(v_min) << "," << format_double(v_max) << "," << result.samples.size()
       << "\n";
    return os.str();
}

std::string onset_samples_csv(const OnsetResult& result) {
    std::ostringstream os;
    os << "v,min_separation,intersects\n";
    for (const auto& s : result.samples)
        os << format_double(s.v) << "," << format_double(s.min_separation) << ","
           << (s.min_separation <= 0.0 ? 1 : 0) << "\n";
    return os.str();
}

std::string mixing_csv(const FamilySpec& spec, const EigenSystem& sys) {
    const int n = spec.n;
    const bool hermitian =
        spec.hermitian_on_real_axis() && sys.parameter.imag() == 0.0;
    std::ostringstream os;
    os << "state,E_re,E_im,norm";
    for (int i = 1; i <= n; ++i) {
        if (hermitian)
            os << ",b2_" << i;
        else
            os << ",b2_" << i << "_re,b2_" << i << "_im";
    }
    os << "\n";
    const BiorthMetrics metrics = biorthogonality_metrics(sys);
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
    const MixingMatrix mm = mixing_coefficients(sys, identity);
    for (int r = 0; r < n; ++r) {
        os << r + 1 << "," << format_double(sys.pairs[r].value.real()) << ","
           << format_double(sys.pairs[r].value.imag()) << ","
           << format_double(metrics.norms[r]);
        for (int i = 0; i < n; ++i) {
            if (hermitian)
                os << "," << format_double(mm.b_sq(r, i).real());
            else
                os << "," << format_double(mm.b_sq(r, i).real()) << ","
                   << format_double(mm.b_sq(r, i).imag());
        }
        os << "\n";
    }
    return os.str();
}

namespace {

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    void pad() {
        if (!(lo < hi)) {
            lo -= 0.5;
            hi += 0.5;
        }
        const double m = 0.05 * (hi - lo);
        lo -= m;
        hi += m;
    }
};

const char* kPalette[] = {"#1f6fb2", "#d1495b", "#2e8b57", "#b8860b",
                          "#6a4fa3", "#13808b", "#8b4513", "#444444"};

std::string svg_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

} // namespace

std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<LineSeries>& series) {
    const double width = 800.0, height = 560.0;
    const double ml = 80.0, mr = 170.0, mt = 50.0, mb = 60.0;
    Range xr, yr;
    for (const auto& s : series)
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            xr.add(s.x[k]);
            yr.add(s.y[k]);
        }
    xr.pad();
    yr.pad();
    const auto px = [&](double x) {
        return ml + (x - xr.lo) / (xr.hi - xr.lo) * (width - ml - mr);
    };
    const auto py = [&](double y) {
        return height - mb - (y - yr.lo) / (yr.hi - yr.lo) * (height - mt - mb);
    };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << width << " " << height
       << "\" font-family=\"sans-serif\" font-size=\"13\">\n";
    os << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
       << title << "</text>\n";
    // axes
    os << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
       << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
       << height - mb << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 5; ++t) {
        const double x = xr.lo + (xr.hi - xr.lo) * t / 5.0;
        const double y = yr.lo + (yr.hi - yr.lo) * t / 5.0;
        os << "<line x1=\"" << px(x) << "\" y1=\"" << height - mb << "\" x2=\"" << px(x)
           << "\" y2=\"" << height - mb + 5 << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << px(x) << "\" y=\"" << height - mb + 20
           << "\" text-anchor=\"middle\">" << svg_number(x) << "</text>\n";
        os << "<line x1=\"" << ml - 5 << "\" y1=\"" << py(y) << "\" x2=\"" << ml << "\" y2=\""
           << py(y) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << ml - 9 << "\" y=\"" << py(y) + 4
           << "\" text-anchor=\"end\">" << svg_number(y) << "</text>\n";
    }
    os << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 14
       << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
    os << "<text x=\"20\" y=\"" << (mt + height - mb) / 2
       << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " << (mt + height - mb) / 2
       << ")\">" << y_label << "</text>\n";

    int color = 0;
    double legend_y = mt + 10.0;
    for (const auto& s : series) {
        const char* stroke = kPalette[color % 8];
        os << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\"";
        if (s.dashed)
            os << " stroke-dasharray=\"6 4\"";
        os << " points=\"";
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            if (!std::isfinite(s.y[k]))
                continue;
            os << svg_number(px(s.x[k])) << "," << svg_number(py(s.y[k])) << " ";
        }
        os << "\"/>\n";
        os << "<line x1=\"" << width - mr + 10 << "\" y1=\"" << legend_y << "\" x2=\""
           << width - mr + 40 << "\" y2=\"" << legend_y << "\" stroke=\"" << stroke
           << "\" stroke-width=\"1.5\"" << (s.dashed ? " stroke-dasharray=\"6 4\"" : "")
           << "/>\n";
        os << "<text x=\"" << width - mr + 46 << "\" y=\"" << legend_y + 4 << "\">" << s.label
           << "</text>\n";
        legend_y += 18.0;
        ++color;
    }
    os << "</svg>\n";
    return os.str();
}

std::string energies_svg(const FamilySpec& spec, const std::vector<SweepRecord>& records) {
    std::vector<LineSeries> series;
    for (int r = 0; r < spec.n; ++r) {
        LineSeries s;
        s.label = "E_" + std::to_string(r + 1);
        for (const auto& rec : records) {
            s.x.push_back(rec.a);
            s.y.push_back(rec.values[r].real());
        }
        series.push_back(std::move(s));
    }
    for (int k = 0; k < spec.n; ++k) {
        LineSeries s;
        s.label = "e_" + std::to_string(k + 1) + " (v=0)";
        s.dashed = true;
        for (const auto& rec : records) {
            s.x.push_back(rec.a);
            s.y.push_back(spec.levels[k].energy(Complex(rec.a, 0.0)).real());
        }
        series.push_back(std::move(s));
    }
    return svg_line_chart("Tracked energies", "a", "Re E", series);
}

std::string mixing_svg(const FamilySpec& spec, const std::vector<SweepRecord>& records) {
    std::vector<LineSeries> series;
    for (int r = 0; r < spec.n; ++r)
        for (int i = 0; i < spec.n; ++i) {
            LineSeries s;
            s.label = "|b2_" + std::to_string(r + 1) + "_" + std::to_string(i + 1) + "|";
            s.dashed = (r != i);
            for (const auto& rec : records) {
                s.x.push_back(rec.a);
                s.y.push_back(std::abs(rec.b_sq(r, i)));
            }
            series.push_back(std::move(s));
        }
    return svg_line_chart("Mixing coefficients", "a", "|b^2|", series);
}

std::string run_manifest(const std::string& command, const std::string& config_path,
                         const FamilySpec& spec,
                         const std::map<std::string, std::string>& parameters,
                         const std::vector<std::string>& outputs) {
    nlohmann::ordered_json j;
    j["tool"] = "bptool";
    j["version"] = kToolVersion;
    j["command"] = command;
    j["config_path"] = config_path;
    j["config"] = nlohmann::ordered_json::parse(family_to_json(spec));
    nlohmann::ordered_json params;
    for (const auto& [key, value] : parameters)
        params[key] = value;
    j["parameters"] = params;
    const char* scale = std::getenv("BP_TOLERANCE_SCALE");
    j["tolerance_scale"] = scale ? scale : "1";
    j["outputs"] = outputs;
    return j.dump(2) + "\n";
}

} // namespace bp
