#include "bp/report.hpp"

#include <doctest.h>

#include <cstdlib>
#include <sstream>

using namespace bp;

namespace {

FamilySpec two_level_family(double v) {
    FamilySpec spec;
    spec.n = 2;
    spec.levels = {{1.0, -0.5, 0.0, 0.0}, {0.0, 1.0, 0.0, 0.0}};
    spec.coupling.mode = CouplingMode::Uniform;
    spec.coupling.uniform_value = Complex(v, 0.0);
    return spec;
}

} // namespace

TEST_CASE("format_double is fixed-width and round-trips") {
    for (double x : {0.0, 2.0 / 3.0, -1.2345678901234567e-8, 1e300}) {
        const std::string s = format_double(x);
        CHECK(std::strtod(s.c_str(), nullptr) == x);
    }
    CHECK(format_double(0.5) == "5.0000000000000000e-01");
}

TEST_CASE("sweep_csv: Hermitian schema and determinism") {
    const FamilySpec spec = two_level_family(0.05);
    const auto records = sweep(spec, 0.0, 4.0 / 3.0, 40, false);
    const std::string csv = sweep_csv(spec, records);
    std::istringstream is(csv);
    std::string header;
    std::getline(is, header);
    CHECK(header ==
          "a,E_1_re,E_1_im,E_2_re,E_2_im,norm_1,norm_2,b2_1_1,b2_1_2,b2_2_1,b2_2_2,confidence");
    CHECK(sweep_csv(spec, records) == csv); // byte-identical on re-emission
}

TEST_CASE("sweep_csv: complex b2 columns outside the Hermitian regime") {
    FamilySpec spec = two_level_family(0.05);
    spec.levels[0].c0 = 0.2;
    const auto records = sweep(spec, 0.0, 1.0, 20, false);
    const std::string csv = sweep_csv(spec, records);
    CHECK(csv.find("b2_1_1_re") != std::string::npos);
    CHECK(csv.find("b2_1_1_im") != std::string::npos);
}

TEST_CASE("monodromy_csv carries the 1-based permutation row") {
    MonodromyResult result;
    result.loop_center = Complex(2.0 / 3.0, 0.0667);
    result.loop_radius = 0.02;
    result.steps = 256;
    result.permutation = {1, 0};
    result.max_tracking_gap = 0.01;
    const std::string csv = monodromy_csv(result);
    CHECK(csv.find("permutation,2 1\n") != std::string::npos);
}

TEST_CASE("manifest echoes a re-parsable config") {
    const FamilySpec spec = two_level_family(0.5);
    const std::string manifest =
        run_manifest("sweep", "two_level.json", spec, {{"from", "0"}, {"to", "1"}},
                     {"sweep.csv"});
    // the embedded config survives a round trip
    const auto start = manifest.find("\"config\": ");
    REQUIRE(start != std::string::npos);
    // extract the config object by brace counting
    std::size_t open = manifest.find('{', start);
    int depth = 0;
    std::size_t end = open;
    for (std::size_t k = open; k < manifest.size(); ++k) {
        if (manifest[k] == '{')
            ++depth;
        if (manifest[k] == '}' && --depth == 0) {
            end = k + 1;
            break;
        }
    }
    const FamilySpec echoed = parse_family(manifest.substr(open, end - open));
    CHECK(echoed.n == spec.n);
    CHECK(echoed.coupling.uniform_value == spec.coupling.uniform_value);
    CHECK(echoed.levels[0].e_slope == spec.levels[0].e_slope);
    CHECK(manifest.find("\"version\"") != std::string::npos);
}

TEST_CASE("svg charts contain axes and one polyline per series") {
    const FamilySpec spec = two_level_family(0.05);
    const auto records = sweep(spec, 0.0, 4.0 / 3.0, 40, false);
    const std::string svg = energies_svg(spec, records);
    CHECK(svg.find("<svg") != std::string::npos);
    std::size_t count = 0;
    for (std::size_t pos = svg.find("<polyline"); pos != std::string::npos;
         pos = svg.find("<polyline", pos + 1))
        ++count;
    CHECK(count == 4); // two tracked states + two unperturbed references

    const std::string mix = mixing_svg(spec, records);
    CHECK(mix.find("stroke-dasharray") != std::string::npos);
}
