#include "bp/errors.hpp"
#include "bp/family.hpp"
#include "bp/tolerances.hpp"

#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace bp;

namespace {

const char* kTwoLevel = R"({
  "n": 2,
  "levels": [
    {"e0": 1.0, "e_slope": -0.5},
    {"e0": 0.0, "e_slope": 1.0}
  ],
  "coupling": {"mode": "uniform", "v": 0.05}
})";

const char* kFourLevel = R"({
  "n": 4,
  "levels": [
    {"e0": 1.0, "e_slope": -0.3333333333333333},
    {"e0": 1.0, "e_slope": -0.4166666666666667},
    {"e0": 1.0, "e_slope": -0.5},
    {"e0": 0.0, "e_slope": 1.0}
  ],
  "coupling": {"mode": "uniform", "v": 0.005}
})";

FamilySpec two_level(double v) {
    FamilySpec spec = parse_family(kTwoLevel);
    spec.coupling.uniform_value = Complex(v, 0.0);
    return spec;
}

} // namespace

TEST_CASE("parse_family accepts the reference families") {
    const FamilySpec spec = parse_family(kTwoLevel);
    CHECK(spec.n == 2);
    CHECK(spec.levels[0].e0 == 1.0);
    CHECK(spec.levels[0].e_slope == -0.5);
    CHECK(spec.levels[0].c0 == 0.0);
    CHECK(spec.coupling.mode == CouplingMode::Uniform);
    CHECK(spec.coupling.uniform_value == Complex(0.05, 0.0));
    CHECK(spec.hermitian_on_real_axis());

    const FamilySpec four = parse_family(kFourLevel);
    CHECK(four.n == 4);
    CHECK(four.levels[3].e_slope == 1.0);
}

TEST_CASE("parse_family rejects malformed input") {
    CHECK_THROWS_AS(parse_family("{"), ConfigError);
    // line identification in syntax errors
    try {
        parse_family("{\n  \"n\": 2,\n  \"levels\": [\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line") != std::string::npos);
    }

    // n mismatch: three level entries for n = 2
    CHECK_THROWS_AS(parse_family(R"({
      "n": 2,
      "levels": [
        {"e0": 1.0, "e_slope": -0.5},
        {"e0": 0.0, "e_slope": 1.0},
        {"e0": 2.0, "e_slope": 0.5}
      ],
      "coupling": {"mode": "uniform", "v": 0.05}
    })"),
                    ConfigError);

    // n < 2
    CHECK_THROWS_AS(parse_family(R"({
      "n": 1,
      "levels": [{"e0": 1.0, "e_slope": -0.5}],
      "coupling": {"mode": "uniform", "v": 0.05}
    })"),
                    ConfigError);

    // unknown fields are rejected with the offending name
    try {
        parse_family(R"({
          "n": 2,
          "levels": [
            {"e0": 1.0, "e_slope": -0.5, "slope": 3.0},
            {"e0": 0.0, "e_slope": 1.0}
          ],
          "coupling": {"mode": "uniform", "v": 0.05}
        })");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("slope") != std::string::npos);
        CHECK(std::string(e.what()).find("levels[0]") != std::string::npos);
    }

    // asymmetric full matrix
    CHECK_THROWS_AS(parse_family(R"({
      "n": 2,
      "levels": [
        {"e0": 1.0, "e_slope": -0.5},
        {"e0": 0.0, "e_slope": 1.0}
      ],
      "coupling": {"mode": "full", "matrix": [[0, 0.1], [0.2, 0]]}
    })"),
                    ConfigError);

    // nonzero coupling diagonal
    CHECK_THROWS_AS(parse_family(R"({
      "n": 2,
      "levels": [
        {"e0": 1.0, "e_slope": -0.5},
        {"e0": 0.0, "e_slope": 1.0}
      ],
      "coupling": {"mode": "full", "matrix": [[0.3, 0.1], [0.1, 0]]}
    })"),
                    ConfigError);

    // negative width offset
    CHECK_THROWS_AS(parse_family(R"({
      "n": 2,
      "levels": [
        {"e0": 1.0, "e_slope": -0.5, "c0": -0.1},
        {"e0": 0.0, "e_slope": 1.0}
      ],
      "coupling": {"mode": "uniform", "v": 0.05}
    })"),
                    ConfigError);
}

TEST_CASE("complex values parse from [re, im] pairs") {
    const FamilySpec spec = parse_family(R"({
      "n": 2,
      "levels": [
        {"e0": 1.0, "e_slope": -0.5},
        {"e0": 0.0, "e_slope": 1.0}
      ],
      "coupling": {"mode": "uniform", "v": [0.01, 0.02]}
    })");
    CHECK(spec.coupling.uniform_value == Complex(0.01, 0.02));
    CHECK_FALSE(spec.coupling.is_real());
}

TEST_CASE("config echo round-trips") {
    for (const char* text : {kTwoLevel, kFourLevel}) {
        const FamilySpec spec = parse_family(text);
        const FamilySpec again = parse_family(family_to_json(spec));
        CHECK(again.n == spec.n);
        for (int k = 0; k < spec.n; ++k) {
            CHECK(again.levels[k].e0 == spec.levels[k].e0);
            CHECK(again.levels[k].e_slope == spec.levels[k].e_slope);
            CHECK(again.levels[k].c0 == spec.levels[k].c0);
            CHECK(again.levels[k].c_slope == spec.levels[k].c_slope);
        }
        CHECK(again.coupling.uniform_value == spec.coupling.uniform_value);
    }
}

TEST_CASE("build_matrix: reference two-level at the critical value") {
    const FamilySpec spec = two_level(0.05);
    const double a = 2.0 / 3.0;
    const Eigen::MatrixXcd m = build_matrix(spec, Complex(a, 0.0));
    CHECK(std::abs(m(0, 0) - Complex(2.0 / 3.0, 0.0)) < 1e-15);
    CHECK(std::abs(m(1, 1) - Complex(2.0 / 3.0, 0.0)) < 1e-15);
    CHECK(m(0, 1) == Complex(0.05, 0.0));
    CHECK(m(1, 0) == Complex(0.05, 0.0));
}

TEST_CASE("build_matrix: decoupled limit is diagonal real") {
    FamilySpec spec = two_level(0.0);
    const Eigen::MatrixXcd m = build_matrix(spec, Complex(0.25, 0.0));
    CHECK(m(0, 1) == Complex(0.0, 0.0));
    CHECK(m(0, 0).imag() == 0.0);
    CHECK(m(1, 1).imag() == 0.0);
    CHECK(m(0, 0).real() == doctest::Approx(1.0 - 0.125).epsilon(1e-15));
}

TEST_CASE("build_matrix: width enters as -i c / 2") {
    FamilySpec spec = two_level(0.05);
    spec.levels[0].c0 = 0.2;
    const Eigen::MatrixXcd m = build_matrix(spec, Complex(0.0, 0.0));
    CHECK(m(0, 0) == Complex(1.0, -0.1));
}

TEST_CASE("build_matrix: real symmetric for real a, zero widths, real coupling") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    const FamilySpec spec = parse_family(kFourLevel);
    for (int rep = 0; rep < 20; ++rep) {
        const Eigen::MatrixXcd m = build_matrix(spec, Complex(unif(rng), 0.0));
        CHECK(m.imag().cwiseAbs().maxCoeff() == 0.0);
        CHECK((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("build_matrix is linear in a") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    FamilySpec spec = parse_family(kFourLevel);
    spec.levels[1].c0 = 0.3;
    spec.levels[1].c_slope = 0.1;
    for (int rep = 0; rep < 50; ++rep) {
        const Complex a1(unif(rng), unif(rng));
        const Complex a2(unif(rng), unif(rng));
        const Eigen::MatrixXcd lhs = build_matrix(spec, a1) + build_matrix(spec, a2) -
                                     2.0 * build_matrix(spec, 0.5 * (a1 + a2));
        CHECK(lhs.cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("unperturbed_crossings: two-level crossing at 2/3") {
    const CrossingReport report = unperturbed_crossings(two_level(0.05));
    REQUIRE(report.crossings.size() == 1);
    CHECK(report.crossings[0].i == 0);
    CHECK(report.crossings[0].j == 1);
    CHECK(std::abs(report.crossings[0].a_cr - Complex(2.0 / 3.0, 0.0)) < 1e-14);
    CHECK(report.degenerate.empty());
}

TEST_CASE("unperturbed_crossings: four-level pattern") {
    const CrossingReport report = unperturbed_crossings(parse_family(kFourLevel));
    REQUIRE(report.crossings.size() == 6);
    // triple crossing of levels 1,2,3 at a = 0, then crossings with level 4
    for (int k = 0; k < 3; ++k)
        CHECK(std::abs(report.crossings[k].a_cr) < 1e-12);
    CHECK(std::abs(report.crossings[3].a_cr - Complex(2.0 / 3.0, 0.0)) < 1e-12);
    CHECK(report.crossings[3].i == 2);
    CHECK(report.crossings[3].j == 3);
    CHECK(std::abs(report.crossings[4].a_cr - Complex(12.0 / 17.0, 0.0)) < 1e-12);
    CHECK(report.crossings[4].i == 1);
    CHECK(std::abs(report.crossings[5].a_cr - Complex(0.75, 0.0)) < 1e-12);
    CHECK(report.crossings[5].i == 0);
}

TEST_CASE("unperturbed_crossings: degenerate pairs are classified") {
    FamilySpec spec = two_level(0.0);
    spec.levels[1] = spec.levels[0]; // identical
    CrossingReport report = unperturbed_crossings(spec);
    CHECK(report.crossings.empty());
    REQUIRE(report.degenerate.size() == 1);
    CHECK(report.degenerate[0].kind == DegeneratePairKind::Identical);

    spec.levels[1].e0 += 1.0; // parallel
    report = unperturbed_crossings(spec);
    CHECK(report.crossings.empty());
    REQUIRE(report.degenerate.size() == 1);
    CHECK(report.degenerate[0].kind == DegeneratePairKind::Parallel);
}

TEST_CASE("tolerances scale uniformly and reject bad factors") {
    const Tolerances base;
    const Tolerances loose = base.scaled(10.0);
    CHECK(loose.c_orth == doctest::Approx(10.0 * base.c_orth));
    CHECK(loose.dedup_radius == doctest::Approx(10.0 * base.dedup_radius));
    CHECK_THROWS_AS(base.scaled(0.0), ConfigError);
    CHECK_THROWS_AS(base.scaled(-1.0), ConfigError);
}

TEST_CASE("unperturbed_crossings agree with a brute-force scan") {
    const FamilySpec spec = parse_family(kFourLevel);
    const CrossingReport report = unperturbed_crossings(spec);
    const int samples = 20000;
    for (const auto& cr : report.crossings) {
        if (std::abs(cr.a_cr.imag()) > 1e-12)
            continue;
        const auto gap = [&](double a) {
            return std::abs(spec.levels[cr.i].eps(Complex(a, 0.0)) -
                            spec.levels[cr.j].eps(Complex(a, 0.0)));
        };
        const auto best = oracles::grid_minimum(gap, -0.5, 1.5, samples);
        CHECK(std::abs(best.a - cr.a_cr.real()) <= 2.0 / samples * 2.0 + 1e-12);
    }
}
