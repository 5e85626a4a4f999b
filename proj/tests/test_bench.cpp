#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "ftsynth/bench.hpp"
#include "ftsynth/canondb.hpp"
#include "ftsynth/gateset.hpp"
#include "ftsynth/unitary.hpp"

using namespace ftsynth;

TEST_CASE("phase gate distance to identity has a closed form") {
    // For diag(1, e^{i phi}): |tr| = |1 + e^{i phi}| = 2 cos(phi/2), so the
    // distance to I is sqrt(1 - cos(phi/2)) = sqrt(2) sin(phi/4).
    for (double phi : {0.01, 0.1, 0.5, 1.0, 2.0, 3.0}) {
        const double expected = std::numbers::sqrt2 * std::sin(phi / 4.0);
        CHECK(distance(phase_gate(phi), Unitary2::identity()) ==
              doctest::Approx(expected).epsilon(1e-13));
    }
    CHECK(std::abs(phase_gate_pow2(7).d() -
                   std::polar(1.0, std::numbers::pi / 128.0)) == 0.0);
    CHECK_THROWS_AS(phase_gate_pow2(-1), std::invalid_argument);
    CHECK_THROWS_AS(phase_gate_pow2(61), std::invalid_argument);
}

TEST_CASE("random targets are reproducible and independent per index") {
    const Unitary2 a = sample_random_target(77, 3);
    const Unitary2 b = sample_random_target(77, 3);
    CHECK(std::bit_cast<std::uint64_t>(a.a().real()) ==
          std::bit_cast<std::uint64_t>(b.a().real()));
    CHECK(std::bit_cast<std::uint64_t>(a.d().imag()) ==
          std::bit_cast<std::uint64_t>(b.d().imag()));

    const Unitary2 c = sample_random_target(77, 4);
    CHECK(distance(a, c) > 1e-6);
    const Unitary2 d = sample_random_target(78, 3);
    CHECK(distance(a, d) > 1e-6);
    CHECK(a.unitarity_defect() <= 1e-14);
}

TEST_CASE("fixtures match their published distances within ten percent") {
    const auto checks = verify_fixtures();
    REQUIRE(checks.size() == 2);
    CHECK(checks[0].name == "U31");
    CHECK(checks[0].length == 31);
    CHECK(checks[0].t_count == 15);
    CHECK(checks[0].rel_err <= 0.10);
    CHECK(checks[1].name == "U46");
    CHECK(checks[1].length == 46);
    CHECK(checks[1].t_count == 23);
    CHECK(checks[1].rel_err <= 0.10);
}

TEST_CASE("scaling fit recovers an exact law") {
    const double a = 0.292;
    const double b = -0.0511;
    std::vector<double> mean(16);
    for (int l = 0; l < 16; ++l) {
        mean[static_cast<std::size_t>(l)] = a * std::pow(10.0, b * l);
    }
    const ScalingFit fit = fit_scaling_law(mean, 4, 15);
    CHECK(std::abs(fit.a - a) <= 1e-12);
    CHECK(std::abs(fit.b - b) <= 1e-12);
    CHECK(fit.residual <= 1e-12);
    CHECK_FALSE(fit.truncated);
    CHECK(fit.l_lo == 4);
    CHECK(fit.l_hi == 15);
}

TEST_CASE("scaling fit truncates before a zero mean") {
    std::vector<double> mean{1.0, 0.5, 0.25, 0.125, 0.0, 0.9};
    const ScalingFit fit = fit_scaling_law(mean, 0, 5);
    CHECK(fit.truncated);
    CHECK(fit.l_hi == 3);
    CHECK(fit.b == doctest::Approx(std::log10(0.5)).epsilon(1e-12));

    CHECK_THROWS_AS(fit_scaling_law(mean, 4, 5), std::invalid_argument);
    CHECK_THROWS_AS(fit_scaling_law(mean, 3, 2), std::invalid_argument);
    CHECK_THROWS_AS(fit_scaling_law(mean, 0, 9), std::invalid_argument);
}

TEST_CASE("scaling experiment averages profiles deterministically") {
    const CanonDb db = build_canon_db(2);
    const ScalingResult r1 = scaling_experiment(5, 3, 4, db, 1, 4);
    const ScalingResult r2 = scaling_experiment(5, 3, 4, db, 1, 4);
    REQUIRE(r1.profiles.size() == 3);
    REQUIRE(r1.mean_by_l.size() == 5);
    for (std::size_t l = 0; l < r1.mean_by_l.size(); ++l) {
        CHECK(std::bit_cast<std::uint64_t>(r1.mean_by_l[l]) ==
              std::bit_cast<std::uint64_t>(r2.mean_by_l[l]));
        CHECK(r1.mean_by_l[l] > 0.0);
        if (l > 0) {
            CHECK(r1.mean_by_l[l] <= r1.mean_by_l[l - 1] + kTieEps);
        }
    }
    CHECK(r1.fit.b < 0.0);
    CHECK(r1.fit.sample_count == 3);
}

TEST_CASE("csv output is stable, labeled, and parseable") {
    const CanonDb db = build_canon_db(2);
    const ScalingResult res = scaling_experiment(9, 2, 3, db, 0, 3);
    const std::vector<std::string> labels{"0", "1"};

    std::ostringstream out1, out2;
    write_profile_csv(out1, "# config a=1\n", labels, res.profiles, &res.fit);
    write_profile_csv(out2, "# config a=1\n", labels, res.profiles, &res.fit);
    CHECK(out1.str() == out2.str());

    std::istringstream in(out1.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "# config a=1");
    std::getline(in, line);
    CHECK(line == "target,l,dist,t_count,seq");
    int rows = 0;
    bool saw_fit = false;
    while (std::getline(in, line)) {
        if (line.rfind("# fit {", 0) == 0) {
            saw_fit = true;
            continue;
        }
        ++rows;
        // Columns: target,l,dist,t_count,seq. The seq field is free of
        // commas, so the comma count is fixed.
        CHECK(std::count(line.begin(), line.end(), ',') == 4);
    }
    CHECK(rows == 2 * 4);
    CHECK(saw_fit);
}

TEST_CASE("g17 formatting round-trips doubles") {
    for (double x : {0.1, 1.0 / 3.0, 8.6774672e-3, 1e-300, 0.0}) {
        const std::string s = fmt_g17(x);
        CHECK(std::stod(s) == x);
    }
}
