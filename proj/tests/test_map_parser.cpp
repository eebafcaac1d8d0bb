#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "conf/circle_map.hpp"
#include "conf/map_parser.hpp"

using conf::AngleMap;
using conf::MapParseError;
using conf::parse_map;
using conf::two_pi;

namespace {

double sup_gap(const AngleMap& a, const AngleMap& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i <= 512; ++i) {
        const double t = static_cast<double>(i) * two_pi / 512.0;
        worst = std::max(worst, std::abs(a(t) - b(t)));
    }
    return worst;
}

}  // namespace

TEST_CASE("atoms parse to the built-in families") {
    CHECK(sup_gap(parse_map("identity"), AngleMap::identity()) == 0.0);
    CHECK(sup_gap(parse_map("square"), AngleMap::square()) == 0.0);
    CHECK(sup_gap(parse_map("pwl:lambda=0.01"), AngleMap::pwl(0.01)) == 0.0);
    CHECK(sup_gap(parse_map("mobius:a=0.5+0i,rot=0"), AngleMap::moebius({0.5, 0.0})) <= 1e-15);
    CHECK(sup_gap(parse_map("mobius:a=0.3-0.4i,rot=1.25"),
                  AngleMap::moebius({0.3, -0.4}, 1.25)) <= 1e-15);
    // rot optional, bare real a accepted
    CHECK(sup_gap(parse_map("mobius:a=0.2"), AngleMap::moebius({0.2, 0.0})) <= 1e-15);
    CHECK(sup_gap(parse_map(" identity "), AngleMap::identity()) == 0.0);
}

TEST_CASE("inversion and composition nest") {
    CHECK(sup_gap(parse_map("inv(pwl:lambda=0.01)"), AngleMap::pwl(0.01).inverse()) == 0.0);
    const auto composite = parse_map("comp(mobius:a=0.3+0i,rot=0,square)");
    CHECK(sup_gap(composite,
                  AngleMap::compose(AngleMap::moebius({0.3, 0.0}), AngleMap::square())) <= 1e-15);
    const auto nested = parse_map("comp(inv(square),comp(square,identity))");
    CHECK(sup_gap(nested, AngleMap::identity()) <= 1e-9);
    // a mobius atom as the second argument keeps its own keys
    const auto m2 = parse_map("comp(square,mobius:a=0.1+0i,rot=0.5)");
    CHECK(sup_gap(m2, AngleMap::compose(AngleMap::square(),
                                        AngleMap::moebius({0.1, 0.0}, 0.5))) <= 1e-15);
}

TEST_CASE("table expressions round-trip through CSV") {
    const std::string path = "/tmp/conf_parser_table.csv";
    {
        std::ofstream out(path);
        out.precision(17);
        out << "t,theta\n";
        const std::size_t n = 64;
        for (std::size_t i = 0; i <= n; ++i) {
            const double t = static_cast<double>(i) * two_pi / static_cast<double>(n);
            out << t << "," << AngleMap::square()(t) << "\n";
        }
    }
    const auto m = parse_map("table:" + path);
    CHECK(sup_gap(m, AngleMap::square()) <= 0.02);  // piecewise-linear resampling
    const auto inv = parse_map("inv(table:" + path + ")");
    CHECK(sup_gap(AngleMap::compose(inv, m), AngleMap::identity()) <= 1e-9);
    std::remove(path.c_str());
    CHECK_THROWS_AS(parse_map("table:" + path), std::runtime_error);
}

TEST_CASE("syntax errors carry the offending position and a caret") {
    auto position_of = [](const std::string& expr) {
        try {
            parse_map(expr);
        } catch (const MapParseError& e) {
            CHECK(std::string(e.what()).find('^') != std::string::npos);
            return e.position;
        }
        return static_cast<std::size_t>(-1);
    };
    CHECK(position_of("bogus") == 0);
    CHECK(position_of("inv(identity") == 12);     // missing ')'
    CHECK(position_of("comp(identity)") == 13);   // missing ','
    CHECK(position_of("mobius:b=1") == 7);        // unknown key
    CHECK(position_of("pwl:lambda=") == 11);      // missing number
    CHECK(position_of("mobius:a=0.5+1") == 14);   // missing 'i'
    CHECK(position_of("identity junk") == 9);     // trailing characters
    CHECK(position_of("mobius:rot=1") == 12);     // a missing
}

TEST_CASE("constructor validation propagates") {
    CHECK_THROWS_AS(parse_map("mobius:a=1.5+0i"), std::domain_error);
    CHECK_THROWS_AS(parse_map("pwl:lambda=2.0"), std::domain_error);
}
