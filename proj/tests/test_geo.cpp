#include <doctest.h>

#include <cmath>

#include "pdpt/geo.hpp"
#include "pdpt/rng.hpp"

using namespace pdpt;

namespace {

// Independent great-circle reference: the atan2 form of the spherical
// distance, same mean earth radius.
double reference_haversine_hm(double lat1, double lon1, double lat2, double lon2) {
    const double rad = 3.14159265358979323846 / 180.0;
    const double phi1 = lat1 * rad, phi2 = lat2 * rad;
    const double dl = (lon2 - lon1) * rad;
    const double y = std::sqrt(std::pow(std::cos(phi2) * std::sin(dl), 2) +
                               std::pow(std::cos(phi1) * std::sin(phi2) - std::sin(phi1) * std::cos(phi2) * std::cos(dl), 2));
    const double x = std::sin(phi1) * std::sin(phi2) + std::cos(phi1) * std::cos(phi2) * std::cos(dl);
    return std::atan2(y, x) * 6371.0088 * 10.0;
}

}  // namespace

TEST_SUITE("geo") {
    TEST_CASE("zero distance for identical points") {
        CHECK(haversine_hm(37.98, 23.72, 37.98, 23.72) == doctest::Approx(0.0));
        CHECK(euclidean_hm(5.0, 7.0, 5.0, 7.0) == doctest::Approx(0.0));
        auto m = build_travel_matrix({{1.0, 2.0}, {1.0, 2.0}}, Metric::euclidean, 20.0);
        CHECK(m.travel(0, 1) == 0.0);
        CHECK(m.distance(0, 1) == 0.0);
    }

    TEST_CASE("20 km/h covers 1 km in 3 minutes") {
        auto m = build_travel_matrix({{0.0, 0.0}, {10.0, 0.0}}, Metric::euclidean, 20.0);
        CHECK(m.distance(0, 1) == doctest::Approx(10.0));
        CHECK(m.travel(0, 1) == doctest::Approx(3.0).epsilon(1e-12));
    }

    TEST_CASE("haversine matches an independent implementation around Athens") {
        Rng rng(17);
        for (int trial = 0; trial < 200; ++trial) {
            const double lat1 = 37.9 + 0.2 * rng.uniform_real();
            const double lon1 = 23.6 + 0.3 * rng.uniform_real();
            const double lat2 = 37.9 + 0.2 * rng.uniform_real();
            const double lon2 = 23.6 + 0.3 * rng.uniform_real();
            const double got = haversine_hm(lat1, lon1, lat2, lon2);
            const double want = reference_haversine_hm(lat1, lon1, lat2, lon2);
            CHECK(std::abs(got - want) < 1e-6);
        }
    }

    TEST_CASE("matrices are symmetric and unit consistent for both metrics") {
        Rng rng(3);
        for (Metric metric : {Metric::euclidean, Metric::haversine}) {
            std::vector<Point> pts;
            for (int i = 0; i < 12; ++i) {
                if (metric == Metric::euclidean)
                    pts.push_back({rng.uniform_real(0.0, 50.0), rng.uniform_real(0.0, 50.0)});
                else
                    pts.push_back({23.6 + 0.2 * rng.uniform_real(), 37.9 + 0.2 * rng.uniform_real()});
            }
            const double speed = 20.0;
            auto m = build_travel_matrix(pts, metric, speed);
            const double v = speed_hm_per_min(speed);
            for (std::size_t i = 0; i < pts.size(); ++i) {
                CHECK(m.distance(i, i) == 0.0);
                for (std::size_t j = 0; j < pts.size(); ++j) {
                    CHECK(m.distance(i, j) == m.distance(j, i));
                    CHECK(m.travel(i, j) == m.travel(j, i));
                    const double scale = std::max(1.0, m.distance(i, j));
                    CHECK(std::abs(m.travel(i, j) * v - m.distance(i, j)) <= 1e-9 * scale);
                }
            }
        }
    }

    TEST_CASE("haversine rejects out-of-range coordinates") {
        CHECK_THROWS_AS(haversine_hm(91.0, 0.0, 0.0, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(haversine_hm(0.0, 181.0, 0.0, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(build_travel_matrix({{200.0, 0.0}, {0.0, 0.0}}, Metric::haversine, 20.0),
                        std::invalid_argument);
        CHECK_THROWS_AS(build_travel_matrix({{0.0, 0.0}}, Metric::euclidean, 0.0), std::invalid_argument);
    }
}
