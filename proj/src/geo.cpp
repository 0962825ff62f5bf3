#include "pdpt/geo.hpp"

#include <cmath>

namespace pdpt {

namespace {
constexpr double kEarthRadiusKm = 6371.0088;
constexpr double kPi = 3.14159265358979323846;

double deg2rad(double d) { return d * kPi / 180.0; }
}  // namespace

double haversine_hm(double lat1, double lon1, double lat2, double lon2) {
    if (std::abs(lat1) > 90.0 || std::abs(lat2) > 90.0)
        throw std::invalid_argument("haversine: latitude out of range [-90, 90]");
    if (std::abs(lon1) > 180.0 || std::abs(lon2) > 180.0)
        throw std::invalid_argument("haversine: longitude out of range [-180, 180]");
    const double phi1 = deg2rad(lat1);
    const double phi2 = deg2rad(lat2);
    const double dphi = deg2rad(lat2 - lat1);
    const double dlam = deg2rad(lon2 - lon1);
    const double s1 = std::sin(dphi / 2.0);
    const double s2 = std::sin(dlam / 2.0);
    const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
    const double km = 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
    return km * 10.0;  // km -> hm
}

double euclidean_hm(double x1, double y1, double x2, double y2) {
    const double dx = x2 - x1;
    const double dy = y2 - y1;
    return std::sqrt(dx * dx + dy * dy);
}

TravelMatrices build_travel_matrix(const std::vector<Point>& pts, Metric metric, double speed_kmh) {
    if (speed_kmh <= 0.0) throw std::invalid_argument("build_travel_matrix: speed must be positive");
    const std::size_t n = pts.size();
    TravelMatrices m{DenseMatrix(n), DenseMatrix(n)};
    const double v = speed_hm_per_min(speed_kmh);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = metric == Metric::haversine
                                 ? haversine_hm(pts[i].y, pts[i].x, pts[j].y, pts[j].x)
                                 : euclidean_hm(pts[i].x, pts[i].y, pts[j].x, pts[j].y);
            m.distance(i, j) = d;
            m.distance(j, i) = d;
            m.travel(i, j) = d / v;
            m.travel(j, i) = d / v;
        }
    }
    return m;
}

}  // namespace pdpt
