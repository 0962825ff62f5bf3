#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace pdpt {

enum class Metric { haversine, euclidean };

// Square dense matrix of doubles, row-major.
class DenseMatrix {
  public:
    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

    std::size_t size() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }

    const std::vector<double>& raw() const { return data_; }
    std::vector<double>& raw() { return data_; }

    bool operator==(const DenseMatrix& other) const = default;

  private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

// Great-circle distance in hectometers between two (lat, lon) points in degrees.
// Throws std::invalid_argument when a coordinate is outside its valid range.
double haversine_hm(double lat1, double lon1, double lat2, double lon2);

// Planar distance in hectometers; coordinates are interpreted as hectometer units.
double euclidean_hm(double x1, double y1, double x2, double y2);

struct Point {
    double x;
    double y;
};

// Distances c_ij in hectometers and travel times t_ij in minutes, where
// t_ij = c_ij / (speed in hm/min). A vehicle at 20 km/h covers 1 km in 3 minutes.
struct TravelMatrices {
    DenseMatrix travel;
    DenseMatrix distance;
};

TravelMatrices build_travel_matrix(const std::vector<Point>& pts, Metric metric, double speed_kmh);

inline double speed_hm_per_min(double speed_kmh) { return speed_kmh * 10.0 / 60.0; }

}  // namespace pdpt
