#include "pdpt/features.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace pdpt {

namespace {
constexpr int kDim = kRequestFeatureDim;
using Mat = std::array<std::array<double, kDim>, kDim>;

// Plain Cholesky; returns false when the matrix is not positive definite.
bool cholesky(const Mat& m, Mat& lower) {
    for (auto& row : lower) row.fill(0.0);
    for (int i = 0; i < kDim; ++i) {
        for (int j = 0; j <= i; ++j) {
            double sum = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            for (int k = 0; k < j; ++k)
                sum -= lower[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] *
                       lower[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
            if (i == j) {
                if (sum <= 0.0 || !std::isfinite(sum)) return false;
                lower[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = std::sqrt(sum);
            } else {
                lower[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    sum / lower[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)];
            }
        }
    }
    return true;
}
}  // namespace

std::vector<std::array<double, kDim>> request_features(const Instance& inst) {
    std::vector<std::array<double, kDim>> rows;
    rows.reserve(inst.num_requests());
    for (const auto& req : inst.requests) {
        const Location& p = inst.loc(req.pickup);
        const Location& d = inst.loc(req.delivery);
        rows.push_back({req.demand, p.x, p.y, d.x, d.y, p.tw_open, d.tw_open, p.service, d.service});
    }
    return rows;
}

RequestFeatureSpace::RequestFeatureSpace(const Instance& inst) : rows_(request_features(inst)) {
    const std::size_t n = rows_.size();
    for (auto& row : cov_) row.fill(0.0);
    if (n >= 2) {
        std::array<double, kDim> mean{};
        for (const auto& row : rows_)
            for (int f = 0; f < kDim; ++f) mean[static_cast<std::size_t>(f)] += row[static_cast<std::size_t>(f)];
        for (auto& v : mean) v /= static_cast<double>(n);
        for (const auto& row : rows_)
            for (int a = 0; a < kDim; ++a)
                for (int b = 0; b < kDim; ++b)
                    cov_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] +=
                        (row[static_cast<std::size_t>(a)] - mean[static_cast<std::size_t>(a)]) *
                        (row[static_cast<std::size_t>(b)] - mean[static_cast<std::size_t>(b)]);
        for (auto& row : cov_)
            for (auto& v : row) v /= static_cast<double>(n - 1);
    }

    if (!cholesky(cov_, chol_)) {
        double trace = 0.0;
        for (int f = 0; f < kDim; ++f) trace += cov_[static_cast<std::size_t>(f)][static_cast<std::size_t>(f)];
        double ridge = 1e-6 * trace / kDim + 1e-12;
        if (n < 2 || trace == 0.0) ridge = 1.0;  // degenerate: identity covariance
        Mat ridged = cov_;
        for (int f = 0; f < kDim; ++f) ridged[static_cast<std::size_t>(f)][static_cast<std::size_t>(f)] += ridge;
        ridged_ = true;
        if (!cholesky(ridged, chol_)) throw std::runtime_error("feature space: covariance cannot be factorized");
    }
}

double RequestFeatureSpace::mahalanobis(int r1, int r2) const {
    const auto& a = rows_[static_cast<std::size_t>(r1)];
    const auto& b = rows_[static_cast<std::size_t>(r2)];
    std::array<double, kDim> diff;
    for (int f = 0; f < kDim; ++f)
        diff[static_cast<std::size_t>(f)] = a[static_cast<std::size_t>(f)] - b[static_cast<std::size_t>(f)];
    // Solve L y = diff; the squared distance is |y|^2.
    std::array<double, kDim> y;
    for (int i = 0; i < kDim; ++i) {
        double sum = diff[static_cast<std::size_t>(i)];
        for (int k = 0; k < i; ++k)
            sum -= chol_[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] * y[static_cast<std::size_t>(k)];
        y[static_cast<std::size_t>(i)] = sum / chol_[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
    }
    double sq = 0.0;
    for (int i = 0; i < kDim; ++i) sq += y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
    return std::sqrt(std::max(0.0, sq));
}

double shaw_dissimilarity(const Instance& inst, int r1, int r2, double th1, double th2, double th3) {
    const auto& a = inst.requests[static_cast<std::size_t>(r1)];
    const auto& b = inst.requests[static_cast<std::size_t>(r2)];
    return th1 * std::abs(a.demand - b.demand) + th2 * (inst.time(a.pickup, b.pickup) + inst.time(a.delivery, b.delivery)) +
           th3 * (std::abs(inst.loc(a.pickup).tw_open - inst.loc(b.pickup).tw_open) +
                  std::abs(inst.loc(a.delivery).tw_open - inst.loc(b.delivery).tw_open));
}

std::vector<double> insertion_difficulty(const Instance& inst) {
    const std::size_t n = inst.num_requests();
    std::vector<double> out(n, 0.0);
    if (n == 0) return out;
    enum Term { Q, T, STP, STD, WP, WD, NUM };
    std::array<std::vector<double>, NUM> vals;
    for (auto& v : vals) v.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
        const auto& req = inst.requests[r];
        const Location& p = inst.loc(req.pickup);
        const Location& d = inst.loc(req.delivery);
        vals[Q][r] = req.demand;
        vals[T][r] = inst.time(req.pickup, req.delivery);
        vals[STP][r] = p.service;
        vals[STD][r] = d.service;
        vals[WP][r] = p.tw_close - p.tw_open;
        vals[WD][r] = d.tw_close - d.tw_open;
    }
    std::array<double, NUM> lo, hi;
    for (int term = 0; term < NUM; ++term) {
        lo[static_cast<std::size_t>(term)] = *std::min_element(vals[static_cast<std::size_t>(term)].begin(),
                                                               vals[static_cast<std::size_t>(term)].end());
        hi[static_cast<std::size_t>(term)] = *std::max_element(vals[static_cast<std::size_t>(term)].begin(),
                                                               vals[static_cast<std::size_t>(term)].end());
    }
    auto scaled = [&](int term, std::size_t r) {
        const double span = hi[static_cast<std::size_t>(term)] - lo[static_cast<std::size_t>(term)];
        if (span <= 0.0) return 0.0;
        return (vals[static_cast<std::size_t>(term)][r] - lo[static_cast<std::size_t>(term)]) / span;
    };
    for (std::size_t r = 0; r < n; ++r)
        out[r] = scaled(Q, r) + scaled(T, r) + scaled(STP, r) + scaled(STD, r) - scaled(WP, r) - scaled(WD, r);
    return out;
}

double insertion_ease(const Instance& inst, int r, double th1, double th2, double th3) {
    const auto& req = inst.requests[static_cast<std::size_t>(r)];
    const Location& p = inst.loc(req.pickup);
    const Location& d = inst.loc(req.delivery);
    return th1 * req.demand + th2 * inst.time(req.pickup, req.delivery) -
           th3 * ((p.tw_close - p.tw_open) + (d.tw_close - d.tw_open));
}

}  // namespace pdpt
