#pragma once

#include <array>
#include <vector>

#include "pdpt/instance.hpp"

namespace pdpt {

inline constexpr int kRequestFeatureDim = 9;

// One row per request:
// [q, x(p), y(p), x(d), y(d), l_p, l_d, st(p), st(d)].
std::vector<std::array<double, kRequestFeatureDim>> request_features(const Instance& inst);

// Sample covariance of the request feature rows, factorized for Mahalanobis
// queries. When the covariance is singular (or |R| < 2) a ridge of
// 1e-6 * trace/dim + 1e-12 is added to the diagonal; with fewer than two
// requests the identity is used instead.
class RequestFeatureSpace {
  public:
    explicit RequestFeatureSpace(const Instance& inst);

    double mahalanobis(int r1, int r2) const;
    const std::vector<std::array<double, kRequestFeatureDim>>& rows() const { return rows_; }
    const std::array<std::array<double, kRequestFeatureDim>, kRequestFeatureDim>& covariance() const {
        return cov_;
    }
    bool ridged() const { return ridged_; }

  private:
    std::vector<std::array<double, kRequestFeatureDim>> rows_;
    std::array<std::array<double, kRequestFeatureDim>, kRequestFeatureDim> cov_{};
    std::array<std::array<double, kRequestFeatureDim>, kRequestFeatureDim> chol_{};  // lower Cholesky factor
    bool ridged_ = false;
};

// Shaw-style dissimilarity:
// th1*|q-q'| + th2*(t_pp' + t_dd') + th3*(|l_p-l_p'| + |l_d-l_d'|).
double shaw_dissimilarity(const Instance& inst, int r1, int r2, double th1, double th2, double th3);

// Min-max scaled hardness score; constant columns scale to zero.
// ID = q~ + t~(p,d) + st~(p) + st~(d) - w~(p) - w~(d).
std::vector<double> insertion_difficulty(const Instance& inst);

// IE = th1*q + th2*t(p,d) - th3*(width(p) + width(d)).
double insertion_ease(const Instance& inst, int r, double th1, double th2, double th3);

}  // namespace pdpt
