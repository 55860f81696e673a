#pragma once

#include <cstdint>
#include <vector>

#include "stdec/matrix.hpp"
#include "stdec/tsdist.hpp"

namespace stdec::cluster {

struct KmeansResult {
    Matrix centroids;  // k x d (medoid series for the DTW variant)
    std::vector<std::size_t> assignments;
    double inertia = 0.0;
    std::size_t iterations = 0;
    std::vector<std::size_t> medoid_indices;  // DTW variant only
};

// k-means++ seeding, Lloyd iterations to an assignment fixpoint (300 cap),
// best inertia across restarts.  Inertia is summed squared distance.  An
// emptied cluster is re-seeded at the point farthest from its centroid.
KmeansResult kmeans(const Matrix& points, std::size_t k, std::size_t restarts,
                    std::uint64_t seed);

// PAM-style k-medoids under banded DTW: assignment by DTW to medoids, medoid
// update = member minimizing summed DTW within its cluster.  Inertia is
// summed DTW cost.
KmeansResult kmedoid_dtw(const Matrix& windows, std::size_t k, const tsdist::DtwConfig& cfg,
                         std::size_t restarts, std::uint64_t seed);

struct ElbowCurve {
    std::vector<std::size_t> ks;
    std::vector<double> inertias;
    std::size_t knee = 0;
    bool no_knee = false;
};

// Knee = k maximizing perpendicular distance from (k, inertia) to the chord
// joining the curve's endpoints, after min-max scaling both axes.  A flat
// (exactly linear) curve has no knee; the smallest k is returned flagged.
void detect_knee(ElbowCurve& curve);

ElbowCurve elbow(const Matrix& points, const std::vector<std::size_t>& k_candidates,
                 std::size_t restarts, std::uint64_t seed);

}  // namespace stdec::cluster
