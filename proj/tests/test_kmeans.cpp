#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "stdec/kmeans.hpp"
#include "stdec/tsdist.hpp"

using namespace stdec;
using namespace stdec::cluster;

TEST_CASE("two separated 2-point blobs") {
    Matrix pts = Matrix::from_rows({{0.0, 0.0}, {0.0, 1.0}, {10.0, 0.0}, {10.0, 1.0}});
    auto res = kmeans(pts, 2, 4, 123);
    // centroids at blob means (0, 0.5) and (10, 0.5); each point 0.25 away squared
    CHECK(res.inertia == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(res.assignments[0] == res.assignments[1]);
    CHECK(res.assignments[2] == res.assignments[3]);
    CHECK(res.assignments[0] != res.assignments[2]);
    std::vector<double> ys{res.centroids(0, 1), res.centroids(1, 1)};
    CHECK(ys[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(ys[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("k equal to point count gives zero inertia") {
    Matrix pts = Matrix::from_rows({{1.0}, {2.0}, {5.0}});
    auto res = kmeans(pts, 3, 2, 7);
    CHECK(res.inertia == 0.0);
    std::vector<bool> used(3, false);
    for (auto a : res.assignments) used[a] = true;
    CHECK(std::all_of(used.begin(), used.end(), [](bool b) { return b; }));
}

TEST_CASE("k=1 centroid is the arithmetic mean") {
    Matrix pts = Matrix::from_rows({{1.0, 0.0}, {3.0, 2.0}, {5.0, 4.0}});
    auto res = kmeans(pts, 1, 1, 0);
    CHECK(res.centroids(0, 0) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(res.centroids(0, 1) == doctest::Approx(2.0).epsilon(1e-12));
    // inertia = total squared deviation
    double direct = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        const double dx = pts(i, 0) - 3.0, dy = pts(i, 1) - 2.0;
        direct += dx * dx + dy * dy;
    }
    CHECK(res.inertia == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("seeded runs are identical and clusters stay populated") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    Matrix pts(60, 3);
    for (std::size_t i = 0; i < pts.size(); ++i) pts.data()[i] = dist(rng);
    auto a = kmeans(pts, 7, 3, 42);
    auto b = kmeans(pts, 7, 3, 42);
    CHECK(a.inertia == b.inertia);
    CHECK(a.assignments == b.assignments);
    std::vector<std::size_t> counts(7, 0);
    for (auto x : a.assignments) ++counts[x];
    for (auto c : counts) CHECK(c > 0);
}

TEST_CASE("no single-point move can lower inertia at convergence") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Matrix pts(40, 2);
    for (std::size_t i = 0; i < pts.size(); ++i) pts.data()[i] = dist(rng);
    auto res = kmeans(pts, 4, 5, 9);
    for (std::size_t i = 0; i < pts.rows(); ++i) {
        const double own = squared_distance(pts.row(i), res.centroids.row(res.assignments[i]));
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(own <= squared_distance(pts.row(i), res.centroids.row(j)) + 1e-12);
    }
    CHECK_THROWS(kmeans(pts, 41, 1, 0));
    CHECK_THROWS(kmeans(pts, 0, 1, 0));
}

TEST_CASE("kmedoid_dtw separates obvious window groups") {
    Matrix w = Matrix::from_rows({{0.0, 0.0, 0.0},
                                  {0.1, 0.0, 0.0},
                                  {5.0, 5.0, 5.0},
                                  {5.0, 5.0, 5.1}});
    tsdist::DtwConfig cfg;
    cfg.band = 3;
    auto res = kmedoid_dtw(w, 2, cfg, 3, 1);
    CHECK(res.assignments[0] == res.assignments[1]);
    CHECK(res.assignments[2] == res.assignments[3]);
    CHECK(res.assignments[0] != res.assignments[2]);
    CHECK(res.medoid_indices.size() == 2);
    // medoids are members
    for (auto m : res.medoid_indices) CHECK(m < 4);
    // centroid rows carry the medoid series
    for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t c = 0; c < 3; ++c)
            CHECK(res.centroids(j, c) == w(res.medoid_indices[j], c));
}

TEST_CASE("k=1 medoid matches brute force") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    Matrix w(12, 5);
    for (std::size_t i = 0; i < w.size(); ++i) w.data()[i] = dist(rng);
    tsdist::DtwConfig cfg;
    cfg.band = 2;
    auto res = kmedoid_dtw(w, 1, cfg, 1, 17);

    double best = std::numeric_limits<double>::infinity();
    std::size_t best_idx = 0;
    for (std::size_t cand = 0; cand < w.rows(); ++cand) {
        double total = 0.0;
        for (std::size_t i = 0; i < w.rows(); ++i) total += tsdist::dtw(w.row(i), w.row(cand), cfg);
        if (total < best) {
            best = total;
            best_idx = cand;
        }
    }
    CHECK(res.medoid_indices[0] == best_idx);
    CHECK(res.inertia == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("knee detection on a constructed corner") {
    ElbowCurve curve;
    curve.ks = {2, 3, 4, 5, 6, 7};
    curve.inertias = {100.0, 70.0, 40.0, 38.0, 36.0, 34.0};  // sharp corner at k=4
    detect_knee(curve);
    CHECK(curve.knee == 4);
    CHECK_FALSE(curve.no_knee);
}

TEST_CASE("an exactly linear curve has no knee") {
    ElbowCurve curve;
    curve.ks = {2, 3, 4, 5};
    curve.inertias = {80.0, 60.0, 40.0, 20.0};
    detect_knee(curve);
    CHECK(curve.no_knee);
    CHECK(curve.knee == 2);  // smallest k returned, flagged
}

TEST_CASE("elbow finds the planted cluster count on blob data") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> noise(0.0, 0.05);
    Matrix pts(90, 2);
    for (std::size_t i = 0; i < 90; ++i) {
        const double cx = static_cast<double>(i % 3) * 5.0;
        pts(i, 0) = cx + noise(rng);
        pts(i, 1) = -cx + noise(rng);
    }
    auto curve = elbow(pts, {2, 3, 4, 5, 6}, 3, 2);
    CHECK(curve.knee == 3);
    // inertia non-increasing in k
    for (std::size_t i = 1; i < curve.inertias.size(); ++i)
        CHECK(curve.inertias[i] <= curve.inertias[i - 1] + 1e-9);
    CHECK_THROWS(elbow(pts, {2, 3}, 1, 0));
}
