#include "stdec/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace stdec::cluster {

namespace {

constexpr std::size_t kMaxIterations = 300;

std::size_t weighted_pick(const std::vector<double>& weights, std::mt19937_64& rng) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (total <= 0.0) {
        // all candidate weights zero (duplicate points): fall back to uniform
        std::uniform_int_distribution<std::size_t> u(0, weights.size() - 1);
        return u(rng);
    }
    std::uniform_real_distribution<double> u(0.0, total);
    double draw = u(rng);
    for (std::size_t i = 0; i < weights.size(); ++i) {
        draw -= weights[i];
        if (draw <= 0.0) return i;
    }
    return weights.size() - 1;
}

// Generic Lloyd/PAM skeleton over a pluggable point-to-center distance.
template <typename DistFn>
std::vector<std::size_t> plus_plus_seed(std::size_t n, std::size_t k, DistFn&& dist,
                                        std::mt19937_64& rng) {
    std::vector<std::size_t> centers;
    std::uniform_int_distribution<std::size_t> first(0, n - 1);
    centers.push_back(first(rng));
    std::vector<double> best_d(n, std::numeric_limits<double>::infinity());
    while (centers.size() < k) {
        const std::size_t latest = centers.back();
        for (std::size_t i = 0; i < n; ++i)
            best_d[i] = std::min(best_d[i], dist(i, latest));
        centers.push_back(weighted_pick(best_d, rng));
    }
    return centers;
}

}  // namespace

KmeansResult kmeans(const Matrix& points, std::size_t k, std::size_t restarts,
                    std::uint64_t seed) {
    const std::size_t n = points.rows(), d = points.cols();
    if (k == 0 || k > n) throw std::invalid_argument("kmeans: need 1 <= k <= point count");
    if (restarts == 0) restarts = 1;

    KmeansResult best;
    best.inertia = std::numeric_limits<double>::infinity();
    std::mt19937_64 rng(seed);

    for (std::size_t attempt = 0; attempt < restarts; ++attempt) {
        auto point_dist = [&](std::size_t i, std::size_t j) {
            return squared_distance(points.row(i), points.row(j));
        };
        auto seeds = plus_plus_seed(n, k, point_dist, rng);
        Matrix centroids(k, d);
        for (std::size_t c = 0; c < k; ++c) centroids.set_row(c, points.row(seeds[c]));

        std::vector<std::size_t> assign(n, 0);
        std::vector<double> dist_to_own(n, 0.0);
        std::size_t iter = 0;
        bool changed = true;
        while (changed && iter < kMaxIterations) {
            ++iter;
            changed = false;
            for (std::size_t i = 0; i < n; ++i) {
                std::size_t best_c = 0;
                double best_v = std::numeric_limits<double>::infinity();
                for (std::size_t c = 0; c < k; ++c) {
                    const double v = squared_distance(points.row(i), centroids.row(c));
                    if (v < best_v) {
                        best_v = v;
                        best_c = c;
                    }
                }
                dist_to_own[i] = best_v;
                if (assign[i] != best_c) {
                    assign[i] = best_c;
                    changed = true;
                }
            }
            // update
            Matrix sums(k, d);
            std::vector<std::size_t> counts(k, 0);
            for (std::size_t i = 0; i < n; ++i) {
                ++counts[assign[i]];
                for (std::size_t c = 0; c < d; ++c) sums(assign[i], c) += points(i, c);
            }
            for (std::size_t c = 0; c < k; ++c) {
                if (counts[c] == 0) {
                    // re-seed at the point farthest from its centroid
                    std::size_t far = 0;
                    for (std::size_t i = 1; i < n; ++i)
                        if (dist_to_own[i] > dist_to_own[far]) far = i;
                    centroids.set_row(c, points.row(far));
                    dist_to_own[far] = 0.0;
                    changed = true;
                } else {
                    for (std::size_t j = 0; j < d; ++j)
                        centroids(c, j) = sums(c, j) / static_cast<double>(counts[c]);
                }
            }
        }
        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            // final assignment against final centroids
            std::size_t bc = 0;
            double bv = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c) {
                const double v = squared_distance(points.row(i), centroids.row(c));
                if (v < bv) {
                    bv = v;
                    bc = c;
                }
            }
            assign[i] = bc;
            inertia += bv;
        }
        if (inertia < best.inertia) {
            best.centroids = centroids;
            best.assignments = assign;
            best.inertia = inertia;
            best.iterations = iter;
        }
    }
    return best;
}

namespace {

class DtwCache {
  public:
    DtwCache(const Matrix& windows, const tsdist::DtwConfig& cfg)
        : windows_(windows), cfg_(cfg) {}

    double operator()(std::size_t i, std::size_t j) {
        if (i == j) return 0.0;
        const std::size_t a = std::min(i, j), b = std::max(i, j);
        const std::uint64_t key = static_cast<std::uint64_t>(a) * windows_.rows() + b;
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        const double v = tsdist::dtw(windows_.row(a), windows_.row(b), cfg_);
        cache_.emplace(key, v);
        return v;
    }

  private:
    const Matrix& windows_;
    tsdist::DtwConfig cfg_;
    std::unordered_map<std::uint64_t, double> cache_;
};

}  // namespace

KmeansResult kmedoid_dtw(const Matrix& windows, std::size_t k, const tsdist::DtwConfig& cfg,
                         std::size_t restarts, std::uint64_t seed) {
    const std::size_t n = windows.rows();
    if (k == 0 || k > n) throw std::invalid_argument("kmedoid_dtw: need 1 <= k <= point count");
    if (restarts == 0) restarts = 1;

    DtwCache dist(windows, cfg);
    KmeansResult best;
    best.inertia = std::numeric_limits<double>::infinity();
    std::mt19937_64 rng(seed);

    for (std::size_t attempt = 0; attempt < restarts; ++attempt) {
        auto medoids = plus_plus_seed(n, k, [&](std::size_t i, std::size_t j) { return dist(i, j); },
                                      rng);
        std::vector<std::size_t> assign(n, 0);
        std::vector<double> dist_to_own(n, 0.0);
        std::size_t iter = 0;
        bool changed = true;
        while (changed && iter < kMaxIterations) {
            ++iter;
            changed = false;
            for (std::size_t i = 0; i < n; ++i) {
                std::size_t bc = 0;
                double bv = std::numeric_limits<double>::infinity();
                for (std::size_t c = 0; c < k; ++c) {
                    const double v = dist(i, medoids[c]);
                    if (v < bv) {
                        bv = v;
                        bc = c;
                    }
                }
                dist_to_own[i] = bv;
                if (assign[i] != bc) {
                    assign[i] = bc;
                    changed = true;
                }
            }
            for (std::size_t c = 0; c < k; ++c) {
                std::vector<std::size_t> members;
                for (std::size_t i = 0; i < n; ++i)
                    if (assign[i] == c) members.push_back(i);
                if (members.empty()) {
                    std::size_t far = 0;
                    for (std::size_t i = 1; i < n; ++i)
                        if (dist_to_own[i] > dist_to_own[far]) far = i;
                    medoids[c] = far;
                    dist_to_own[far] = 0.0;
                    changed = true;
                    continue;
                }
                double best_cost = std::numeric_limits<double>::infinity();
                std::size_t best_m = medoids[c];
                for (std::size_t cand : members) {
                    double cost = 0.0;
                    for (std::size_t m : members) cost += dist(cand, m);
                    if (cost < best_cost) {
                        best_cost = cost;
                        best_m = cand;
                    }
                }
                if (best_m != medoids[c]) {
                    medoids[c] = best_m;
                    changed = true;
                }
            }
        }
        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t bc = 0;
            double bv = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c) {
                const double v = dist(i, medoids[c]);
                if (v < bv) {
                    bv = v;
                    bc = c;
                }
            }
            assign[i] = bc;
            inertia += bv;
        }
        if (inertia < best.inertia) {
            best.centroids = Matrix(k, windows.cols());
            for (std::size_t c = 0; c < k; ++c) best.centroids.set_row(c, windows.row(medoids[c]));
            best.assignments = assign;
            best.inertia = inertia;
            best.iterations = iter;
            best.medoid_indices = medoids;
        }
    }
    return best;
}

void detect_knee(ElbowCurve& curve) {
    const std::size_t m = curve.ks.size();
    if (m < 3) throw std::invalid_argument("elbow needs at least 3 candidate ks");
    const double k0 = static_cast<double>(curve.ks.front());
    const double k1 = static_cast<double>(curve.ks.back());
    const double lo = *std::min_element(curve.inertias.begin(), curve.inertias.end());
    const double hi = *std::max_element(curve.inertias.begin(), curve.inertias.end());
    if (!(hi > lo) || !(k1 > k0)) {
        curve.knee = curve.ks.front();
        curve.no_knee = true;
        return;
    }
    // scale both axes to [0,1]; chord runs (0, y_first) -> (1, y_last)
    const double ya = (curve.inertias.front() - lo) / (hi - lo);
    const double yb = (curve.inertias.back() - lo) / (hi - lo);
    double best_d = 0.0;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double x = (static_cast<double>(curve.ks[i]) - k0) / (k1 - k0);
        const double y = (curve.inertias[i] - lo) / (hi - lo);
        // |(yb-ya)x - (1-0)y + ya| / sqrt((yb-ya)^2 + 1)
        const double d = std::abs((yb - ya) * x - y + ya) / std::sqrt((yb - ya) * (yb - ya) + 1.0);
        if (d > best_d + 1e-15) {
            best_d = d;
            best_i = i;
        }
    }
    if (best_d < 1e-12) {
        curve.knee = curve.ks.front();
        curve.no_knee = true;
    } else {
        curve.knee = curve.ks[best_i];
        curve.no_knee = false;
    }
}

ElbowCurve elbow(const Matrix& points, const std::vector<std::size_t>& k_candidates,
                 std::size_t restarts, std::uint64_t seed) {
    if (k_candidates.size() < 3) throw std::invalid_argument("elbow needs at least 3 candidate ks");
    for (std::size_t i = 1; i < k_candidates.size(); ++i)
        if (k_candidates[i] <= k_candidates[i - 1])
            throw std::invalid_argument("elbow candidates must be strictly ascending");
    ElbowCurve curve;
    curve.ks = k_candidates;
    for (std::size_t k : k_candidates)
        curve.inertias.push_back(kmeans(points, k, restarts, seed + k).inertia);
    detect_knee(curve);
    return curve;
}

}  // namespace stdec::cluster
