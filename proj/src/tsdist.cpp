#include "stdec/tsdist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace stdec::tsdist {

namespace {

inline double point_cost(double x, double y, PointCost pc) {
    const double d = x - y;
    return pc == PointCost::squared_diff ? d * d : std::abs(d);
}

void check_inputs(std::span<const double> a, std::span<const double> b, const DtwConfig& cfg) {
    if (a.size() != b.size()) throw std::invalid_argument("dtw: length mismatch");
    if (a.empty()) throw std::invalid_argument("dtw: empty series");
    if (cfg.band < 1 || cfg.band > a.size())
        throw std::invalid_argument("dtw: band radius must lie in [1, n]");
}

}  // namespace

double dtw(std::span<const double> a, std::span<const double> b, const DtwConfig& cfg) {
    check_inputs(a, b, cfg);
    const std::size_t n = a.size();
    const std::size_t r = cfg.band;
    const double inf = std::numeric_limits<double>::infinity();
    // D[i][j] over two rolling rows, band-restricted
    std::vector<double> prev(n, inf), cur(n, inf);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j0 = i > r ? i - r : 0;
        const std::size_t j1 = std::min(n - 1, i + r);
        std::fill(cur.begin(), cur.end(), inf);
        for (std::size_t j = j0; j <= j1; ++j) {
            const double c = point_cost(a[i], b[j], cfg.point_cost);
            double best;
            if (i == 0 && j == 0) {
                best = 0.0;
            } else {
                best = inf;
                if (j > 0) best = std::min(best, cur[j - 1]);
                if (i > 0) best = std::min(best, prev[j]);
                if (i > 0 && j > 0) best = std::min(best, prev[j - 1]);
            }
            cur[j] = c + best;
        }
        std::swap(prev, cur);
    }
    return prev[n - 1];
}

namespace {

double brute_recurse(std::span<const double> a, std::span<const double> b, const DtwConfig& cfg,
                     std::size_t i, std::size_t j, double acc) {
    const std::size_t n = a.size();
    const std::size_t r = cfg.band;
    const std::size_t d = i > j ? i - j : j - i;
    if (d > r) return std::numeric_limits<double>::infinity();
    acc += point_cost(a[i], b[j], cfg.point_cost);
    if (i == n - 1 && j == n - 1) return acc;
    double best = std::numeric_limits<double>::infinity();
    if (i + 1 < n) best = std::min(best, brute_recurse(a, b, cfg, i + 1, j, acc));
    if (j + 1 < n) best = std::min(best, brute_recurse(a, b, cfg, i, j + 1, acc));
    if (i + 1 < n && j + 1 < n) best = std::min(best, brute_recurse(a, b, cfg, i + 1, j + 1, acc));
    return best;
}

}  // namespace

double dtw_bruteforce(std::span<const double> a, std::span<const double> b,
                      const DtwConfig& cfg) {
    check_inputs(a, b, cfg);
    if (a.size() > 8) throw std::invalid_argument("dtw_bruteforce: refuses n > 8");
    return brute_recurse(a, b, cfg, 0, 0, 0.0);
}

double euclidean_sq(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("euclidean_sq: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

}  // namespace stdec::tsdist
