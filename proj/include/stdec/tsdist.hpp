#pragma once

#include <cstddef>
#include <span>

namespace stdec::tsdist {

enum class PointCost { squared_diff, abs_diff };

struct DtwConfig {
    std::size_t band = 6;  // Sakoe-Chiba radius r, 1 <= r <= series length
    PointCost point_cost = PointCost::squared_diff;
};

// Minimum accumulated point cost over monotone warping paths with |i-j| <= r.
// Raw cost: no square root, no path-length normalization.  Equal lengths only.
double dtw(std::span<const double> a, std::span<const double> b, const DtwConfig& cfg);

// Exhaustive path enumeration; test oracle, refuses n > 8.
double dtw_bruteforce(std::span<const double> a, std::span<const double> b,
                      const DtwConfig& cfg);

double euclidean_sq(std::span<const double> a, std::span<const double> b);

}  // namespace stdec::tsdist
