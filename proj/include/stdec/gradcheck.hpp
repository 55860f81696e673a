#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace stdec::nn {

struct GradCheckReport {
    bool pass = false;
    double max_rel_err = 0.0;
    std::size_t worst_index = 0;
    double analytic_at_worst = 0.0;
    double numeric_at_worst = 0.0;
    std::string note;
};

// Central-difference check of an analytic gradient against a deterministic
// scalar loss.  `params` are perturbed in place and restored.  The loss is
// evaluated twice up front; a mismatch aborts the check, because finite
// differences on a non-deterministic function measure noise.
GradCheckReport finite_diff_check(std::span<double* const> params,
                                  std::span<const double> analytic,
                                  const std::function<double()>& loss,
                                  double tolerance = 1e-4);

}  // namespace stdec::nn
