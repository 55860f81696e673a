#include "stdec/gradcheck.hpp"

#include <cmath>
#include <stdexcept>

namespace stdec::nn {

GradCheckReport finite_diff_check(std::span<double* const> params,
                                  std::span<const double> analytic,
                                  const std::function<double()>& loss,
                                  double tolerance) {
    if (params.size() != analytic.size())
        throw std::invalid_argument("finite_diff_check: size mismatch");

    GradCheckReport report;
    const double l0 = loss();
    const double l1 = loss();
    if (l0 != l1) {
        report.pass = false;
        report.note = "loss is not deterministic; gradient check aborted";
        report.max_rel_err = std::abs(l0 - l1);
        return report;
    }

    for (std::size_t i = 0; i < params.size(); ++i) {
        double* theta = params[i];
        const double saved = *theta;
        const double h = 1e-5 * (1.0 + std::abs(saved));
        *theta = saved + h;
        const double lp = loss();
        *theta = saved - h;
        const double lm = loss();
        *theta = saved;
        const double numeric = (lp - lm) / (2.0 * h);
        const double a = analytic[i];
        const double denom = std::max(std::abs(a) + std::abs(numeric), 1e-6);
        const double rel = std::abs(a - numeric) / denom;
        if (rel > report.max_rel_err) {
            report.max_rel_err = rel;
            report.worst_index = i;
            report.analytic_at_worst = a;
            report.numeric_at_worst = numeric;
        }
    }
    report.pass = report.max_rel_err <= tolerance;
    return report;
}

}  // namespace stdec::nn
