#include "stdec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace stdec::metrics {

void LabelGrid::validate() const {
    if (labels.size() != timestamps * sensors)
        throw std::invalid_argument("LabelGrid: label count does not match shape");
}

LabelGrid grid_from_assignments(const dec::Assignments& a, std::size_t sensors) {
    if (a.hard.empty() || a.hard.size() % sensors != 0)
        throw std::invalid_argument("assignments do not tile a sensor grid");
    LabelGrid grid;
    grid.sensors = sensors;
    grid.timestamps = a.hard.size() / sensors;
    grid.labels.assign(grid.timestamps * grid.sensors, 0);
    for (std::size_t r = 0; r < a.hard.size(); ++r) {
        // points are (t, i) ordered: row r = block * s + i
        grid.labels[r] = a.hard[r];
    }
    return grid;
}

namespace {

// per-timestamp run scan shared by both metrics: returns (sum len^2, sum
// len*(count_label - len))
std::pair<double, double> scan_row(const LabelGrid& grid, std::size_t t) {
    const std::size_t s = grid.sensors;
    // label ids are unbounded; use a local association list over the row
    std::vector<std::pair<std::size_t, std::size_t>> counts;  // (label, count)
    auto count_of = [&](std::size_t label) -> std::size_t {
        for (auto& [l, c] : counts)
            if (l == label) return c;
        return 0;
    };
    for (std::size_t i = 0; i < s; ++i) {
        const std::size_t label = grid.at(t, i);
        bool found = false;
        for (auto& [l, c] : counts)
            if (l == label) {
                ++c;
                found = true;
            }
        if (!found) counts.emplace_back(label, 1);
    }
    double conn = 0.0, disc = 0.0;
    std::size_t i = 0;
    while (i < s) {
        std::size_t j = i;
        while (j + 1 < s && grid.at(t, j + 1) == grid.at(t, i)) ++j;
        const double len = static_cast<double>(j - i + 1);
        conn += len * len;
        disc += len * (static_cast<double>(count_of(grid.at(t, i))) - len);
        i = j + 1;
    }
    return {conn, disc};
}

}  // namespace

double connectivity(const LabelGrid& grid) {
    grid.validate();
    double total = 0.0;
    for (std::size_t t = 0; t < grid.timestamps; ++t) total += scan_row(grid, t).first;
    return total;
}

double disconnectivity(const LabelGrid& grid) {
    grid.validate();
    double total = 0.0;
    for (std::size_t t = 0; t < grid.timestamps; ++t) total += scan_row(grid, t).second;
    return total;
}

SpatialMetricSeries spatial_metric_series(const LabelGrid& grid) {
    grid.validate();
    SpatialMetricSeries series;
    const double s2 = static_cast<double>(grid.sensors) * static_cast<double>(grid.sensors);
    double sum = 0.0;
    for (std::size_t t = 0; t < grid.timestamps; ++t) {
        auto [conn, disc] = scan_row(grid, t);
        const double sm = (conn - disc) / s2;
        series.per_timestamp.push_back(sm);
        sum += sm;
    }
    series.aggregate = sum / static_cast<double>(grid.timestamps);
    return series;
}

CompactnessReport temporal_compactness(const std::vector<std::size_t>& hard,
                                       const Matrix& windows, const Matrix& latents,
                                       std::size_t k, std::size_t w,
                                       const tsdist::DtwConfig& cfg) {
    if (hard.size() != windows.rows() || hard.size() != latents.rows())
        throw std::invalid_argument("temporal_compactness: input sizes mismatch");
    CompactnessReport rep;
    rep.per_cluster.assign(k, 0.0);
    rep.cluster_empty.assign(k, false);
    rep.medoid_rows.assign(k, 0);

    double total = 0.0;
    std::size_t nonempty = 0;
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < hard.size(); ++i)
            if (hard[i] == j) members.push_back(i);
        if (members.empty()) {
            rep.cluster_empty[j] = true;
            continue;
        }
        // latent mean of the cluster
        std::vector<double> mean(latents.cols(), 0.0);
        for (std::size_t m : members)
            for (std::size_t c = 0; c < latents.cols(); ++c) mean[c] += latents(m, c);
        for (double& v : mean) v /= static_cast<double>(members.size());
        // medoid: member latent nearest the mean
        std::size_t medoid = members[0];
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t m : members) {
            const double d = squared_distance(latents.row(m), std::span<const double>(mean));
            if (d < best) {
                best = d;
                medoid = m;
            }
        }
        rep.medoid_rows[j] = medoid;
        double sum = 0.0;
        for (std::size_t m : members)
            sum += tsdist::dtw(windows.row(m), windows.row(medoid), cfg);
        rep.per_cluster[j] = sum / static_cast<double>(members.size());
        total += rep.per_cluster[j];
        ++nonempty;
    }
    if (nonempty == 0) throw std::runtime_error("all clusters empty");
    rep.normalized_total = total / static_cast<double>(nonempty) / static_cast<double>(w);
    return rep;
}

double regularized_incomplete_beta(double a, double b, double x) {
    if (x < 0.0 || x > 1.0) throw std::invalid_argument("incomplete beta: x outside [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;

    // continued fraction (Lentz)
    auto betacf = [](double a_, double b_, double x_) {
        constexpr int kMaxIter = 300;
        constexpr double kEps = 3e-14, kFpMin = 1e-300;
        const double qab = a_ + b_, qap = a_ + 1.0, qam = a_ - 1.0;
        double c = 1.0, d = 1.0 - qab * x_ / qap;
        if (std::abs(d) < kFpMin) d = kFpMin;
        d = 1.0 / d;
        double h = d;
        for (int m = 1; m <= kMaxIter; ++m) {
            const double m2 = 2.0 * m;
            double aa = m * (b_ - m) * x_ / ((qam + m2) * (a_ + m2));
            d = 1.0 + aa * d;
            if (std::abs(d) < kFpMin) d = kFpMin;
            c = 1.0 + aa / c;
            if (std::abs(c) < kFpMin) c = kFpMin;
            d = 1.0 / d;
            h *= d * c;
            aa = -(a_ + m) * (qab + m) * x_ / ((a_ + m2) * (qap + m2));
            d = 1.0 + aa * d;
            if (std::abs(d) < kFpMin) d = kFpMin;
            c = 1.0 + aa / c;
            if (std::abs(c) < kFpMin) c = kFpMin;
            d = 1.0 / d;
            const double del = d * c;
            h *= del;
            if (std::abs(del - 1.0) < kEps) break;
        }
        return h;
    };

    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

TTestResult welch_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2)
        throw std::invalid_argument("welch_t_test: each sample needs >= 2 values");
    auto stats = [](std::span<const double> x) {
        double mean = 0.0;
        for (double v : x) mean += v;
        mean /= static_cast<double>(x.size());
        double var = 0.0;
        for (double v : x) var += (v - mean) * (v - mean);
        var /= static_cast<double>(x.size() - 1);
        return std::pair{mean, var};
    };
    const auto [ma, va] = stats(a);
    const auto [mb, vb] = stats(b);
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    const double se2 = va / na + vb / nb;
    if (se2 <= 0.0) throw std::runtime_error("welch_t_test: both samples degenerate");

    TTestResult res;
    res.t = (ma - mb) / std::sqrt(se2);
    res.df = se2 * se2 /
             ((va / na) * (va / na) / (na - 1.0) + (vb / nb) * (vb / nb) / (nb - 1.0));
    // two-sided p: P(|T| > t) = I_{df/(df+t^2)}(df/2, 1/2)
    const double x = res.df / (res.df + res.t * res.t);
    res.p = regularized_incomplete_beta(res.df / 2.0, 0.5, x);
    return res;
}

ModelReport evaluate_model(const std::string& name, const dec::Assignments& a,
                           const Matrix& windows, const Matrix& latents, std::size_t sensors,
                           std::size_t k, std::size_t w, const tsdist::DtwConfig& cfg) {
    ModelReport rep;
    rep.model = name;
    LabelGrid grid = grid_from_assignments(a, sensors);
    rep.connectivity_raw = connectivity(grid);
    rep.disconnectivity_raw = disconnectivity(grid);
    const double norm = static_cast<double>(grid.timestamps) *
                        static_cast<double>(sensors) * static_cast<double>(sensors);
    rep.connectivity_norm = rep.connectivity_raw / norm;
    rep.disconnectivity_norm = rep.disconnectivity_raw / norm;
    rep.sm_series = spatial_metric_series(grid);
    rep.spatial_metric = rep.sm_series.aggregate;
    rep.compactness = temporal_compactness(a.hard, windows, latents, k, w, cfg);
    for (std::size_t j = 0; j < k; ++j)
        if (rep.compactness.cluster_empty[j]) rep.degenerate_clusters.push_back(j);
    return rep;
}

ComparisonReport assemble_report(const std::vector<ModelReport>& runs) {
    if (runs.empty()) throw std::invalid_argument("assemble_report: no runs");
    ComparisonReport cmp;
    cmp.models = runs;
    for (std::size_t i = 0; i < runs.size(); ++i)
        for (std::size_t j = i + 1; j < runs.size(); ++j) {
            if (runs[i].sm_series.per_timestamp.size() !=
                runs[j].sm_series.per_timestamp.size())
                throw std::runtime_error("cannot compare runs over different datasets");
            PairwiseTest pt;
            pt.model_a = runs[i].model;
            pt.model_b = runs[j].model;
            pt.test = welch_t_test(runs[i].sm_series.per_timestamp,
                                   runs[j].sm_series.per_timestamp);
            cmp.tests.push_back(pt);
        }
    return cmp;
}

}  // namespace stdec::metrics
