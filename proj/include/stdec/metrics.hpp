#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "stdec/dec.hpp"
#include "stdec/matrix.hpp"
#include "stdec/tsdist.hpp"

namespace stdec::metrics {

// Hard labels on a (timestamp block x sensor) grid, row-major by timestamp.
struct LabelGrid {
    std::size_t timestamps = 0;
    std::size_t sensors = 0;
    std::vector<std::size_t> labels;

    std::size_t at(std::size_t t, std::size_t i) const { return labels[t * sensors + i]; }
    std::size_t& at(std::size_t t, std::size_t i) { return labels[t * sensors + i]; }
    void validate() const;
};

LabelGrid grid_from_assignments(const dec::Assignments& a, std::size_t sensors);

// s_c = sum over (t, i) of the length of the maximal same-label run containing
// i at t.
double connectivity(const LabelGrid& grid);

// s_d = sum over (t, i) of locations sharing i's label at t outside its run.
double disconnectivity(const LabelGrid& grid);

struct SpatialMetricSeries {
    std::vector<double> per_timestamp;  // (s_c^t - s_d^t) / s^2
    double aggregate = 0.0;             // mean over timestamps
};

SpatialMetricSeries spatial_metric_series(const LabelGrid& grid);

struct CompactnessReport {
    std::vector<double> per_cluster;        // s^d_j; 0 for empty clusters
    std::vector<bool> cluster_empty;        // flagged, skipped from the total
    std::vector<std::size_t> medoid_rows;   // chosen medoid per cluster
    double normalized_total = 0.0;          // mean over non-empty clusters / w
};

// Medoid of cluster j = member whose latent is nearest the cluster's latent
// mean; s^d_j = mean DTW of members to the medoid series.
CompactnessReport temporal_compactness(const std::vector<std::size_t>& hard,
                                       const Matrix& windows, const Matrix& latents,
                                       std::size_t k, std::size_t w,
                                       const tsdist::DtwConfig& cfg);

struct TTestResult {
    double t = 0.0;
    double df = 0.0;
    double p = 1.0;
};

// Welch unequal-variance t statistic, Welch-Satterthwaite df, two-sided p via
// the regularized incomplete beta function.
TTestResult welch_t_test(std::span<const double> a, std::span<const double> b);

// I_x(a, b), exposed for validation against quadrature.
double regularized_incomplete_beta(double a, double b, double x);

struct ModelReport {
    std::string model;
    CompactnessReport compactness;
    double connectivity_raw = 0.0;
    double connectivity_norm = 0.0;  // / (t * s^2)
    double disconnectivity_raw = 0.0;
    double disconnectivity_norm = 0.0;
    double spatial_metric = 0.0;  // aggregate s_m
    SpatialMetricSeries sm_series;
    std::vector<std::size_t> degenerate_clusters;
};

ModelReport evaluate_model(const std::string& name, const dec::Assignments& a,
                           const Matrix& windows, const Matrix& latents, std::size_t sensors,
                           std::size_t k, std::size_t w, const tsdist::DtwConfig& cfg);

struct PairwiseTest {
    std::string model_a;
    std::string model_b;
    TTestResult test;
};

struct ComparisonReport {
    std::vector<ModelReport> models;
    std::vector<PairwiseTest> tests;  // on per-timestamp s_m series
};

ComparisonReport assemble_report(const std::vector<ModelReport>& runs);

}  // namespace stdec::metrics
