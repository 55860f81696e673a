#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stdec/matrix.hpp"

namespace stdec::data {

// Dense s x t x f series.  Sensor order defines line adjacency: sensor i's
// neighbors are i-1 and i+1.
struct RasterSeries {
    std::size_t sensors = 0;
    std::size_t timestamps = 0;
    std::size_t features = 1;
    double timestamp_period_minutes = 5.0;
    std::vector<std::string> sensor_ids;
    std::vector<double> values;  // indexed (i, t, f)

    RasterSeries() = default;
    RasterSeries(std::size_t s, std::size_t t, std::size_t f);

    double& at(std::size_t i, std::size_t t, std::size_t f_idx);
    double at(std::size_t i, std::size_t t, std::size_t f_idx) const;
    void validate() const;
};

struct ScalingRecord {
    std::vector<double> min;  // per feature
    std::vector<double> max;
};

// Per-feature min/max over every sensor and timestamp.  Throws (naming the
// feature) when a feature is constant.
ScalingRecord fit_scaling(const RasterSeries& series);
// (v - min) / (max - min).  No clipping: values outside the fit range map
// outside [0, 1].
RasterSeries apply_scaling(const RasterSeries& series, const ScalingRecord& rec);
RasterSeries invert_scaling(const RasterSeries& series, const ScalingRecord& rec);
std::pair<RasterSeries, ScalingRecord> normalize(const RasterSeries& raw);

// Stride-1 windowed view.  Points are ordered by (t, i): all s locations of a
// timestamp are contiguous, location-major within the block, and a point's
// time index is the window's last timestamp.
struct WindowPoint {
    std::size_t location = 0;
    std::size_t time = 0;
};

struct WindowedDataset {
    std::size_t window = 0;
    std::size_t features = 1;
    std::size_t sensors = 0;
    std::size_t source_timestamps = 0;
    Matrix series;                    // n x (w*f), window mean already removed
    std::vector<double> window_mean;  // one mean per point, over all w*f values
    std::vector<WindowPoint> index;

    std::size_t size() const { return series.rows(); }
    std::size_t blocks() const { return source_timestamps - window + 1; }
    std::size_t row_of(std::size_t t, std::size_t i) const;
};

WindowedDataset sliding_window(const RasterSeries& series, std::size_t w);

// Synthetic planted-cluster generator.
struct Peak {
    double height = 0.4;
    double center = 204.0;  // timestamp-of-day at 5-min steps (17:00)
    double width = 12.0;
};

struct Prototype {
    double base = 0.5;
    double amplitude = 0.3;
    double phase = 0.0;
    std::vector<Peak> peaks;  // rush-hour bumps on top of the daily wave
};

struct Anomaly {
    std::size_t sensor = 0;
    std::size_t start = 0;   // timestamp index
    std::size_t length = 0;  // timestamps
    double scale = 0.1;      // multiplier on the affected cells
};

struct SyntheticSpec {
    std::size_t sensors = 0;
    std::size_t days = 0;
    std::vector<std::pair<std::size_t, std::size_t>> regions;  // [begin, end)
    std::vector<Prototype> prototypes;                         // one per region
    double noise_std = 0.0;
    std::uint64_t seed = 0;
    std::optional<Anomaly> anomaly;
    std::size_t steps_per_day = 288;

    void validate() const;
};

// Contiguous near-equal partition of [0, sensors) plus visibly distinct
// default prototypes.
std::vector<std::pair<std::size_t, std::size_t>> even_regions(std::size_t sensors,
                                                              std::size_t count);
std::vector<Prototype> default_prototypes(std::size_t count);

struct SyntheticResult {
    RasterSeries series;
    std::vector<std::size_t> region_of_sensor;
};

SyntheticResult generate_synthetic(const SyntheticSpec& spec);

// Time-prefix split at floor(t * fraction); both sides must hold at least w
// timestamps so windows never straddle the boundary.
std::pair<RasterSeries, RasterSeries> split(const RasterSeries& series,
                                            double train_fraction, std::size_t w);

enum class CsvSchema { wide, long_format };

struct IngestResult {
    RasterSeries series;
    std::vector<std::size_t> interpolated_per_sensor;
};

// Wide: header `timestamp,<id>,...`, one row per timestamp.
// Long: header `timestamp,sensor_id,flow`.  Missing cells (empty/nan fields in
// wide form, absent rows in long form) are linearly interpolated along time;
// more than 10% missing for any sensor rejects the file.
IngestResult ingest_csv(const std::string& path, CsvSchema schema);

void write_raster_csv(const RasterSeries& series, const std::string& path);
void write_labels_csv(const std::vector<std::size_t>& region_of_sensor,
                      const std::vector<std::string>& sensor_ids, const std::string& path);
void write_windows_csv(const WindowedDataset& ds, const std::string& path);

}  // namespace stdec::data
