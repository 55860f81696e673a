#include "stdec/dataio.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>

#include "stdec/csv.hpp"

namespace stdec::data {

RasterSeries::RasterSeries(std::size_t s, std::size_t t, std::size_t f)
    : sensors(s), timestamps(t), features(f), values(s * t * f, 0.0) {
    sensor_ids.reserve(s);
    for (std::size_t i = 0; i < s; ++i) sensor_ids.push_back("s" + std::to_string(i + 1));
}

double& RasterSeries::at(std::size_t i, std::size_t t, std::size_t f_idx) {
    return values[(i * timestamps + t) * features + f_idx];
}

double RasterSeries::at(std::size_t i, std::size_t t, std::size_t f_idx) const {
    return values[(i * timestamps + t) * features + f_idx];
}

void RasterSeries::validate() const {
    if (values.size() != sensors * timestamps * features)
        throw std::invalid_argument("RasterSeries: value count does not match shape");
    if (sensor_ids.size() != sensors)
        throw std::invalid_argument("RasterSeries: sensor_ids count does not match sensors");
}

ScalingRecord fit_scaling(const RasterSeries& series) {
    series.validate();
    ScalingRecord rec;
    rec.min.assign(series.features, std::numeric_limits<double>::infinity());
    rec.max.assign(series.features, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < series.sensors; ++i)
        for (std::size_t t = 0; t < series.timestamps; ++t)
            for (std::size_t f = 0; f < series.features; ++f) {
                const double v = series.at(i, t, f);
                rec.min[f] = std::min(rec.min[f], v);
                rec.max[f] = std::max(rec.max[f], v);
            }
    for (std::size_t f = 0; f < series.features; ++f)
        if (!(rec.max[f] > rec.min[f]))
            throw std::runtime_error("feature " + std::to_string(f) +
                                     " is constant; cannot min-max scale");
    return rec;
}

RasterSeries apply_scaling(const RasterSeries& series, const ScalingRecord& rec) {
    if (rec.min.size() != series.features)
        throw std::invalid_argument("scaling record feature count mismatch");
    RasterSeries out = series;
    for (std::size_t i = 0; i < out.sensors; ++i)
        for (std::size_t t = 0; t < out.timestamps; ++t)
            for (std::size_t f = 0; f < out.features; ++f)
                out.at(i, t, f) = (out.at(i, t, f) - rec.min[f]) / (rec.max[f] - rec.min[f]);
    return out;
}

RasterSeries invert_scaling(const RasterSeries& series, const ScalingRecord& rec) {
    if (rec.min.size() != series.features)
        throw std::invalid_argument("scaling record feature count mismatch");
    RasterSeries out = series;
    for (std::size_t i = 0; i < out.sensors; ++i)
        for (std::size_t t = 0; t < out.timestamps; ++t)
            for (std::size_t f = 0; f < out.features; ++f)
                out.at(i, t, f) = out.at(i, t, f) * (rec.max[f] - rec.min[f]) + rec.min[f];
    return out;
}

std::pair<RasterSeries, ScalingRecord> normalize(const RasterSeries& raw) {
    ScalingRecord rec = fit_scaling(raw);
    return {apply_scaling(raw, rec), rec};
}

std::size_t WindowedDataset::row_of(std::size_t t, std::size_t i) const {
    if (t < window - 1 || t >= source_timestamps || i >= sensors)
        throw std::out_of_range("row_of: point out of range");
    return (t - window + 1) * sensors + i;
}

WindowedDataset sliding_window(const RasterSeries& series, std::size_t w) {
    series.validate();
    if (w == 0 || w > series.timestamps)
        throw std::invalid_argument("window length must satisfy 1 <= w <= timestamps");

    WindowedDataset ds;
    ds.window = w;
    ds.features = series.features;
    ds.sensors = series.sensors;
    ds.source_timestamps = series.timestamps;
    const std::size_t n_blocks = series.timestamps - w + 1;
    const std::size_t n = n_blocks * series.sensors;
    const std::size_t dim = w * series.features;
    ds.series = Matrix(n, dim);
    ds.window_mean.resize(n);
    ds.index.resize(n);

    for (std::size_t b = 0; b < n_blocks; ++b) {
        const std::size_t t_end = b + w - 1;
        for (std::size_t i = 0; i < series.sensors; ++i) {
            const std::size_t row = b * series.sensors + i;
            double sum = 0.0;
            // feature-major flattening: f blocks of w timestamps
            for (std::size_t f = 0; f < series.features; ++f)
                for (std::size_t j = 0; j < w; ++j) {
                    const double v = series.at(i, b + j, f);
                    ds.series(row, f * w + j) = v;
                    sum += v;
                }
            const double mean = sum / static_cast<double>(dim);
            for (std::size_t c = 0; c < dim; ++c) ds.series(row, c) -= mean;
            ds.window_mean[row] = mean;
            ds.index[row] = {i, t_end};
        }
    }
    return ds;
}

void SyntheticSpec::validate() const {
    if (sensors == 0 || days == 0) throw std::invalid_argument("sensors and days must be > 0");
    if (regions.empty()) throw std::invalid_argument("at least one region required");
    if (prototypes.size() != regions.size())
        throw std::invalid_argument("one prototype per region required");
    std::size_t cursor = 0;
    for (const auto& [b, e] : regions) {
        if (b != cursor || e <= b) throw std::invalid_argument("regions must partition sensors");
        cursor = e;
    }
    if (cursor != sensors) throw std::invalid_argument("regions must cover all sensors");
    if (noise_std < 0.0) throw std::invalid_argument("noise_std must be >= 0");
    if (anomaly) {
        const std::size_t total = days * steps_per_day;
        if (anomaly->sensor >= sensors || anomaly->start + anomaly->length > total)
            throw std::invalid_argument("anomaly lies outside the series");
    }
}

std::vector<std::pair<std::size_t, std::size_t>> even_regions(std::size_t sensors,
                                                              std::size_t count) {
    if (count == 0 || count > sensors)
        throw std::invalid_argument("region count must be in [1, sensors]");
    std::vector<std::pair<std::size_t, std::size_t>> regions;
    const std::size_t base = sensors / count, extra = sensors % count;
    std::size_t cursor = 0;
    for (std::size_t r = 0; r < count; ++r) {
        const std::size_t len = base + (r < extra ? 1 : 0);
        regions.emplace_back(cursor, cursor + len);
        cursor += len;
    }
    return regions;
}

std::vector<Prototype> default_prototypes(std::size_t count) {
    std::vector<Prototype> protos;
    for (std::size_t r = 0; r < count; ++r) {
        Prototype p;
        p.base = 0.40 + 0.04 * static_cast<double>(r % 3);
        p.amplitude = 0.24 + 0.03 * static_cast<double>(r % 4);
        p.phase = 2.0 * std::numbers::pi * static_cast<double>(r) / std::max<std::size_t>(count, 1);
        // Morning, midday and evening rush hours, offset per region so
        // neighbouring regions peak at different times. Narrow widths put
        // steep flanks inside a one-hour window, like 5-minute flow data.
        const double shift = 18.0 * static_cast<double>(r % 6);
        p.peaks = {{0.90 + 0.08 * static_cast<double>(r % 2), 96.0 + shift,
                    6.0 + static_cast<double>(r % 3)},
                   {0.35 + 0.05 * static_cast<double>(r % 3), 150.0 + shift,
                    10.0 + static_cast<double>(r % 2)},
                   {0.75 + 0.06 * static_cast<double>(r % 3), 204.0 + shift,
                    7.0 + static_cast<double>(r % 2)}};
        protos.push_back(p);
    }
    return protos;
}

SyntheticResult generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    const std::size_t total = spec.days * spec.steps_per_day;
    SyntheticResult out;
    out.series = RasterSeries(spec.sensors, total, 1);
    out.region_of_sensor.assign(spec.sensors, 0);
    for (std::size_t r = 0; r < spec.regions.size(); ++r)
        for (std::size_t i = spec.regions[r].first; i < spec.regions[r].second; ++i)
            out.region_of_sensor[i] = r;

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (std::size_t i = 0; i < spec.sensors; ++i) {
        const Prototype& p = spec.prototypes[out.region_of_sensor[i]];
        for (std::size_t t = 0; t < total; ++t) {
            const double tod = static_cast<double>(t % spec.steps_per_day);
            const double frac = tod / static_cast<double>(spec.steps_per_day);
            double v = p.base + p.amplitude * std::sin(2.0 * std::numbers::pi * frac + p.phase);
            for (const Peak& peak : p.peaks) {
                const double rel = (tod - peak.center) / peak.width;
                v += peak.height * std::exp(-0.5 * rel * rel);
            }
            v += spec.noise_std * noise(rng);
            out.series.at(i, t, 0) = v;
        }
    }
    if (spec.anomaly) {
        const Anomaly& a = *spec.anomaly;
        for (std::size_t t = a.start; t < a.start + a.length; ++t)
            out.series.at(a.sensor, t, 0) *= a.scale;
    }
    return out;
}

std::pair<RasterSeries, RasterSeries> split(const RasterSeries& series, double train_fraction,
                                            std::size_t w) {
    series.validate();
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw std::invalid_argument("train_fraction must lie in (0, 1)");
    const std::size_t cut =
        static_cast<std::size_t>(std::floor(static_cast<double>(series.timestamps) * train_fraction));
    if (cut < w || series.timestamps - cut < w)
        throw std::runtime_error("split leaves fewer than w timestamps on one side");

    auto slice = [&](std::size_t t0, std::size_t t1) {
        RasterSeries part(series.sensors, t1 - t0, series.features);
        part.sensor_ids = series.sensor_ids;
        part.timestamp_period_minutes = series.timestamp_period_minutes;
        for (std::size_t i = 0; i < series.sensors; ++i)
            for (std::size_t t = t0; t < t1; ++t)
                for (std::size_t f = 0; f < series.features; ++f)
                    part.at(i, t - t0, f) = series.at(i, t, f);
        return part;
    };
    return {slice(0, cut), slice(cut, series.timestamps)};
}

namespace {

bool field_missing(const std::string& f) {
    if (f.empty()) return true;
    std::string low;
    for (char c : f) low += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return low == "nan" || low == "na" || low == "null";
}

// later(a, b): does b sort after a?  Numeric when both parse, lexical otherwise.
bool timestamp_increases(const std::string& a, const std::string& b) {
    try {
        std::size_t pa = 0, pb = 0;
        const double da = std::stod(a, &pa);
        const double db = std::stod(b, &pb);
        if (pa == a.size() && pb == b.size()) return db > da;
    } catch (const std::exception&) {
    }
    return b > a;
}

void interpolate_column(std::vector<double>& col, std::vector<bool>& missing) {
    const std::size_t n = col.size();
    std::size_t miss = 0;
    for (bool m : missing)
        if (m) ++miss;
    if (miss == 0) return;
    if (miss == n) throw std::runtime_error("sensor column entirely missing");
    for (std::size_t t = 0; t < n; ++t) {
        if (!missing[t]) continue;
        std::size_t lo = t;
        while (lo > 0 && missing[lo - 1]) --lo;
        std::size_t hi = t;
        while (hi + 1 < n && missing[hi + 1]) ++hi;
        const bool has_lo = lo > 0, has_hi = hi + 1 < n;
        if (has_lo && has_hi) {
            const double v0 = col[lo - 1], v1 = col[hi + 1];
            const double span = static_cast<double>(hi + 2 - lo);
            col[t] = v0 + (v1 - v0) * static_cast<double>(t - lo + 1) / span;
        } else if (has_lo) {
            col[t] = col[lo - 1];
        } else {
            col[t] = col[hi + 1];
        }
    }
}

}  // namespace

IngestResult ingest_csv(const std::string& path, CsvSchema schema) {
    auto rows = csv::read_table(path);
    if (rows.size() < 2) throw std::runtime_error("CSV has no data rows: " + path);
    const auto& header = rows[0];

    std::vector<std::string> sensor_ids;
    std::vector<std::string> timestamps;
    // columns[i][t], missing flags alongside
    std::vector<std::vector<double>> columns;
    std::vector<std::vector<bool>> missing;

    if (schema == CsvSchema::wide) {
        if (header.size() < 2) throw std::runtime_error("wide CSV needs sensor columns");
        sensor_ids.assign(header.begin() + 1, header.end());
        columns.assign(sensor_ids.size(), {});
        missing.assign(sensor_ids.size(), {});
        for (std::size_t r = 1; r < rows.size(); ++r) {
            const auto& row = rows[r];
            if (row.size() != header.size())
                throw std::runtime_error("row " + std::to_string(r + 1) + " has wrong width");
            if (!timestamps.empty() && !timestamp_increases(timestamps.back(), row[0]))
                throw std::runtime_error("timestamps not strictly increasing at row " +
                                         std::to_string(r + 1));
            timestamps.push_back(row[0]);
            for (std::size_t c = 1; c < row.size(); ++c) {
                const bool miss = field_missing(row[c]);
                missing[c - 1].push_back(miss);
                columns[c - 1].push_back(
                    miss ? 0.0 : csv::parse_double(row[c], path + " row " + std::to_string(r + 1)));
            }
        }
    } else {
        if (header.size() != 3)
            throw std::runtime_error("long CSV must be timestamp,sensor_id,flow");
        // preserve first-appearance order of sensors and timestamps
        std::map<std::string, std::size_t> sensor_pos;
        std::vector<std::pair<std::string, std::pair<std::string, std::string>>> recs;
        for (std::size_t r = 1; r < rows.size(); ++r) {
            const auto& row = rows[r];
            if (row.size() != 3)
                throw std::runtime_error("row " + std::to_string(r + 1) + " has wrong width");
            if (timestamps.empty() || timestamps.back() != row[0]) {
                if (!timestamps.empty() && !timestamp_increases(timestamps.back(), row[0])) {
                    // row may belong to an already-seen timestamp only if grouped;
                    // out-of-order groups are rejected
                    throw std::runtime_error("timestamps not grouped/increasing at row " +
                                             std::to_string(r + 1));
                }
                timestamps.push_back(row[0]);
            }
            if (!sensor_pos.count(row[1])) {
                sensor_pos[row[1]] = sensor_ids.size();
                sensor_ids.push_back(row[1]);
            }
            recs.push_back({row[0], {row[1], row[2]}});
        }
        columns.assign(sensor_ids.size(), std::vector<double>(timestamps.size(), 0.0));
        missing.assign(sensor_ids.size(), std::vector<bool>(timestamps.size(), true));
        std::map<std::string, std::size_t> time_pos;
        for (std::size_t t = 0; t < timestamps.size(); ++t) time_pos[timestamps[t]] = t;
        for (const auto& [ts, sv] : recs) {
            const std::size_t i = sensor_pos[sv.first];
            const std::size_t t = time_pos[ts];
            if (!missing[i][t])
                throw std::runtime_error("duplicate reading for sensor " + sv.first + " at " + ts);
            if (!field_missing(sv.second)) {
                columns[i][t] = csv::parse_double(sv.second, path);
                missing[i][t] = false;
            }
        }
    }

    IngestResult out;
    out.interpolated_per_sensor.assign(sensor_ids.size(), 0);
    const std::size_t t_count = timestamps.size();
    for (std::size_t i = 0; i < sensor_ids.size(); ++i) {
        std::size_t miss = 0;
        for (bool m : missing[i])
            if (m) ++miss;
        if (static_cast<double>(miss) > 0.10 * static_cast<double>(t_count))
            throw std::runtime_error("sensor " + sensor_ids[i] + " has >10% missing values (" +
                                     std::to_string(miss) + "/" + std::to_string(t_count) + ")");
        out.interpolated_per_sensor[i] = miss;
        interpolate_column(columns[i], missing[i]);
    }

    out.series = RasterSeries(sensor_ids.size(), t_count, 1);
    out.series.sensor_ids = sensor_ids;
    for (std::size_t i = 0; i < sensor_ids.size(); ++i)
        for (std::size_t t = 0; t < t_count; ++t) out.series.at(i, t, 0) = columns[i][t];
    return out;
}

void write_raster_csv(const RasterSeries& series, const std::string& path) {
    series.validate();
    if (series.features != 1)
        throw std::runtime_error("wide CSV export supports single-feature series only");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "timestamp";
    for (const auto& id : series.sensor_ids) out << ',' << id;
    out << '\n';
    for (std::size_t t = 0; t < series.timestamps; ++t) {
        out << t;
        for (std::size_t i = 0; i < series.sensors; ++i)
            out << ',' << csv::format_double(series.at(i, t, 0));
        out << '\n';
    }
}

void write_labels_csv(const std::vector<std::size_t>& region_of_sensor,
                      const std::vector<std::string>& sensor_ids, const std::string& path) {
    if (region_of_sensor.size() != sensor_ids.size())
        throw std::invalid_argument("labels and sensor_ids length mismatch");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "sensor,region\n";
    for (std::size_t i = 0; i < sensor_ids.size(); ++i)
        out << sensor_ids[i] << ',' << region_of_sensor[i] << '\n';
}

void write_windows_csv(const WindowedDataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "t,i";
    for (std::size_t c = 0; c < ds.window * ds.features; ++c) out << ",v" << c;
    out << ",window_mean\n";
    for (std::size_t r = 0; r < ds.size(); ++r) {
        out << ds.index[r].time << ',' << ds.index[r].location;
        for (std::size_t c = 0; c < ds.series.cols(); ++c)
            out << ',' << csv::format_double(ds.series(r, c));
        out << ',' << csv::format_double(ds.window_mean[r]) << '\n';
    }
}

}  // namespace stdec::data
