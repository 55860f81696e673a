#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace stdec::cli {

// Exactly one data source: a CSV path or a synthetic spec (synth_sensors > 0).
struct DataSource {
    std::string csv_path;
    std::string csv_format = "wide";  // wide | long
    std::size_t synth_sensors = 0;
    std::size_t synth_days = 14;
    std::size_t synth_regions = 3;
    double synth_noise = 0.05;
    std::uint64_t synth_seed = 7;
    std::size_t anomaly_sensor = 0;
    std::size_t anomaly_start = 0;
    std::size_t anomaly_length = 0;  // 0 = none
    double anomaly_scale = 0.1;

    void validate() const;
};

struct SynthArgs {
    std::size_t sensors = 12;
    std::size_t days = 14;
    std::size_t regions = 3;
    double noise = 0.05;
    std::uint64_t seed = 7;
    std::size_t anomaly_sensor = 0;
    std::size_t anomaly_start = 0;
    std::size_t anomaly_length = 0;
    double anomaly_scale = 0.1;
    std::string out_dir;
};

struct IngestArgs {
    std::string data;
    std::string format = "wide";
    std::string out_dir;
};

struct TrainArgs {
    DataSource source;
    std::string variant = "sdec";  // kmeans | kmeans-dtw | dec | sdec
    std::size_t w = 12;
    std::size_t band = 6;
    std::string point_cost = "squared_diff";
    std::size_t k = 0;  // 0 = pick via elbow range below
    std::size_t elbow_min = 0;
    std::size_t elbow_max = 0;
    double alpha0 = -1.0;  // < 0 = variant default
    double alpha1 = -1.0;
    double alpha2 = -1.0;
    std::size_t batch = 288;
    std::size_t epochs = 100;
    std::size_t pretrain_epochs = 30;
    double dropout = 0.2;
    double lr = 1e-3;
    std::size_t restarts = 5;
    double early_stop = 0.001;
    double train_fraction = 0.6;
    std::uint64_t seed = 0;
    std::string lambda_csv;
    std::vector<std::size_t> hidden = {8, 8, 128, 4, 128, 8, 8};
    std::size_t latent_pos = 3;
    std::string out_dir;
};

struct EvalArgs {
    std::vector<std::string> checkpoints;
    DataSource source;
    std::string split = "test";  // train | test | all
    bool export_latent = false;
    std::string out_dir;
};

struct ElbowArgs {
    DataSource source;
    std::size_t w = 12;
    std::size_t k_min = 2;
    std::size_t k_max = 10;
    std::size_t k_step = 1;
    std::string space = "window";  // window | latent
    std::string checkpoint;
    std::size_t restarts = 5;
    std::uint64_t seed = 0;
    double train_fraction = 0.6;
    std::string out_dir;
};

struct ExportArgs {
    DataSource source;
    std::size_t w = 12;
    double train_fraction = 0.6;
    std::string split = "train";
    std::string out_dir;
};

int cmd_synth(const SynthArgs& args);
int cmd_ingest(const IngestArgs& args);
int cmd_train(const TrainArgs& args);
int cmd_evaluate(const EvalArgs& args);
int cmd_elbow(const ElbowArgs& args);
int cmd_export(const ExportArgs& args);

int run_cli(int argc, const char* const* argv);

}  // namespace stdec::cli
