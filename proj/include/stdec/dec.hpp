#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stdec/adam.hpp"
#include "stdec/dataio.hpp"
#include "stdec/kmeans.hpp"
#include "stdec/matrix.hpp"
#include "stdec/network.hpp"
#include "stdec/spatial.hpp"

namespace stdec::dec {

struct ClusterHead {
    Matrix centroids;  // k x d

    std::size_t k() const { return centroids.rows(); }
    std::size_t d() const { return centroids.cols(); }
    void validate(std::size_t latent_dim) const;
};

struct LossWeights {
    double alpha0 = 0.0;  // spatial
    double alpha1 = 0.0;  // clustering
    double alpha2 = 1.0;  // reconstruction
    void validate() const;
};

enum class Variant { kmeans_ae, dec, sdec };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);

struct TrainConfig {
    std::size_t max_epochs = 100;
    std::size_t pretrain_epochs = 30;
    std::size_t batch_size = 288;  // counts points; whole timestamp blocks per batch
    double early_stop_assignment_change = 0.001;  // fraction; <0 disables
    std::uint64_t seed = 0;
    nn::AdamConfig adam;
    double dropout = 0.2;
    std::vector<std::size_t> hidden = {8, 8, 128, 4, 128, 8, 8};
    std::size_t latent_pos = 3;
    std::size_t k = 0;
    std::size_t kmeans_restarts = 5;
};

struct Assignments {
    Matrix q;  // n x k
    Matrix p;  // n x k
    std::vector<std::size_t> hard;
    std::vector<data::WindowPoint> point_index;
};

// Eq-level operations ---------------------------------------------------

// q_ij = (1 + ||z_i - mu_j||^2)^-1 / sum_k (1 + ||z_i - mu_k||^2)^-1
Matrix soft_assign(const Matrix& z, const ClusterHead& head);

// f_j = sum_i q_ij;  p_ij = (q_ij^2 / f_j) / sum_k (q_ik^2 / f_k)
Matrix target_distribution(const Matrix& q);

struct KlResult {
    double loss = 0.0;  // sum over points of KL(p_i || q_i)
    Matrix dz;          // n x d
    Matrix dmu;         // k x d
};

// p is treated as constant; gradients flow through q's student-t kernel into
// both z and mu.  Caller applies the alpha1 scale.
KlResult kl_loss_and_grad(const Matrix& z, const ClusterHead& head, const Matrix& q,
                          const Matrix& p);

struct SpatialPairResult {
    double loss = 0.0;
    std::vector<double> dz;
};

// One (i, k) pair: loss = (lambda/2) * ||z - zbar||^2, dz = lambda * (z - zbar).
// zbar is a detached snapshot; no gradient flows into it.
SpatialPairResult spatial_pair(std::span<const double> z, std::span<const double> zbar,
                               double lambda);

struct SpatialBlockResult {
    double loss = 0.0;  // sum over all (i, k) pairs in the block
    Matrix dz;          // s x d
};

// One timestamp block: s latents against s snapshot rows under the full
// lambda matrix.
SpatialBlockResult spatial_loss_and_grad(const Matrix& z_block, const Matrix& snapshot_block,
                                         const spatial::SpatialWeights& weights);

// Joint objective (per-point means): alpha0 * spatial + alpha1 * KL +
// alpha2 * (1/2) * reconstruction MSE.
struct JointBatch {
    Matrix inputs;         // n x (w*f + s): [x, one_hot(i)] rows, whole blocks of s
    Matrix recon_targets;  // n x (w*f)
    Matrix p;              // n x k, epoch-frozen targets
    Matrix snapshot;       // n x d, detached latents aligned per row
};

struct JointResult {
    double total = 0.0;
    double spatial = 0.0;
    double kl = 0.0;
    double recon = 0.0;
    nn::Gradients net_grads;
    Matrix dmu;
};

// training=true draws dropout masks from rng.  weights.alpha0 > 0 requires
// lambda; rows must then form complete location-ordered blocks of lambda->s.
JointResult joint_loss_and_grads(const nn::Network& net, const ClusterHead& head,
                                 const JointBatch& batch, const LossWeights& weights,
                                 const spatial::SpatialWeights* lambda, bool training,
                                 std::mt19937_64* rng);

// Training loop ----------------------------------------------------------

struct EpochLog {
    std::string phase;  // "pretrain" | "joint"
    std::size_t epoch = 0;
    double spatial = 0.0;
    double kl = 0.0;
    double recon = 0.0;
    double changed_fraction = 1.0;
};

struct TrainResult {
    nn::Network net;
    ClusterHead head;
    Assignments assignments;
    std::vector<EpochLog> log;
    std::size_t joint_epochs_run = 0;
    bool early_stopped = false;
    std::vector<std::size_t> degenerate_clusters;  // ids with no hard member
};

// Pretrain the autoencoder on reconstruction alone, initialize mu by k-means
// on inference latents, then run per-epoch target refresh + mini-batch joint
// updates.  kmeans_ae stops after initialization.  Seed-deterministic.
TrainResult train(const data::WindowedDataset& ds, const spatial::SpatialWeights* lambda,
                  const TrainConfig& cfg, const LossWeights& weights, Variant variant);

// Inference-mode assignments for a dataset under a trained model.
Assignments compute_assignments(const nn::Network& net, const ClusterHead& head,
                                const data::WindowedDataset& ds);

// Latents for a dataset (inference mode, one-hot appended internally).
Matrix infer_dataset_latents(const nn::Network& net, const data::WindowedDataset& ds);

// Distance of every point to its assigned centroid as a (blocks x s) grid.
Matrix anomaly_distance(const Assignments& a, const Matrix& latents, const ClusterHead& head,
                        std::size_t sensors);

}  // namespace stdec::dec
