#include "stdec/dec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace stdec::dec {

void ClusterHead::validate(std::size_t latent_dim) const {
    if (centroids.empty()) throw std::invalid_argument("ClusterHead has no centroids");
    if (centroids.cols() != latent_dim)
        throw std::invalid_argument("centroid width does not match latent width");
    if (!centroids.all_finite()) throw std::invalid_argument("centroids must be finite");
}

void LossWeights::validate() const {
    if (alpha0 < 0.0 || alpha1 < 0.0 || alpha2 < 0.0)
        throw std::invalid_argument("loss weights must be >= 0");
    if (alpha0 == 0.0 && alpha1 == 0.0 && alpha2 == 0.0)
        throw std::invalid_argument("loss weights must not all be zero");
}

std::string variant_name(Variant v) {
    switch (v) {
        case Variant::kmeans_ae: return "kmeans";
        case Variant::dec: return "dec";
        case Variant::sdec: return "sdec";
    }
    throw std::logic_error("unreachable");
}

Variant variant_from_name(const std::string& name) {
    if (name == "kmeans" || name == "kmeans-ae") return Variant::kmeans_ae;
    if (name == "dec") return Variant::dec;
    if (name == "sdec") return Variant::sdec;
    throw std::invalid_argument("unknown variant: " + name);
}

Matrix soft_assign(const Matrix& z, const ClusterHead& head) {
    head.validate(z.cols());
    const std::size_t n = z.rows(), k = head.k();
    Matrix q(n, k);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            const double kernel =
                1.0 / (1.0 + squared_distance(z.row(i), head.centroids.row(j)));
            q(i, j) = kernel;
            sum += kernel;
        }
        for (std::size_t j = 0; j < k; ++j) q(i, j) /= sum;
    }
    return q;
}

Matrix target_distribution(const Matrix& q) {
    const std::size_t n = q.rows(), k = q.cols();
    std::vector<double> f(k, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) f[j] += q(i, j);
    for (std::size_t j = 0; j < k; ++j)
        if (f[j] <= 0.0)
            throw std::runtime_error("cluster " + std::to_string(j) + " has zero soft frequency");
    Matrix p(n, k);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            p(i, j) = q(i, j) * q(i, j) / f[j];
            sum += p(i, j);
        }
        for (std::size_t j = 0; j < k; ++j) p(i, j) /= sum;
    }
    return p;
}

KlResult kl_loss_and_grad(const Matrix& z, const ClusterHead& head, const Matrix& q,
                          const Matrix& p) {
    if (!q.same_shape(p) || q.rows() != z.rows() || q.cols() != head.k())
        throw std::invalid_argument("kl_loss_and_grad: shape mismatch");
    const std::size_t n = z.rows(), d = z.cols(), k = head.k();
    KlResult res;
    res.dz = Matrix(n, d);
    res.dmu = Matrix(k, d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            const double pij = p(i, j), qij = q(i, j);
            if (pij > 0.0) res.loss += pij * std::log(pij / qij);
            const double kernel =
                1.0 / (1.0 + squared_distance(z.row(i), head.centroids.row(j)));
            const double coef = 2.0 * kernel * (pij - qij);
            for (std::size_t c = 0; c < d; ++c) {
                const double diff = z(i, c) - head.centroids(j, c);
                res.dz(i, c) += coef * diff;
                res.dmu(j, c) -= coef * diff;
            }
        }
    }
    return res;
}

SpatialPairResult spatial_pair(std::span<const double> z, std::span<const double> zbar,
                               double lambda) {
    if (z.size() != zbar.size()) throw std::invalid_argument("spatial_pair: width mismatch");
    SpatialPairResult res;
    res.dz.resize(z.size());
    double sq = 0.0;
    for (std::size_t c = 0; c < z.size(); ++c) {
        const double diff = z[c] - zbar[c];
        sq += diff * diff;
        res.dz[c] = lambda * diff;
    }
    res.loss = 0.5 * lambda * sq;
    return res;
}

SpatialBlockResult spatial_loss_and_grad(const Matrix& z_block, const Matrix& snapshot_block,
                                         const spatial::SpatialWeights& weights) {
    const std::size_t s = weights.s;
    if (z_block.rows() != s || snapshot_block.rows() != s)
        throw std::invalid_argument("spatial_loss_and_grad: need s rows per block");
    if (z_block.cols() != snapshot_block.cols())
        throw std::invalid_argument("spatial_loss_and_grad: latent width mismatch");
    SpatialBlockResult res;
    res.dz = Matrix(s, z_block.cols());
    for (std::size_t i = 0; i < s; ++i) {
        for (std::size_t k = 0; k < s; ++k) {
            const double lam = weights.at(i, k);
            if (lam == 0.0) continue;
            auto pair = spatial_pair(z_block.row(i), snapshot_block.row(k), lam);
            res.loss += pair.loss;
            for (std::size_t c = 0; c < res.dz.cols(); ++c) res.dz(i, c) += pair.dz[c];
        }
    }
    return res;
}

JointResult joint_loss_and_grads(const nn::Network& net, const ClusterHead& head,
                                 const JointBatch& batch, const LossWeights& weights,
                                 const spatial::SpatialWeights* lambda, bool training,
                                 std::mt19937_64* rng) {
    weights.validate();
    const std::size_t n = batch.inputs.rows();
    if (n == 0) throw std::invalid_argument("joint_loss_and_grads: empty batch");
    if (weights.alpha0 > 0.0) {
        if (lambda == nullptr)
            throw std::runtime_error("alpha0 > 0 requires spatial weights");
        if (n % lambda->s != 0)
            throw std::invalid_argument("batch rows must form complete blocks of s");
        if (batch.snapshot.rows() != n)
            throw std::runtime_error("spatial loss requires an aligned latent snapshot");
    }

    auto fwd = nn::forward(net, batch.inputs, training, rng);
    const Matrix& z = fwd.latent;
    const Matrix& y = fwd.output;
    const double inv_n = 1.0 / static_cast<double>(n);

    JointResult res;
    Matrix out_grad(y.rows(), y.cols());
    Matrix latent_grad(z.rows(), z.cols());

    // reconstruction: alpha2 * (1/2) * mean_i ||y_i - x_i||^2
    if (weights.alpha2 > 0.0) {
        double sq = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double diff = y.data()[i] - batch.recon_targets.data()[i];
            sq += diff * diff;
            out_grad.data()[i] = weights.alpha2 * diff * inv_n;
        }
        res.recon = 0.5 * sq * inv_n;
    }

    // clustering: alpha1 * mean_i KL(p_i || q_i)
    Matrix dmu(head.k(), head.d());
    if (weights.alpha1 > 0.0) {
        Matrix q = soft_assign(z, head);
        auto kl = kl_loss_and_grad(z, head, q, batch.p);
        res.kl = kl.loss * inv_n;
        const double scale = weights.alpha1 * inv_n;
        for (std::size_t i = 0; i < latent_grad.size(); ++i)
            latent_grad.data()[i] += scale * kl.dz.data()[i];
        for (std::size_t i = 0; i < dmu.size(); ++i)
            dmu.data()[i] += scale * kl.dmu.data()[i];
    }

    // spatial: alpha0 * mean over pair rows of (lambda_ik/2)||z_i - zbar_k||^2.
    // The pair expansion has n*s rows per batch of n points, and those rows
    // are the samples the spatial head averages over.
    if (weights.alpha0 > 0.0) {
        const std::size_t s = lambda->s;
        double total = 0.0;
        const double inv_pairs = inv_n / static_cast<double>(s);
        const double scale = weights.alpha0 * inv_pairs;
        for (std::size_t b = 0; b < n / s; ++b) {
            for (std::size_t i = 0; i < s; ++i) {
                const std::size_t row = b * s + i;
                for (std::size_t k = 0; k < s; ++k) {
                    const double lam = lambda->at(i, k);
                    if (lam == 0.0) continue;
                    double sq = 0.0;
                    for (std::size_t c = 0; c < z.cols(); ++c) {
                        const double diff = z(row, c) - batch.snapshot(b * s + k, c);
                        sq += diff * diff;
                        latent_grad(row, c) += scale * lam * diff;
                    }
                    total += 0.5 * lam * sq;
                }
            }
        }
        res.spatial = total * inv_pairs;
    }

    res.total = weights.alpha0 * res.spatial + weights.alpha1 * res.kl + weights.alpha2 * res.recon;
    res.net_grads = nn::backward(net, fwd.cache, out_grad, latent_grad);
    res.dmu = std::move(dmu);
    return res;
}

Matrix infer_dataset_latents(const nn::Network& net, const data::WindowedDataset& ds) {
    const std::size_t n = ds.size(), dim = ds.series.cols(), s = ds.sensors;
    Matrix inputs(n, dim + s);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < dim; ++c) inputs(r, c) = ds.series(r, c);
        inputs(r, dim + ds.index[r].location) = 1.0;
    }
    return nn::infer_latent(net, inputs);
}

Assignments compute_assignments(const nn::Network& net, const ClusterHead& head,
                                const data::WindowedDataset& ds) {
    Matrix z = infer_dataset_latents(net, ds);
    Assignments a;
    a.q = soft_assign(z, head);
    a.p = target_distribution(a.q);
    a.hard.resize(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        std::size_t arg = 0;
        for (std::size_t j = 1; j < a.q.cols(); ++j)
            if (a.q(i, j) > a.q(i, arg)) arg = j;
        a.hard[i] = arg;
    }
    a.point_index = ds.index;
    return a;
}

namespace {

Matrix augment_inputs(const data::WindowedDataset& ds, const std::vector<std::size_t>& rows) {
    const std::size_t dim = ds.series.cols(), s = ds.sensors;
    Matrix inputs(rows.size(), dim + s);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::size_t src = rows[r];
        for (std::size_t c = 0; c < dim; ++c) inputs(r, c) = ds.series(src, c);
        inputs(r, dim + ds.index[src].location) = 1.0;
    }
    return inputs;
}

Matrix gather_rows(const Matrix& m, const std::vector<std::size_t>& rows) {
    Matrix out(rows.size(), m.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) out.set_row(r, m.row(rows[r]));
    return out;
}

std::vector<std::size_t> hard_labels(const Matrix& q) {
    std::vector<std::size_t> hard(q.rows());
    for (std::size_t i = 0; i < q.rows(); ++i) {
        std::size_t arg = 0;
        for (std::size_t j = 1; j < q.cols(); ++j)
            if (q(i, j) > q(i, arg)) arg = j;
        hard[i] = arg;
    }
    return hard;
}

}  // namespace

TrainResult train(const data::WindowedDataset& ds, const spatial::SpatialWeights* lambda,
                  const TrainConfig& cfg, const LossWeights& weights, Variant variant) {
    weights.validate();
    if (cfg.batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (cfg.k < 1) throw std::invalid_argument("cluster count k must be set");
    if (cfg.k > ds.size()) throw std::invalid_argument("k exceeds point count");
    if (variant == Variant::dec && weights.alpha0 != 0.0)
        throw std::invalid_argument("variant dec requires alpha0 == 0");
    if (variant == Variant::kmeans_ae && (weights.alpha0 != 0.0 || weights.alpha1 != 0.0))
        throw std::invalid_argument("variant kmeans requires alpha0 == alpha1 == 0");
    if (weights.alpha0 > 0.0) {
        if (lambda == nullptr) throw std::runtime_error("alpha0 > 0 requires spatial weights");
        if (lambda->s != ds.sensors)
            throw std::invalid_argument("spatial weights size does not match sensor count");
    }

    const std::size_t s = ds.sensors;
    const std::size_t n_blocks = ds.blocks();
    const std::size_t dim = ds.series.cols();

    TrainResult result;
    result.net = nn::make_autoencoder(dim + s, dim, cfg.hidden, cfg.latent_pos, cfg.dropout,
                                      cfg.seed);
    nn::Network& net = result.net;

    std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    const std::size_t blocks_per_batch = std::max<std::size_t>(1, cfg.batch_size / s);

    std::vector<std::size_t> block_order(n_blocks);
    std::iota(block_order.begin(), block_order.end(), 0);

    auto batch_rows = [&](std::size_t first_block, std::size_t count) {
        std::vector<std::size_t> rows;
        rows.reserve(count * s);
        for (std::size_t b = first_block; b < first_block + count; ++b)
            for (std::size_t i = 0; i < s; ++i) rows.push_back(block_order[b] * s + i);
        return rows;
    };

    // ---- pretrain: reconstruction only -------------------------------
    {
        auto params = nn::parameter_view(net);
        nn::AdamState adam(params.size(), cfg.adam);
        const LossWeights pre_weights{0.0, 0.0, 1.0};
        ClusterHead dummy;
        dummy.centroids = Matrix(1, net.latent_dim());
        for (std::size_t epoch = 0; epoch < cfg.pretrain_epochs; ++epoch) {
            std::shuffle(block_order.begin(), block_order.end(), rng);
            double recon_sum = 0.0;
            std::size_t seen = 0;
            for (std::size_t b0 = 0; b0 < n_blocks; b0 += blocks_per_batch) {
                const std::size_t count = std::min(blocks_per_batch, n_blocks - b0);
                auto rows = batch_rows(b0, count);
                JointBatch batch;
                batch.inputs = augment_inputs(ds, rows);
                batch.recon_targets = gather_rows(ds.series, rows);
                auto res = joint_loss_and_grads(net, dummy, batch, pre_weights, nullptr, true,
                                                &rng);
                auto flat = nn::flatten(res.net_grads);
                adam.step(params, flat);
                recon_sum += res.recon * static_cast<double>(rows.size());
                seen += rows.size();
            }
            result.log.push_back({"pretrain", epoch, 0.0, 0.0,
                                  recon_sum / static_cast<double>(seen),
                                  std::numeric_limits<double>::quiet_NaN()});
        }
    }

    // ---- centroid initialization by k-means on latents ----------------
    Matrix latents = infer_dataset_latents(net, ds);
    auto km = cluster::kmeans(latents, cfg.k, cfg.kmeans_restarts, cfg.seed + 1);
    result.head.centroids = km.centroids;

    if (variant == Variant::kmeans_ae) {
        result.assignments = compute_assignments(net, result.head, ds);
        auto degenerate = [&](std::size_t j) {
            return std::find(result.assignments.hard.begin(), result.assignments.hard.end(), j) ==
                   result.assignments.hard.end();
        };
        for (std::size_t j = 0; j < cfg.k; ++j)
            if (degenerate(j)) result.degenerate_clusters.push_back(j);
        return result;
    }

    // ---- joint phase ---------------------------------------------------
    std::vector<double*> params = nn::parameter_view(net);
    for (double& v : result.head.centroids.values()) params.push_back(&v);
    nn::AdamState adam(params.size(), cfg.adam);

    std::vector<std::size_t> prev_hard;
    for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        // epoch refresh: snapshot, q -> p, hard labels
        latents = infer_dataset_latents(net, ds);
        Matrix q = soft_assign(latents, result.head);
        Matrix p = target_distribution(q);
        auto hard = hard_labels(q);

        double changed = 1.0;
        if (!prev_hard.empty()) {
            std::size_t diff = 0;
            for (std::size_t i = 0; i < hard.size(); ++i)
                if (hard[i] != prev_hard[i]) ++diff;
            changed = static_cast<double>(diff) / static_cast<double>(hard.size());
        }
        prev_hard = hard;
        if (epoch > 0 && cfg.early_stop_assignment_change >= 0.0 &&
            changed < cfg.early_stop_assignment_change) {
            result.early_stopped = true;
            const double nan = std::numeric_limits<double>::quiet_NaN();
            result.log.push_back({"joint", epoch, nan, nan, nan, changed});
            break;
        }

        std::shuffle(block_order.begin(), block_order.end(), rng);
        double sp_sum = 0.0, kl_sum = 0.0, rec_sum = 0.0;
        std::size_t seen = 0;
        for (std::size_t b0 = 0; b0 < n_blocks; b0 += blocks_per_batch) {
            const std::size_t count = std::min(blocks_per_batch, n_blocks - b0);
            auto rows = batch_rows(b0, count);
            JointBatch batch;
            batch.inputs = augment_inputs(ds, rows);
            batch.recon_targets = gather_rows(ds.series, rows);
            batch.p = gather_rows(p, rows);
            if (weights.alpha0 > 0.0) batch.snapshot = gather_rows(latents, rows);
            auto res = joint_loss_and_grads(net, result.head, batch, weights, lambda, true,
                                            &rng);
            auto flat = nn::flatten(res.net_grads);
            flat.insert(flat.end(), res.dmu.values().begin(), res.dmu.values().end());
            adam.step(params, flat);
            const double bn = static_cast<double>(rows.size());
            sp_sum += res.spatial * bn;
            kl_sum += res.kl * bn;
            rec_sum += res.recon * bn;
            seen += rows.size();
        }
        ++result.joint_epochs_run;
        result.log.push_back({"joint", epoch, sp_sum / static_cast<double>(seen),
                              kl_sum / static_cast<double>(seen),
                              rec_sum / static_cast<double>(seen), changed});
    }

    result.assignments = compute_assignments(net, result.head, ds);
    for (std::size_t j = 0; j < cfg.k; ++j)
        if (std::find(result.assignments.hard.begin(), result.assignments.hard.end(), j) ==
            result.assignments.hard.end())
            result.degenerate_clusters.push_back(j);
    return result;
}

Matrix anomaly_distance(const Assignments& a, const Matrix& latents, const ClusterHead& head,
                        std::size_t sensors) {
    if (latents.rows() != a.hard.size())
        throw std::invalid_argument("anomaly_distance: latents/assignments mismatch");
    if (latents.rows() % sensors != 0)
        throw std::invalid_argument("anomaly_distance: rows must be blocks of sensors");
    const std::size_t blocks = latents.rows() / sensors;
    Matrix grid(blocks, sensors);
    for (std::size_t r = 0; r < latents.rows(); ++r) {
        const double d =
            std::sqrt(squared_distance(latents.row(r), head.centroids.row(a.hard[r])));
        grid(r / sensors, r % sensors) = d;
    }
    return grid;
}

}  // namespace stdec::dec
