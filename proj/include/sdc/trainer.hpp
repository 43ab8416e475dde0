#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sdc/dataio.hpp"
#include "sdc/hash_model.hpp"
#include "sdc/losses.hpp"

namespace sdc {

struct TrainConfig {
    size_t epochs = 100;
    size_t batch_size = 64;
    double lr = 1e-4;
    uint32_t k_bits = 16;
    double lambda_q = 1.0;
    double lambda_cl = 1.0;
    double calib_alpha = 5.0;
    double calib_beta = 5.0;
    uint64_t seed = 0;
    bool shuffle = true;

    Objective objective = Objective::sdc;
    int preservation_p = 2;

    // Contrastive views are feature-space perturbations: Gaussian noise with
    // std = view_noise_factor * std(features), then per-coordinate dropout.
    double temperature = 0.2;
    double view_noise_factor = 0.1;
    double view_dropout = 0.1;

    // Optional per-epoch checkpoints: every `snapshot_every` epochs into
    // snapshot_dir. 0 disables.
    size_t snapshot_every = 0;
    std::string snapshot_dir;

    void validate() const;
};

struct EpochRecord {
    size_t epoch = 0;
    double mean_total = 0.0;
    double mean_alignment = 0.0;
    double mean_quantization = 0.0;
    double mean_contrastive = 0.0;
    size_t batches = 0;
    double wall_sec = 0.0;
};

struct TrainReport {
    std::vector<EpochRecord> epochs;
};

struct TrainResult {
    HashModel model;
    TrainReport report;
};

// Mini-batch Adam training of the hash layer. Deterministic given cfg.seed:
// the shuffle, init and view-noise streams are all derived from it.
TrainResult train(const FeatureMatrix& features, const TrainConfig& cfg);

// Sign-and-pack the whole dataset in memory-bounded batches.
PackedCodes encode_dataset(const HashModel& model, const FeatureMatrix& features);

// SDCM checkpoint: magic, version u32=1, d u32, K u32, weights (d x K) and
// bias (K) as little-endian real64 row-major.
void save_model(const std::string& path, const HashModel& model);
HashModel load_model(const std::string& path);

}  // namespace sdc
