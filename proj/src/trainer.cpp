#include "sdc/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "sdc/errors.hpp"
#include "sdc/rng.hpp"

namespace sdc {

void TrainConfig::validate() const {
    if (epochs < 1) throw DomainError("train: epochs must be >= 1");
    if (batch_size < 1) throw DomainError("train: batch_size must be >= 1");
    if (lr <= 0.0) throw DomainError("train: learning rate must be positive");
    if (k_bits < 1) throw DomainError("train: k_bits must be >= 1");
    if (calib_alpha <= 0.0 || calib_beta <= 0.0) {
        throw DomainError("train: calibration shapes must be positive");
    }
    if (lambda_q < 0.0 || lambda_cl < 0.0) {
        throw DomainError("train: loss weights must be nonnegative");
    }
    if (preservation_p != 1 && preservation_p != 2) {
        throw DomainError("train: preservation exponent must be 1 or 2");
    }
}

namespace {

double entry_std(const Matrix& m) {
    double mean = 0.0;
    for (double v : m.data) mean += v;
    mean /= double(m.size());
    double var = 0.0;
    for (double v : m.data) var += (v - mean) * (v - mean);
    return std::sqrt(var / double(m.size()));
}

Matrix gather_rows(const Matrix& src, const std::vector<size_t>& idx, size_t begin, size_t end) {
    Matrix out(end - begin, src.cols);
    for (size_t r = begin; r < end; ++r) {
        std::memcpy(out.data.data() + (r - begin) * src.cols,
                    src.data.data() + idx[r] * src.cols, src.cols * sizeof(double));
    }
    return out;
}

Matrix make_view(const Matrix& x, double noise_std, double dropout, Rng& rng) {
    Matrix v = x;
    for (double& e : v.data) {
        e += noise_std * rng.next_gaussian();
        if (dropout > 0.0 && rng.next_double() < dropout) e = 0.0;
    }
    return v;
}

}  // namespace

TrainResult train(const FeatureMatrix& features, const TrainConfig& cfg) {
    cfg.validate();
    size_t n = features.n();
    if (n < cfg.batch_size) {
        throw DegenerateInputError("train: dataset has " + std::to_string(n) +
                                   " rows, fewer than batch_size " +
                                   std::to_string(cfg.batch_size));
    }
    if (n < 2 || cfg.batch_size < 2) {
        throw DegenerateInputError("train: need at least 2 samples per batch to form pairs");
    }

    BetaDistribution calib(cfg.calib_alpha, cfg.calib_beta);
    TotalLossOptions loss_opts;
    loss_opts.objective = cfg.objective;
    loss_opts.preservation_p = cfg.preservation_p;
    loss_opts.lambda_q = cfg.lambda_q;
    loss_opts.lambda_cl = cfg.lambda_cl;
    loss_opts.temperature = cfg.temperature;
    bool use_views = cfg.lambda_cl > 0.0;

    HashModel model = init_model(features.dim(), cfg.k_bits, cfg.seed);
    AdamState w_state(model.weights.rows, model.weights.cols, cfg.lr);
    AdamState b_state(1, cfg.k_bits, cfg.lr);

    Rng shuffle_rng = derive_rng(cfg.seed, RngStream::shuffle);
    Rng noise_rng = derive_rng(cfg.seed, RngStream::view_noise);
    double noise_std = use_views ? cfg.view_noise_factor * entry_std(features.data) : 0.0;

    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    TrainResult result;
    result.report.epochs.reserve(cfg.epochs);
    for (size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        auto t0 = std::chrono::steady_clock::now();
        if (cfg.shuffle) shuffle_rng.shuffle(order);

        EpochRecord rec;
        rec.epoch = epoch;
        for (size_t begin = 0; begin < n; begin += cfg.batch_size) {
            size_t end = std::min(begin + cfg.batch_size, n);
            if (end - begin < 2) break;  // pairs undefined below 2 samples

            Matrix x_batch = gather_rows(features.data, order, begin, end);
            Matrix f_batch = forward(model, x_batch);

            ViewPair views;
            Matrix v1, v2;
            if (use_views) {
                v1 = make_view(x_batch, noise_std, cfg.view_dropout, noise_rng);
                v2 = make_view(x_batch, noise_std, cfg.view_dropout, noise_rng);
                views.f_view1 = forward(model, v1);
                views.f_view2 = forward(model, v2);
            }

            TotalLossResult loss =
                total_loss(f_batch, x_batch, calib, loss_opts, use_views ? &views : nullptr);
            if (!std::isfinite(loss.value)) {
                throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch) +
                                   ", batch " + std::to_string(rec.batches));
            }

            Matrix w_grad = matmul_at_b(x_batch, loss.grad_f);
            Matrix b_grad = col_sums(loss.grad_f);
            if (use_views) {
                Matrix w1 = matmul_at_b(v1, loss.grad_view1);
                Matrix w2 = matmul_at_b(v2, loss.grad_view2);
                Matrix b1 = col_sums(loss.grad_view1);
                Matrix b2 = col_sums(loss.grad_view2);
                for (size_t i = 0; i < w_grad.size(); ++i) {
                    w_grad.data[i] += w1.data[i] + w2.data[i];
                }
                for (size_t i = 0; i < b_grad.size(); ++i) {
                    b_grad.data[i] += b1.data[i] + b2.data[i];
                }
            }

            model.weights = adam_update(model.weights, w_grad, w_state);
            model.bias = adam_update(model.bias, b_grad, b_state);
            if (!all_finite(model.weights) || !all_finite(model.bias)) {
                throw NumericError("train: non-finite parameters at epoch " +
                                   std::to_string(epoch) + ", batch " +
                                   std::to_string(rec.batches));
            }

            rec.mean_total += loss.value;
            rec.mean_alignment += loss.alignment;
            rec.mean_quantization += loss.quantization;
            rec.mean_contrastive += loss.contrastive;
            rec.batches += 1;
        }
        if (rec.batches == 0) {
            throw DegenerateInputError("train: no usable batches (batch size too small?)");
        }
        rec.mean_total /= double(rec.batches);
        rec.mean_alignment /= double(rec.batches);
        rec.mean_quantization /= double(rec.batches);
        rec.mean_contrastive /= double(rec.batches);
        rec.wall_sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.report.epochs.push_back(rec);

        if (cfg.snapshot_every > 0 && !cfg.snapshot_dir.empty() &&
            (epoch + 1) % cfg.snapshot_every == 0) {
            save_model(cfg.snapshot_dir + "/epoch_" + std::to_string(epoch + 1) + ".sdcm", model);
        }
    }
    result.model = std::move(model);
    return result;
}

PackedCodes encode_dataset(const HashModel& model, const FeatureMatrix& features) {
    if (features.dim() != model.input_dim()) {
        throw ShapeError("encode_dataset: feature dim " + std::to_string(features.dim()) +
                         " does not match model dim " + std::to_string(model.input_dim()));
    }
    const size_t kChunk = 1024;
    size_t n = features.n();
    PackedCodes out(n, model.k_bits);
    for (size_t begin = 0; begin < n; begin += kChunk) {
        size_t end = std::min(begin + kChunk, n);
        Matrix chunk(end - begin, features.dim());
        std::memcpy(chunk.data.data(), features.data.data.data() + begin * features.dim(),
                    chunk.size() * sizeof(double));
        PackedCodes packed = pack(sign_codes(forward(model, chunk)));
        std::memcpy(out.words.data() + begin * out.words_per_row, packed.words.data(),
                    packed.words.size() * sizeof(uint64_t));
    }
    return out;
}

void save_model(const std::string& path, const HashModel& model) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw FormatError("cannot open " + path + " for writing");
    }
    uint32_t version = 1;
    uint32_t d = uint32_t(model.weights.rows);
    uint32_t k = model.k_bits;
    out.write("SDCM", 4);
    out.write(reinterpret_cast<const char*>(&version), 4);
    out.write(reinterpret_cast<const char*>(&d), 4);
    out.write(reinterpret_cast<const char*>(&k), 4);
    out.write(reinterpret_cast<const char*>(model.weights.data.data()),
              std::streamsize(model.weights.size() * 8));
    out.write(reinterpret_cast<const char*>(model.bias.data.data()),
              std::streamsize(model.bias.size() * 8));
    if (!out) {
        throw FormatError("write failed for " + path);
    }
}

HashModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) {
        throw FormatError("cannot open " + path);
    }
    size_t size = size_t(in.tellg());
    in.seekg(0);
    char magic[4];
    uint32_t version = 0, d = 0, k = 0;
    if (size < 16 || !in.read(magic, 4) || std::memcmp(magic, "SDCM", 4) != 0) {
        throw FormatError(path + ": not a model checkpoint (bad magic)");
    }
    in.read(reinterpret_cast<char*>(&version), 4);
    in.read(reinterpret_cast<char*>(&d), 4);
    in.read(reinterpret_cast<char*>(&k), 4);
    if (version != 1) {
        throw FormatError(path + ": unsupported model version " + std::to_string(version));
    }
    size_t expect = 16 + (size_t(d) * k + k) * 8;
    if (size != expect) {
        throw FormatError(path + ": expected " + std::to_string(expect) + " bytes, file has " +
                          std::to_string(size));
    }
    HashModel model;
    model.weights = Matrix(d, k);
    model.bias = Matrix(1, k);
    model.k_bits = k;
    in.read(reinterpret_cast<char*>(model.weights.data.data()),
            std::streamsize(model.weights.size() * 8));
    in.read(reinterpret_cast<char*>(model.bias.data.data()),
            std::streamsize(model.bias.size() * 8));
    if (!in) {
        throw FormatError(path + ": truncated payload");
    }
    return model;
}

}  // namespace sdc
