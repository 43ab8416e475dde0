// sdchash: train, encode and evaluate calibrated binary hash codes.
//
// Every subcommand prints a single JSON document on stdout; human-readable
// progress goes to stderr. Exit codes: 0 success, 1 usage, 2 data error,
// 3 numeric failure.

#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "sdc/analysis.hpp"
#include "sdc/baselines.hpp"
#include "sdc/dataio.hpp"
#include "sdc/errors.hpp"
#include "sdc/retrieval.hpp"
#include "sdc/trainer.hpp"

using json = nlohmann::json;

namespace {

json g_config;  // flat key/value defaults loaded from --config

void load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw sdc::FormatError("cannot open config file " + path);
    }
    try {
        in >> g_config;
    } catch (const json::exception& e) {
        throw sdc::FormatError("config file " + path + ": " + e.what());
    }
    if (!g_config.is_object()) {
        throw sdc::FormatError("config file " + path + ": expected a flat JSON object");
    }
}

// CLI flags win over config-file values, which win over built-in defaults.
template <typename T>
void config_fallback(const CLI::Option* opt, const char* key, T& target) {
    if (opt != nullptr && opt->count() > 0) return;
    if (g_config.contains(key)) {
        target = g_config.at(key).get<T>();
    }
}

sdc::FeatureMatrix load_features_any(const std::string& path, bool csv_labels) {
    if (path.size() > 4 && path.substr(path.size() - 4) == ".csv") {
        return sdc::read_features_csv(path, csv_labels);
    }
    return sdc::read_features(path);
}

char sniff_model_magic(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    char magic[4] = {0, 0, 0, 0};
    if (!in || !in.read(magic, 4) || magic[0] != 'S' || magic[1] != 'D' || magic[2] != 'C') {
        throw sdc::FormatError(path + ": not a checkpoint file");
    }
    return magic[3];
}

json epoch_to_json(const sdc::EpochRecord& rec) {
    // wall time is logged to stderr only, so repeated runs emit identical JSON
    return json{{"epoch", rec.epoch},
                {"total", rec.mean_total},
                {"alignment", rec.mean_alignment},
                {"quantization", rec.mean_quantization},
                {"contrastive", rec.mean_contrastive},
                {"batches", rec.batches}};
}

json summary_to_json(const sdc::EvalSummary& summary) {
    json pr = json::array();
    for (const auto& p : summary.pr_curve) {
        pr.push_back({{"radius", p.radius}, {"precision", p.precision}, {"recall", p.recall}});
    }
    json doc{{"map_at_k", summary.map_at_k},
             {"k", summary.k},
             {"per_query_ap", summary.per_query_ap},
             {"pr_curve", pr}};
    if (!summary.pr_by_rank.empty()) {
        json ranks = json::array();
        for (const auto& p : summary.pr_by_rank) {
            ranks.push_back({{"rank", p.rank}, {"precision", p.precision}, {"recall", p.recall}});
        }
        doc["pr_by_rank"] = ranks;
    }
    return doc;
}

void emit(const json& doc, const std::string& out_path = "") {
    std::cout << doc.dump(2) << "\n";
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) {
            throw sdc::FormatError("cannot open " + out_path + " for writing");
        }
        out << doc.dump(2) << "\n";
    }
}

void write_pr_csv(const std::string& path, const sdc::EvalSummary& summary) {
    std::ofstream out(path);
    if (!out) {
        throw sdc::FormatError("cannot open " + path + " for writing");
    }
    out << "radius,precision,recall\n";
    for (const auto& p : summary.pr_curve) {
        out << p.radius << "," << p.precision << "," << p.recall << "\n";
    }
}

void write_histogram_csv(const std::string& path, const sdc::SimilarityHistogram& h) {
    std::ofstream out(path);
    if (!out) {
        throw sdc::FormatError("cannot open " + path + " for writing");
    }
    out << "bin_low,bin_high,pos_mass,neg_mass\n";
    for (size_t b = 0; b + 1 < h.bin_edges.size(); ++b) {
        out << h.bin_edges[b] << "," << h.bin_edges[b + 1] << "," << h.positive_mass[b] << ","
            << h.negative_mass[b] << "\n";
    }
}

void write_pairs_csv(const std::string& path, const sdc::CollapseReport& report) {
    std::ofstream out(path);
    if (!out) {
        throw sdc::FormatError("cannot open " + path + " for writing");
    }
    out << "kind,similarity\n";
    for (double s : report.positive_sims) out << "pos," << s << "\n";
    for (double s : report.negative_sims) out << "neg," << s << "\n";
}

struct CliState {
    uint64_t seed = 0;
    std::string out;
    std::string config_path;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* out_opt = nullptr;
};

int run(int argc, char** argv) {
    CLI::App app{"similarity-calibrated binary hashing toolkit"};
    app.require_subcommand(1);
    app.fallthrough(true);

    CliState st;
    st.seed_opt = app.add_option("--seed", st.seed, "master random seed");
    st.out_opt = app.add_option("--out", st.out, "output path of the subcommand");
    app.add_option("--config", st.config_path,
                   "JSON file with flat keys mirroring the training/synthetic options");

    // ---- gen-data ----
    auto* gen = app.add_subcommand("gen-data", "generate a synthetic clustered feature set");
    sdc::SyntheticSpec spec;
    auto* o_clusters = gen->add_option("--clusters", spec.n_clusters, "number of clusters");
    auto* o_per = gen->add_option("--per", spec.points_per_cluster, "points per cluster");
    auto* o_dim = gen->add_option("--dim", spec.dim, "feature dimension");
    auto* o_cscale = gen->add_option("--center-scale", spec.center_scale, "center spread");
    auto* o_wstd = gen->add_option("--within-std", spec.within_std, "within-cluster std");

    // ---- train ----
    auto* tr = app.add_subcommand("train", "train a hash model on a feature file");
    std::string tr_features;
    sdc::TrainConfig cfg;
    std::string objective = "sdc";
    tr->add_option("--features", tr_features, "input feature file (.sdcf or .csv)")->required();
    auto* o_bits = tr->add_option("--bits", cfg.k_bits, "code length K");
    auto* o_epochs = tr->add_option("--epochs", cfg.epochs, "training epochs");
    auto* o_batch = tr->add_option("--batch", cfg.batch_size, "mini-batch size");
    auto* o_lr = tr->add_option("--lr", cfg.lr, "Adam learning rate");
    auto* o_lq = tr->add_option("--lambda-q", cfg.lambda_q, "quantization weight");
    auto* o_lcl = tr->add_option("--lambda-cl", cfg.lambda_cl, "contrastive weight");
    auto* o_alpha = tr->add_option("--alpha", cfg.calib_alpha, "calibration alpha");
    auto* o_beta = tr->add_option("--beta", cfg.calib_beta, "calibration beta");
    auto* o_obj = tr->add_option("--objective", objective, "sdc or preservation")
                      ->check(CLI::IsMember({"sdc", "preservation"}));
    auto* o_p = tr->add_option("--p", cfg.preservation_p, "preservation exponent (1 or 2)");
    auto* o_temp = tr->add_option("--temperature", cfg.temperature, "contrastive temperature");
    bool no_shuffle = false;
    tr->add_flag("--no-shuffle", no_shuffle, "disable epoch shuffling");
    bool tr_csv_labels = false;
    tr->add_flag("--csv-labels", tr_csv_labels, "csv input carries a final label column");

    // ---- encode ----
    auto* enc = app.add_subcommand("encode", "encode features with a trained checkpoint");
    std::string enc_model, enc_features;
    bool enc_csv_labels = false;
    enc->add_option("--model", enc_model, "checkpoint (.sdcm or .sdci)")->required();
    enc->add_option("--features", enc_features, "feature file")->required();
    enc->add_flag("--csv-labels", enc_csv_labels, "csv input carries a final label column");

    // ---- retrieve ----
    auto* ret = app.add_subcommand("retrieve", "top-k Hamming search of queries in a gallery");
    std::string ret_queries, ret_gallery;
    size_t ret_k = 10;
    ret->add_option("--queries", ret_queries, "query code file")->required();
    ret->add_option("--gallery", ret_gallery, "gallery code file")->required();
    ret->add_option("--k", ret_k, "neighbors per query");

    // ---- eval ----
    auto* ev = app.add_subcommand("eval", "mAP@k and PR curve of codes against labels");
    std::string ev_qcodes, ev_gcodes, ev_qfeat, ev_gfeat, ev_prcsv;
    size_t ev_k = 100;
    bool ev_exclude_self = false, ev_csv_labels = false;
    ev->add_option("--query-codes", ev_qcodes, "query code file")->required();
    ev->add_option("--gallery-codes", ev_gcodes, "gallery code file")->required();
    ev->add_option("--query-features", ev_qfeat, "query feature file (labels)")->required();
    ev->add_option("--gallery-features", ev_gfeat, "gallery feature file (labels)")->required();
    bool ev_rank_curve = false;
    ev->add_option("--k", ev_k, "evaluation depth");
    ev->add_flag("--exclude-self", ev_exclude_self,
                 "drop the gallery item with the query's index");
    ev->add_flag("--pr-by-rank", ev_rank_curve,
                 "also trace precision/recall over rank cutoffs 1..k");
    ev->add_flag("--csv-labels", ev_csv_labels, "csv inputs carry a final label column");
    ev->add_option("--pr-csv", ev_prcsv, "also write the Hamming-radius PR curve as CSV");

    // ---- analyze ----
    auto* an = app.add_subcommand("analyze", "similarity histograms and collapse score");
    std::string an_codes, an_features, an_hist_csv, an_pairs_csv;
    sdc::CollapseOptions an_opts;
    bool an_raw = false, an_csv_labels = false;
    an->add_option("--codes", an_codes, "code file (unused with --raw)");
    an->add_option("--features", an_features, "feature file carrying labels")->required();
    auto* o_pos = an->add_option("--pos", an_opts.n_pos, "positive pairs to sample");
    auto* o_neg = an->add_option("--neg", an_opts.n_neg, "negative pairs to sample");
    auto* o_bins = an->add_option("--bins", an_opts.bins, "histogram bins over [-1, 1]");
    an->add_flag("--raw", an_raw, "analyze raw feature cosines instead of codes");
    an->add_flag("--csv-labels", an_csv_labels, "csv input carries a final label column");
    an->add_option("--hist-csv", an_hist_csv, "write the histogram table as CSV");
    an->add_option("--pairs-csv", an_pairs_csv, "write the raw pair similarities as CSV");

    // ---- baseline ----
    auto* base = app.add_subcommand("baseline", "fit a reference hashing baseline");
    base->require_subcommand(1);
    auto* itq = base->add_subcommand("itq", "iterative quantization");
    std::string itq_features;
    uint32_t itq_bits = 16;
    sdc::FitItqOptions itq_opts;
    bool itq_csv_labels = false;
    itq->add_option("--features", itq_features, "training feature file")->required();
    itq->add_option("--bits", itq_bits, "code length K");
    itq->add_option("--iters", itq_opts.iters, "alternation rounds");
    itq->add_flag("--allow-rank-deficient", itq_opts.allow_rank_deficient,
                  "accept covariance rank below K");
    itq->add_flag("--csv-labels", itq_csv_labels, "csv input carries a final label column");

    auto* lsh = base->add_subcommand("lsh", "random hyperplane projection");
    std::string lsh_features;
    size_t lsh_dim = 0;
    uint32_t lsh_bits = 16;
    lsh->add_option("--features", lsh_features, "feature file (to read the dimension)");
    lsh->add_option("--dim", lsh_dim, "feature dimension (alternative to --features)");
    lsh->add_option("--bits", lsh_bits, "code length K");

    auto* pres = base->add_subcommand(
        "preservation", "similarity-preservation training (shared trainer, Lp objective)");
    std::string pres_features;
    sdc::TrainConfig pres_cfg;
    pres_cfg.objective = sdc::Objective::preservation;
    pres_cfg.lambda_cl = 0.0;
    bool pres_csv_labels = false;
    pres->add_option("--features", pres_features, "training feature file")->required();
    auto* po_bits = pres->add_option("--bits", pres_cfg.k_bits, "code length K");
    auto* po_epochs = pres->add_option("--epochs", pres_cfg.epochs, "training epochs");
    auto* po_batch = pres->add_option("--batch", pres_cfg.batch_size, "mini-batch size");
    auto* po_lr = pres->add_option("--lr", pres_cfg.lr, "Adam learning rate");
    auto* po_p = pres->add_option("--p", pres_cfg.preservation_p, "exponent (1 or 2)");
    auto* po_lq = pres->add_option("--lambda-q", pres_cfg.lambda_q, "quantization weight");
    pres->add_flag("--csv-labels", pres_csv_labels, "csv input carries a final label column");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp") {
            app.exit(e);
            return 0;
        }
        std::cerr << e.what() << "\n\n" << app.help() << "\n";
        return 1;
    }

    if (!st.config_path.empty()) {
        load_config_file(st.config_path);
    }
    config_fallback(st.seed_opt, "seed", st.seed);

    if (*gen) {
        config_fallback(o_clusters, "n_clusters", spec.n_clusters);
        config_fallback(o_per, "points_per_cluster", spec.points_per_cluster);
        config_fallback(o_dim, "dim", spec.dim);
        config_fallback(o_cscale, "center_scale", spec.center_scale);
        config_fallback(o_wstd, "within_std", spec.within_std);
        spec.seed = st.seed;
        if (st.out.empty()) throw sdc::DomainError("gen-data: --out is required");
        sdc::FeatureMatrix features = sdc::generate_synthetic(spec);
        sdc::write_features(st.out, features);
        emit(json{{"command", "gen-data"},
                  {"n", features.n()},
                  {"dim", features.dim()},
                  {"clusters", spec.n_clusters},
                  {"seed", st.seed},
                  {"path", st.out}});
        return 0;
    }

    if (*tr) {
        config_fallback(o_bits, "k_bits", cfg.k_bits);
        config_fallback(o_epochs, "epochs", cfg.epochs);
        config_fallback(o_batch, "batch_size", cfg.batch_size);
        config_fallback(o_lr, "lr", cfg.lr);
        config_fallback(o_lq, "lambda_q", cfg.lambda_q);
        config_fallback(o_lcl, "lambda_cl", cfg.lambda_cl);
        config_fallback(o_alpha, "calib_alpha", cfg.calib_alpha);
        config_fallback(o_beta, "calib_beta", cfg.calib_beta);
        config_fallback(o_obj, "objective", objective);
        config_fallback(o_p, "preservation_p", cfg.preservation_p);
        config_fallback(o_temp, "temperature", cfg.temperature);
        cfg.objective = objective == "sdc" ? sdc::Objective::sdc : sdc::Objective::preservation;
        cfg.seed = st.seed;
        cfg.shuffle = !no_shuffle;
        if (st.out.empty()) throw sdc::DomainError("train: --out is required");

        sdc::FeatureMatrix features = load_features_any(tr_features, tr_csv_labels);
        std::cerr << "training on " << features.n() << " x " << features.dim() << " features, "
                  << cfg.k_bits << " bits, " << cfg.epochs << " epochs\n";
        sdc::TrainResult result = sdc::train(features, cfg);
        sdc::save_model(st.out, result.model);

        json cfg_echo{{"epochs", cfg.epochs},
                      {"batch_size", cfg.batch_size},
                      {"lr", cfg.lr},
                      {"k_bits", cfg.k_bits},
                      {"lambda_q", cfg.lambda_q},
                      {"lambda_cl", cfg.lambda_cl},
                      {"calib_alpha", cfg.calib_alpha},
                      {"calib_beta", cfg.calib_beta},
                      {"seed", cfg.seed},
                      {"shuffle", cfg.shuffle},
                      {"objective", objective},
                      {"preservation_p", cfg.preservation_p},
                      {"temperature", cfg.temperature},
                      {"view_noise_factor", cfg.view_noise_factor},
                      {"view_dropout", cfg.view_dropout}};
        {
            std::ofstream side(st.out + ".json");
            side << cfg_echo.dump(2) << "\n";
        }

        json epochs = json::array();
        double wall = 0.0;
        for (const auto& rec : result.report.epochs) {
            epochs.push_back(epoch_to_json(rec));
            wall += rec.wall_sec;
        }
        std::cerr << "trained in " << wall << " s\n";
        emit(json{{"command", "train"},
                  {"path", st.out},
                  {"config", cfg_echo},
                  {"epochs", epochs}});
        return 0;
    }

    if (*enc) {
        if (st.out.empty()) throw sdc::DomainError("encode: --out is required");
        sdc::FeatureMatrix features = load_features_any(enc_features, enc_csv_labels);
        sdc::PackedCodes codes;
        char kind = sniff_model_magic(enc_model);
        if (kind == 'M') {
            codes = sdc::encode_dataset(sdc::load_model(enc_model), features);
        } else if (kind == 'I') {
            codes = sdc::encode_itq(sdc::load_itq(enc_model), features);
        } else {
            throw sdc::FormatError(enc_model + ": unknown checkpoint kind");
        }
        sdc::write_codes(st.out, codes);
        emit(json{{"command", "encode"},
                  {"n", codes.n},
                  {"bits", codes.k_bits},
                  {"path", st.out}});
        return 0;
    }

    if (*ret) {
        sdc::PackedCodes queries = sdc::read_codes(ret_queries);
        sdc::PackedCodes gallery = sdc::read_codes(ret_gallery);
        auto results = sdc::search_topk(queries, gallery, ret_k);
        json out_results = json::array();
        for (const auto& r : results) {
            out_results.push_back({{"query", r.query_index},
                                   {"indices", r.indices},
                                   {"distances", r.distances}});
        }
        emit(json{{"command", "retrieve"}, {"k", ret_k}, {"results", out_results}}, st.out);
        return 0;
    }

    if (*ev) {
        sdc::PackedCodes queries = sdc::read_codes(ev_qcodes);
        sdc::PackedCodes gallery = sdc::read_codes(ev_gcodes);
        sdc::FeatureMatrix qf = load_features_any(ev_qfeat, ev_csv_labels);
        sdc::FeatureMatrix gf = load_features_any(ev_gfeat, ev_csv_labels);
        if (!qf.has_labels() || !gf.has_labels()) {
            throw sdc::DegenerateInputError("eval: both feature files must carry labels");
        }
        sdc::EvalOptions opts;
        opts.exclude_self = ev_exclude_self;
        opts.multi_label = qf.multi_label || gf.multi_label;
        opts.rank_curve = ev_rank_curve;
        sdc::EvalSummary summary =
            sdc::evaluate(queries, gallery, qf.labels, gf.labels, ev_k, opts);
        if (!ev_prcsv.empty()) write_pr_csv(ev_prcsv, summary);
        json doc = summary_to_json(summary);
        doc["command"] = "eval";
        emit(doc, st.out);
        return 0;
    }

    if (*an) {
        config_fallback(o_pos, "n_pos", an_opts.n_pos);
        config_fallback(o_neg, "n_neg", an_opts.n_neg);
        config_fallback(o_bins, "bins", an_opts.bins);
        an_opts.seed = st.seed;
        sdc::FeatureMatrix features = load_features_any(an_features, an_csv_labels);
        if (!features.has_labels()) {
            throw sdc::DegenerateInputError("analyze: feature file must carry labels");
        }
        sdc::CollapseReport report;
        if (an_raw) {
            report = sdc::feature_collapse_report(features, an_opts);
        } else {
            if (an_codes.empty()) {
                throw sdc::DomainError("analyze: --codes is required unless --raw is given");
            }
            sdc::PackedCodes codes = sdc::read_codes(an_codes);
            report = sdc::collapse_report(codes, features.labels, features.multi_label, an_opts);
        }
        if (!an_hist_csv.empty()) write_histogram_csv(an_hist_csv, report.histogram);
        if (!an_pairs_csv.empty()) write_pairs_csv(an_pairs_csv, report);
        emit(json{{"command", "analyze"},
                  {"intersection", report.intersection},
                  {"config",
                   {{"n_pos", an_opts.n_pos},
                    {"n_neg", an_opts.n_neg},
                    {"bins", an_opts.bins},
                    {"seed", an_opts.seed},
                    {"source", an_raw ? "features" : "codes"}}},
                  {"counts",
                   {{"positive", report.positive_sims.size()},
                    {"negative", report.negative_sims.size()}}}},
             st.out);
        return 0;
    }

    if (*itq) {
        if (st.out.empty()) throw sdc::DomainError("baseline itq: --out is required");
        sdc::FeatureMatrix features = load_features_any(itq_features, itq_csv_labels);
        sdc::FitItqResult fit = sdc::fit_itq(features, itq_bits, itq_opts, st.seed);
        sdc::save_itq(st.out, fit.model);
        emit(json{{"command", "baseline-itq"},
                  {"path", st.out},
                  {"bits", itq_bits},
                  {"iters", itq_opts.iters},
                  {"initial_error", fit.quantization_errors.front()},
                  {"final_error", fit.quantization_errors.back()}});
        return 0;
    }

    if (*lsh) {
        if (st.out.empty()) throw sdc::DomainError("baseline lsh: --out is required");
        size_t d = lsh_dim;
        if (d == 0) {
            if (lsh_features.empty()) {
                throw sdc::DomainError("baseline lsh: give --dim or --features");
            }
            d = load_features_any(lsh_features, false).dim();
        }
        sdc::HashModel model = sdc::fit_lsh(d, lsh_bits, st.seed);
        sdc::save_model(st.out, model);
        emit(json{{"command", "baseline-lsh"}, {"path", st.out}, {"dim", d}, {"bits", lsh_bits}});
        return 0;
    }

    if (*pres) {
        config_fallback(po_bits, "k_bits", pres_cfg.k_bits);
        config_fallback(po_epochs, "epochs", pres_cfg.epochs);
        config_fallback(po_batch, "batch_size", pres_cfg.batch_size);
        config_fallback(po_lr, "lr", pres_cfg.lr);
        config_fallback(po_p, "preservation_p", pres_cfg.preservation_p);
        config_fallback(po_lq, "lambda_q", pres_cfg.lambda_q);
        pres_cfg.seed = st.seed;
        if (st.out.empty()) throw sdc::DomainError("baseline preservation: --out is required");
        sdc::FeatureMatrix features = load_features_any(pres_features, pres_csv_labels);
        sdc::TrainResult result = sdc::train(features, pres_cfg);
        sdc::save_model(st.out, result.model);
        json epochs = json::array();
        for (const auto& rec : result.report.epochs) epochs.push_back(epoch_to_json(rec));
        emit(json{{"command", "baseline-preservation"},
                  {"path", st.out},
                  {"p", pres_cfg.preservation_p},
                  {"epochs", epochs}});
        return 0;
    }

    std::cerr << app.help() << "\n";
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const sdc::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const sdc::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
