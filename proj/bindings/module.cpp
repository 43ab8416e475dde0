#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sdc/analysis.hpp"
#include "sdc/baselines.hpp"
#include "sdc/calibration.hpp"
#include "sdc/dataio.hpp"
#include "sdc/errors.hpp"
#include "sdc/losses.hpp"
#include "sdc/retrieval.hpp"
#include "sdc/trainer.hpp"

namespace py = pybind11;

namespace {

sdc::Matrix matrix_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2) {
        throw sdc::ShapeError("expected a 2-d array");
    }
    sdc::Matrix m(size_t(a.shape(0)), size_t(a.shape(1)));
    std::copy_n(a.data(), m.size(), m.data.data());
    return m;
}

py::array_t<double> array_from_matrix(const sdc::Matrix& m) {
    py::array_t<double> out({m.rows, m.cols});
    std::copy_n(m.data.data(), m.size(), out.mutable_data());
    return out;
}

std::vector<uint64_t> labels_from_array(const py::array_t<uint64_t, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 1) {
        throw sdc::ShapeError("expected a 1-d label array");
    }
    return {a.data(), a.data() + a.shape(0)};
}

sdc::FeatureMatrix feature_matrix(const py::array_t<double, py::array::c_style | py::array::forcecast>& data,
                                  const py::object& labels, bool multi_label) {
    sdc::FeatureMatrix f;
    f.data = matrix_from_array(data);
    if (!labels.is_none()) {
        f.labels = labels_from_array(labels.cast<py::array_t<uint64_t, py::array::c_style | py::array::forcecast>>());
        f.multi_label = multi_label;
    }
    return f;
}

py::dict summary_dict(const sdc::EvalSummary& summary) {
    py::dict out;
    out["map_at_k"] = summary.map_at_k;
    out["k"] = summary.k;
    out["per_query_ap"] = summary.per_query_ap;
    py::list pr;
    for (const auto& p : summary.pr_curve) {
        py::dict point;
        point["radius"] = p.radius;
        point["precision"] = p.precision;
        point["recall"] = p.recall;
        pr.append(point);
    }
    out["pr_curve"] = pr;
    if (!summary.pr_by_rank.empty()) {
        py::list ranks;
        for (const auto& p : summary.pr_by_rank) {
            py::dict point;
            point["rank"] = p.rank;
            point["precision"] = p.precision;
            point["recall"] = p.recall;
            ranks.append(point);
        }
        out["pr_by_rank"] = ranks;
    }
    return out;
}

py::dict collapse_dict(const sdc::CollapseReport& report) {
    py::dict out;
    out["intersection"] = report.intersection;
    out["positive_sims"] = report.positive_sims;
    out["negative_sims"] = report.negative_sims;
    out["pos_mass"] = report.histogram.positive_mass;
    out["neg_mass"] = report.histogram.negative_mass;
    out["bin_edges"] = report.histogram.bin_edges;
    return out;
}

py::list report_list(const sdc::TrainReport& report) {
    py::list out;
    for (const auto& rec : report.epochs) {
        py::dict e;
        e["epoch"] = rec.epoch;
        e["total"] = rec.mean_total;
        e["alignment"] = rec.mean_alignment;
        e["quantization"] = rec.mean_quantization;
        e["contrastive"] = rec.mean_contrastive;
        e["batches"] = rec.batches;
        e["wall_sec"] = rec.wall_sec;
        out.append(e);
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_sdchash, m) {
    m.doc() = "binary hashing with similarity distribution calibration";

    py::register_exception<sdc::Error>(m, "SdcError", PyExc_RuntimeError);

    py::class_<sdc::HashModel>(m, "HashModel")
        .def_property_readonly("weights",
                               [](const sdc::HashModel& mod) { return array_from_matrix(mod.weights); })
        .def_property_readonly("bias",
                               [](const sdc::HashModel& mod) { return array_from_matrix(mod.bias); })
        .def_property_readonly("k_bits", [](const sdc::HashModel& mod) { return mod.k_bits; })
        .def_property_readonly("input_dim",
                               [](const sdc::HashModel& mod) { return mod.input_dim(); })
        .def("save", [](const sdc::HashModel& mod, const std::string& path) {
            sdc::save_model(path, mod);
        });

    py::class_<sdc::ItqModel>(m, "ItqModel")
        .def_property_readonly("k_bits", [](const sdc::ItqModel& mod) { return mod.k_bits; })
        .def_property_readonly("rotation",
                               [](const sdc::ItqModel& mod) { return array_from_matrix(mod.rotation); })
        .def("save", [](const sdc::ItqModel& mod, const std::string& path) {
            sdc::save_itq(path, mod);
        });

    py::class_<sdc::PackedCodes>(m, "PackedCodes")
        .def_property_readonly("n", [](const sdc::PackedCodes& c) { return c.n; })
        .def_property_readonly("k_bits", [](const sdc::PackedCodes& c) { return c.k_bits; })
        .def_property_readonly("words",
                               [](const sdc::PackedCodes& c) {
                                   py::array_t<uint64_t> out({c.n, c.words_per_row});
                                   std::copy_n(c.words.data(), c.words.size(), out.mutable_data());
                                   return out;
                               })
        .def("unpack",
             [](const sdc::PackedCodes& c) { return array_from_matrix(sdc::unpack(c)); })
        .def("save", [](const sdc::PackedCodes& c, const std::string& path) {
            sdc::write_codes(path, c);
        });

    m.def("load_model", &sdc::load_model, py::arg("path"));
    m.def("load_itq", &sdc::load_itq, py::arg("path"));
    m.def("load_codes", &sdc::read_codes, py::arg("path"));

    m.def(
        "generate_synthetic",
        [](size_t clusters, size_t per, size_t dim, double center_scale, double within_std,
           uint64_t seed) {
            sdc::SyntheticSpec spec;
            spec.n_clusters = clusters;
            spec.points_per_cluster = per;
            spec.dim = dim;
            spec.center_scale = center_scale;
            spec.within_std = within_std;
            spec.seed = seed;
            sdc::FeatureMatrix f = sdc::generate_synthetic(spec);
            py::array_t<uint64_t> labels(f.labels.size());
            std::copy_n(f.labels.data(), f.labels.size(), labels.mutable_data());
            return py::make_tuple(array_from_matrix(f.data), labels);
        },
        py::arg("clusters") = 4, py::arg("per") = 250, py::arg("dim") = 128,
        py::arg("center_scale") = 1.0, py::arg("within_std") = 1.0, py::arg("seed") = 0);

    m.def("write_features",
          [](const std::string& path,
             const py::array_t<double, py::array::c_style | py::array::forcecast>& data,
             const py::object& labels, bool multi_label) {
              sdc::write_features(path, feature_matrix(data, labels, multi_label));
          },
          py::arg("path"), py::arg("features"), py::arg("labels") = py::none(),
          py::arg("multi_label") = false);

    m.def("read_features", [](const std::string& path) {
        sdc::FeatureMatrix f = sdc::read_features(path);
        py::array_t<uint64_t> labels(f.labels.size());
        std::copy_n(f.labels.data(), f.labels.size(), labels.mutable_data());
        return py::make_tuple(array_from_matrix(f.data), labels, f.multi_label);
    });

    m.def(
        "train",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& features,
           uint32_t bits, size_t epochs, size_t batch_size, double lr, double lambda_q,
           double lambda_cl, double alpha, double beta, uint64_t seed, bool shuffle,
           const std::string& objective, int preservation_p, double temperature,
           double view_noise_factor, double view_dropout) {
            sdc::FeatureMatrix f;
            f.data = matrix_from_array(features);
            sdc::TrainConfig cfg;
            cfg.k_bits = bits;
            cfg.epochs = epochs;
            cfg.batch_size = batch_size;
            cfg.lr = lr;
            cfg.lambda_q = lambda_q;
            cfg.lambda_cl = lambda_cl;
            cfg.calib_alpha = alpha;
            cfg.calib_beta = beta;
            cfg.seed = seed;
            cfg.shuffle = shuffle;
            if (objective == "sdc") {
                cfg.objective = sdc::Objective::sdc;
            } else if (objective == "preservation") {
                cfg.objective = sdc::Objective::preservation;
            } else {
                throw sdc::DomainError("objective must be 'sdc' or 'preservation'");
            }
            cfg.preservation_p = preservation_p;
            cfg.temperature = temperature;
            cfg.view_noise_factor = view_noise_factor;
            cfg.view_dropout = view_dropout;
            sdc::TrainResult result = sdc::train(f, cfg);
            return py::make_tuple(result.model, report_list(result.report));
        },
        py::arg("features"), py::arg("bits") = 16, py::arg("epochs") = 100,
        py::arg("batch_size") = 64, py::arg("lr") = 1e-4, py::arg("lambda_q") = 1.0,
        py::arg("lambda_cl") = 1.0, py::arg("alpha") = 5.0, py::arg("beta") = 5.0,
        py::arg("seed") = 0, py::arg("shuffle") = true, py::arg("objective") = "sdc",
        py::arg("preservation_p") = 2, py::arg("temperature") = 0.2,
        py::arg("view_noise_factor") = 0.1, py::arg("view_dropout") = 0.1);

    m.def("encode",
          [](const sdc::HashModel& model,
             const py::array_t<double, py::array::c_style | py::array::forcecast>& features) {
              sdc::FeatureMatrix f;
              f.data = matrix_from_array(features);
              return sdc::encode_dataset(model, f);
          },
          py::arg("model"), py::arg("features"));

    m.def("pack",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& codes) {
              return sdc::pack(matrix_from_array(codes));
          },
          py::arg("codes"));

    m.def("sign_codes",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& f) {
              return array_from_matrix(sdc::sign_codes(matrix_from_array(f)));
          },
          py::arg("f"));

    m.def("forward",
          [](const sdc::HashModel& model,
             const py::array_t<double, py::array::c_style | py::array::forcecast>& x) {
              return array_from_matrix(sdc::forward(model, matrix_from_array(x)));
          },
          py::arg("model"), py::arg("x"));

    m.def("hamming_distance",
          [](const sdc::PackedCodes& a, size_t i, const sdc::PackedCodes& b, size_t j) {
              return sdc::hamming_distance(a, i, b, j);
          },
          py::arg("a"), py::arg("i"), py::arg("b"), py::arg("j"));

    m.def(
        "search_topk",
        [](const sdc::PackedCodes& queries, const sdc::PackedCodes& gallery, size_t k) {
            auto results = sdc::search_topk(queries, gallery, k);
            size_t width = results.empty() ? 0 : results[0].indices.size();
            py::array_t<uint32_t> indices({results.size(), width});
            py::array_t<uint32_t> distances({results.size(), width});
            auto* ip = indices.mutable_data();
            auto* dp = distances.mutable_data();
            for (const auto& r : results) {
                std::copy_n(r.indices.data(), width, ip);
                std::copy_n(r.distances.data(), width, dp);
                ip += width;
                dp += width;
            }
            return py::make_tuple(indices, distances);
        },
        py::arg("queries"), py::arg("gallery"), py::arg("k"));

    m.def(
        "evaluate",
        [](const sdc::PackedCodes& queries, const sdc::PackedCodes& gallery,
           const py::array_t<uint64_t, py::array::c_style | py::array::forcecast>& qlabels,
           const py::array_t<uint64_t, py::array::c_style | py::array::forcecast>& glabels,
           size_t k, bool exclude_self, bool multi_label, bool rank_curve) {
            sdc::EvalOptions opts;
            opts.exclude_self = exclude_self;
            opts.multi_label = multi_label;
            opts.rank_curve = rank_curve;
            return summary_dict(sdc::evaluate(queries, gallery, labels_from_array(qlabels),
                                              labels_from_array(glabels), k, opts));
        },
        py::arg("queries"), py::arg("gallery"), py::arg("query_labels"),
        py::arg("gallery_labels"), py::arg("k") = 100, py::arg("exclude_self") = false,
        py::arg("multi_label") = false, py::arg("rank_curve") = false);

    m.def("regularized_incomplete_beta", &sdc::regularized_incomplete_beta, py::arg("a"),
          py::arg("b"), py::arg("x"));
    m.def(
        "beta_icdf",
        [](double alpha, double beta, double z) {
            return sdc::beta_icdf(sdc::BetaDistribution(alpha, beta), z);
        },
        py::arg("alpha"), py::arg("beta"), py::arg("z"));
    m.def("icdf_to_similarity", &sdc::icdf_to_similarity, py::arg("u"));
    m.def(
        "binomial_bucket_pmf",
        [](uint32_t k, uint32_t d) { return sdc::BinomialBucketDistribution(k).pmf(d); },
        py::arg("k_bits"), py::arg("d"));
    m.def(
        "calibration_targets",
        [](double alpha, double beta, size_t n) {
            return sdc::calibration_targets(sdc::BetaDistribution(alpha, beta), n);
        },
        py::arg("alpha"), py::arg("beta"), py::arg("n"));

    m.def(
        "sdc_loss",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& f,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& x, double alpha,
           double beta) {
            sdc::SimilarityBatch batch =
                sdc::build_pair_batch(matrix_from_array(x), matrix_from_array(f));
            sdc::LossValueAndGrad out =
                sdc::sdc_loss(batch, sdc::BetaDistribution(alpha, beta));
            return py::make_tuple(out.value, array_from_matrix(out.grad_f));
        },
        py::arg("f"), py::arg("x"), py::arg("alpha") = 5.0, py::arg("beta") = 5.0);

    m.def(
        "quantization_loss",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& f) {
            sdc::LossValueAndGrad out = sdc::quantization_loss(matrix_from_array(f));
            return py::make_tuple(out.value, array_from_matrix(out.grad_f));
        },
        py::arg("f"));

    m.def(
        "preservation_loss",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& f,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& x, int p) {
            sdc::SimilarityBatch batch =
                sdc::build_pair_batch(matrix_from_array(x), matrix_from_array(f));
            sdc::LossValueAndGrad out = sdc::preservation_loss(batch, p);
            return py::make_tuple(out.value, array_from_matrix(out.grad_f));
        },
        py::arg("f"), py::arg("x"), py::arg("p") = 2);

    m.def(
        "contrastive_loss",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& v1,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& v2,
           double temperature) {
            sdc::ContrastiveLoss out = sdc::contrastive_loss(
                matrix_from_array(v1), matrix_from_array(v2), temperature);
            return py::make_tuple(out.value, array_from_matrix(out.grad_view1),
                                  array_from_matrix(out.grad_view2));
        },
        py::arg("view1"), py::arg("view2"), py::arg("temperature") = 0.2);

    m.def(
        "fit_itq",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& features,
           uint32_t bits, size_t iters, uint64_t seed, bool allow_rank_deficient) {
            sdc::FeatureMatrix f;
            f.data = matrix_from_array(features);
            sdc::FitItqOptions opts;
            opts.iters = iters;
            opts.allow_rank_deficient = allow_rank_deficient;
            sdc::FitItqResult fit = sdc::fit_itq(f, bits, opts, seed);
            return py::make_tuple(fit.model, fit.quantization_errors);
        },
        py::arg("features"), py::arg("bits") = 16, py::arg("iters") = 50, py::arg("seed") = 0,
        py::arg("allow_rank_deficient") = false);

    m.def(
        "encode_itq",
        [](const sdc::ItqModel& model,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& features) {
            sdc::FeatureMatrix f;
            f.data = matrix_from_array(features);
            return sdc::encode_itq(model, f);
        },
        py::arg("model"), py::arg("features"));

    m.def("fit_lsh", &sdc::fit_lsh, py::arg("dim"), py::arg("bits"), py::arg("seed") = 0);

    m.def(
        "collapse_report",
        [](const sdc::PackedCodes& codes,
           const py::array_t<uint64_t, py::array::c_style | py::array::forcecast>& labels,
           bool multi_label, size_t n_pos, size_t n_neg, size_t bins, uint64_t seed) {
            sdc::CollapseOptions opts;
            opts.n_pos = n_pos;
            opts.n_neg = n_neg;
            opts.bins = bins;
            opts.seed = seed;
            return collapse_dict(
                sdc::collapse_report(codes, labels_from_array(labels), multi_label, opts));
        },
        py::arg("codes"), py::arg("labels"), py::arg("multi_label") = false,
        py::arg("n_pos") = 10000, py::arg("n_neg") = 100000, py::arg("bins") = 200,
        py::arg("seed") = 0);

    m.def(
        "feature_collapse_report",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& features,
           const py::array_t<uint64_t, py::array::c_style | py::array::forcecast>& labels,
           bool multi_label, size_t n_pos, size_t n_neg, size_t bins, uint64_t seed) {
            sdc::CollapseOptions opts;
            opts.n_pos = n_pos;
            opts.n_neg = n_neg;
            opts.bins = bins;
            opts.seed = seed;
            sdc::FeatureMatrix f;
            f.data = matrix_from_array(features);
            f.labels = labels_from_array(labels);
            f.multi_label = multi_label;
            return collapse_dict(sdc::feature_collapse_report(f, opts));
        },
        py::arg("features"), py::arg("labels"), py::arg("multi_label") = false,
        py::arg("n_pos") = 10000, py::arg("n_neg") = 100000, py::arg("bins") = 200,
        py::arg("seed") = 0);
}
