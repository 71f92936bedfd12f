#include "pat/eval.hpp"

#include <cmath>
#include <set>
#include <utility>

#include "pat/parallel.hpp"
#include "pat/tensor_io.hpp"

namespace pat {
namespace {

void check_inputs(const EvalInputs& in) {
    const auto& m = in.manifest;
    if (m.samples.empty()) throw Error(ErrorKind::LengthMismatch, "dataset has no samples");
    if (in.frames.size() != m.samples.size()) {
        throw Error(ErrorKind::LengthMismatch, std::to_string(in.frames.size()) + " frame sets for " +
                                                   std::to_string(m.samples.size()) + " samples");
    }
    if (in.text_banks.size() != in.datastore.size()) {
        throw Error(ErrorKind::DimensionMismatch, std::to_string(in.text_banks.size()) + " text banks for " +
                                                      std::to_string(in.datastore.size()) + " prompts");
    }
    if (in.text_banks.empty()) throw Error(ErrorKind::DimensionMismatch, "datastore is empty");
    for (std::size_t p = 0; p < in.text_banks.size(); ++p) {
        if (in.text_banks[p].rows() != m.num_classes()) {
            throw Error(ErrorKind::DimensionMismatch, "text bank for prompt " + in.datastore.prompts[p].id + " has " +
                                                          std::to_string(in.text_banks[p].rows()) + " rows, dataset has " +
                                                          std::to_string(m.num_classes()) + " labels");
        }
    }
}

EvaluationReport base_report(const EvalInputs& in, const EvalOptions& opts) {
    EvaluationReport r;
    r.dataset_name = in.manifest.dataset_name;
    r.condition = opts.condition;
    r.method = opts.method;
    r.metric = metric_for(in.manifest.task);
    r.betas = uses_alignment(opts.method) ? opts.betas : BetaPair{};
    r.temperature = opts.temperature;
    r.n_samples = in.manifest.samples.size();
    r.n_prompts = opts.method == Method::ZeroShot ? 1 : in.datastore.size();
    r.datastore_version = in.datastore.version;
    r.split = opts.split;
    return r;
}

struct ClassEmbeddings {
    EmbeddingMatrix text;
    std::optional<PromptWeights> weights;
};

ClassEmbeddings build_class_embeddings(const EvalInputs& in, Method method, const EmbeddingMatrix& pooled,
                                       double temperature, std::size_t threads) {
    if (method == Method::ZeroShot) return {uniform_prompt_ensemble(in.text_banks.first(1)), std::nullopt};
    if (!uses_weighted_ensemble(method)) return {uniform_prompt_ensemble(in.text_banks), std::nullopt};
    const auto ids = in.datastore.ids();
    auto res = weighted_prompt_ensemble(in.text_banks, pooled, temperature, ids, threads);
    return {std::move(res.text), std::move(res.weights)};
}

double score_metric(const DatasetManifest& manifest, const LogitMatrix& logits, std::vector<std::size_t>& predictions) {
    predictions.resize(logits.rows());
    for (std::size_t i = 0; i < logits.rows(); ++i) predictions[i] = argmax(logits.row(i));
    if (manifest.task == TaskType::SingleLabel) return accuracy(predictions, manifest);
    return mean_average_precision(logits, manifest);
}

} // namespace

std::string_view to_string(Method m) {
    switch (m) {
    case Method::ZeroShot: return "zs";
    case Method::PromptEnsemble: return "pe";
    case Method::WeightedPromptEnsemble: return "wpe";
    case Method::PromptEnsembleCma: return "pe+cma";
    case Method::Pat: return "pat";
    }
    return "?";
}

Method parse_method(std::string_view name) {
    if (name == "zs") return Method::ZeroShot;
    if (name == "pe") return Method::PromptEnsemble;
    if (name == "wpe") return Method::WeightedPromptEnsemble;
    if (name == "pe+cma" || name == "pe-cma") return Method::PromptEnsembleCma;
    if (name == "pat") return Method::Pat;
    throw Error(ErrorKind::InvalidArgument, "unknown method \"" + std::string(name) + "\"");
}

bool uses_alignment(Method m) noexcept { return m == Method::PromptEnsembleCma || m == Method::Pat; }

bool uses_weighted_ensemble(Method m) noexcept { return m == Method::WeightedPromptEnsemble || m == Method::Pat; }

std::string_view to_string(MetricName m) { return m == MetricName::Accuracy ? "accuracy" : "mAP"; }

MetricName parse_metric(std::string_view name) {
    if (name == "accuracy") return MetricName::Accuracy;
    if (name == "mAP") return MetricName::MeanAveragePrecision;
    throw Error(ErrorKind::SchemaError, "unknown metric \"" + std::string(name) + "\"");
}

MetricName metric_for(TaskType task) noexcept {
    return task == TaskType::SingleLabel ? MetricName::Accuracy : MetricName::MeanAveragePrecision;
}

void validate(const BetaGrid& grid) {
    if (grid.pairs.empty()) throw Error(ErrorKind::InvalidArgument, "beta grid is empty");
    std::set<std::pair<double, double>> seen;
    for (const auto& p : grid.pairs) {
        validate(p);
        if (!seen.emplace(p.beta_audio, p.beta_text).second) {
            throw Error(ErrorKind::DuplicatePair, "beta pair (" + std::to_string(p.beta_audio) + ", " +
                                                      std::to_string(p.beta_text) + ") appears twice");
        }
    }
}

BetaGrid published_beta_grid() {
    return {{{0.01, 0.1}, {0.05, 0.5}, {0.1, 0.02}, {0.01, 0.01}, {0.5, 0.5}}};
}

EmbeddingMatrix pooled_audio(std::span<const FrameEmbeddings> frames, std::size_t threads) {
    if (frames.empty()) throw Error(ErrorKind::LengthMismatch, "no samples to pool");
    const std::size_t d = frames.front().cols();
    for (const auto& f : frames) {
        if (f.cols() != d) throw Error(ErrorKind::DimensionMismatch, "samples differ in embedding dim");
    }
    EmbeddingMatrix out(frames.size(), d);
    parallel_for(frames.size(), threads, [&](std::size_t i) {
        const EmbeddingMatrix a = pool_frames(frames[i]);
        std::copy(a.values().begin(), a.values().end(), out.row(i).begin());
    });
    return out;
}

EvalOutcome evaluate_dataset(const EvalInputs& in, const EvalOptions& opts) {
    check_inputs(in);
    validate(opts.betas);

    EvalOutcome out;
    out.report = base_report(in, opts);

    const EmbeddingMatrix pooled = pooled_audio(in.frames, opts.threads);
    auto classes = build_class_embeddings(in, opts.method, pooled, opts.temperature, opts.threads);
    out.class_embeddings = std::move(classes.text);
    out.weights = std::move(classes.weights);

    const std::size_t n = in.frames.size();
    const std::size_t m = in.manifest.num_classes();
    if (uses_alignment(opts.method)) {
        out.logits = LogitMatrix(n, m);
        parallel_for(n, opts.threads, [&](std::size_t i) {
            const auto row = combine_terms(sample_terms(in.frames[i], out.class_embeddings, opts.cma), opts.betas);
            std::copy(row.values().begin(), row.values().end(), out.logits.row(i).begin());
        });
    } else {
        out.logits = compute_logits(pooled, out.class_embeddings);
    }

    out.report.value = score_metric(in.manifest, out.logits, out.predictions);
    return out;
}

TuneOutcome grid_search_betas(const EvalInputs& in, const BetaGrid& grid, const EvalOptions& base) {
    validate(grid);
    check_inputs(in);
    if (base.split.empty() || base.split == "unspecified") {
        throw Error(ErrorKind::InvalidArgument, "grid search needs the name of the split used for tuning");
    }

    EvalOptions opts = base;
    opts.method = Method::Pat;

    // The weighted ensemble and the three logit terms do not depend on the
    // betas, so they are computed once and recombined per pair.
    const EmbeddingMatrix pooled = pooled_audio(in.frames, opts.threads);
    const auto classes = build_class_embeddings(in, Method::Pat, pooled, opts.temperature, opts.threads);
    std::vector<CmaTerms> terms(in.frames.size());
    parallel_for(in.frames.size(), opts.threads,
                 [&](std::size_t i) { terms[i] = sample_terms(in.frames[i], classes.text, opts.cma); });

    TuneOutcome out;
    out.reports.resize(grid.pairs.size());
    parallel_for(grid.pairs.size(), opts.threads, [&](std::size_t g) {
        EvalOptions point = opts;
        point.betas = grid.pairs[g];
        LogitMatrix logits(terms.size(), in.manifest.num_classes());
        for (std::size_t i = 0; i < terms.size(); ++i) {
            const auto row = combine_terms(terms[i], point.betas);
            std::copy(row.values().begin(), row.values().end(), logits.row(i).begin());
        }
        std::vector<std::size_t> predictions;
        EvaluationReport r = base_report(in, point);
        r.value = score_metric(in.manifest, logits, predictions);
        out.reports[g] = std::move(r);
    });

    std::size_t best = 0;
    for (std::size_t g = 1; g < out.reports.size(); ++g) {
        if (out.reports[g].value > out.reports[best].value) best = g;
    }
    out.best = grid.pairs[best];
    out.best_report = out.reports[best];
    return out;
}

ConditionDelta compare_conditions(const EvaluationReport& baseline, const EvaluationReport& treated) {
    if (baseline.metric != treated.metric) {
        throw Error(ErrorKind::MetricMismatch, std::string(to_string(baseline.metric)) + " vs " +
                                                   std::string(to_string(treated.metric)));
    }
    if (baseline.dataset_name != treated.dataset_name) {
        throw Error(ErrorKind::DatasetMismatch, baseline.dataset_name + " vs " + treated.dataset_name);
    }
    return {baseline.dataset_name, baseline.metric, baseline.value, treated.value, treated.value - baseline.value};
}

std::vector<EmbeddingMatrix> load_text_banks(const PromptDatastore& ds, const std::filesystem::path& dir,
                                             std::size_t num_classes, std::size_t threads) {
    std::vector<EmbeddingMatrix> banks(ds.size());
    parallel_for(ds.size(), threads, [&](std::size_t p) {
        const auto& id = ds.prompts[p].id;
        const auto path = dir / (id + ".pate");
        if (!std::filesystem::is_regular_file(path)) {
            throw Error(ErrorKind::MissingEmbedding, "prompt " + id + ": no text bank at " + path.string());
        }
        auto bank = read_embedding_matrix(path);
        if (bank.rows() != num_classes) {
            throw Error(ErrorKind::DimensionMismatch, "prompt " + id + ": bank has " + std::to_string(bank.rows()) +
                                                          " rows, expected " + std::to_string(num_classes));
        }
        banks[p] = l2_normalize_rows(bank);
    });
    return banks;
}

} // namespace pat
