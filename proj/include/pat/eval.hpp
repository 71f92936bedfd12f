#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pat/cma.hpp"
#include "pat/datastore.hpp"
#include "pat/manifest.hpp"
#include "pat/matrix.hpp"
#include "pat/scoring.hpp"

namespace pat {

enum class Method {
    ZeroShot,               // "zs": first prompt only
    PromptEnsemble,         // "pe": uniform mean over prompts
    WeightedPromptEnsemble, // "wpe": score-weighted mean over prompts
    PromptEnsembleCma,      // "pe+cma": uniform mean, then cross-modal alignment
    Pat,                    // "pat": weighted mean, then cross-modal alignment
};

std::string_view to_string(Method m);
/// Accepts "zs", "pe", "wpe", "pe+cma" (or "pe-cma") and "pat".
Method parse_method(std::string_view name);
bool uses_alignment(Method m) noexcept;
bool uses_weighted_ensemble(Method m) noexcept;

enum class MetricName { Accuracy, MeanAveragePrecision };

std::string_view to_string(MetricName m);
MetricName parse_metric(std::string_view name);
MetricName metric_for(TaskType task) noexcept;

struct EvaluationReport {
    std::string dataset_name;
    std::string condition = "clean";
    Method method = Method::ZeroShot;
    MetricName metric = MetricName::Accuracy;
    /// Percent, in [0, 100].
    double value = 0.0;
    BetaPair betas;
    double temperature = 1.0;
    std::optional<std::string> prompt_weights_ref;
    std::size_t n_samples = 0;
    std::size_t n_prompts = 0;
    std::string datastore_version;
    /// Name of the data split the run (or its tuning) used.
    std::string split = "unspecified";
    /// The pipeline is deterministic, so a single run is recorded.
    std::size_t runs = 1;

    friend bool operator==(const EvaluationReport&, const EvaluationReport&) = default;
};

struct BetaGrid {
    std::vector<BetaPair> pairs;
};

/// Nonempty, finite nonnegative pairs, no duplicates (DuplicatePair).
void validate(const BetaGrid& grid);

/// The five (audio, text) pairs of the published tuning table.
BetaGrid published_beta_grid();

/// Percentage of predictions equal to the single-label truth.
double accuracy(std::span<const std::size_t> predictions, const DatasetManifest& manifest);

/// Non-interpolated average precision of one class: mean over positives of
/// the precision at each positive's rank. Scores are ranked descending with
/// ties broken by sample order. Returns nullopt when there are no positives.
std::optional<double> average_precision(std::span<const double> scores, std::span<const std::uint8_t> positives);

/// Macro mean of per-class AP over classes with at least one positive, in
/// percent. Classes without positives are skipped with a warning; if none
/// remain, NoPositives is thrown.
double mean_average_precision(const LogitMatrix& scores, const DatasetManifest& manifest);

/// Everything evaluate_dataset reads. Frames and banks must already be row-normalized.
struct EvalInputs {
    const DatasetManifest& manifest;
    const PromptDatastore& datastore;
    std::span<const EmbeddingMatrix> text_banks;
    std::span<const FrameEmbeddings> frames;
};

struct EvalOptions {
    Method method = Method::Pat;
    BetaPair betas;
    double temperature = 1.0;
    std::string condition = "clean";
    std::string split = "unspecified";
    std::size_t threads = 1;
    CmaOptions cma;
};

struct EvalOutcome {
    EvaluationReport report;
    /// Present for the weighted-ensemble methods.
    std::optional<PromptWeights> weights;
    EmbeddingMatrix class_embeddings;
    LogitMatrix logits;
    std::vector<std::size_t> predictions;
};

EvalOutcome evaluate_dataset(const EvalInputs& in, const EvalOptions& opts);

struct TuneOutcome {
    BetaPair best;
    EvaluationReport best_report;
    /// One report per grid pair, in grid order.
    std::vector<EvaluationReport> reports;
};

/// Evaluates method "pat" at every grid pair and returns the best by metric,
/// earliest pair on ties. `base.split` must name the tuning split.
TuneOutcome grid_search_betas(const EvalInputs& in, const BetaGrid& grid, const EvalOptions& base);

struct ConditionDelta {
    std::string dataset_name;
    MetricName metric = MetricName::Accuracy;
    double baseline_value = 0.0;
    double treated_value = 0.0;
    /// treated - baseline, in percentage points.
    double delta = 0.0;
};

ConditionDelta compare_conditions(const EvaluationReport& baseline, const EvaluationReport& treated);

/// Loads one M x d bank per prompt from `<dir>/<prompt id>.pate`, row-normalized.
std::vector<EmbeddingMatrix> load_text_banks(const PromptDatastore& ds, const std::filesystem::path& dir,
                                             std::size_t num_classes, std::size_t threads = 1);

/// Pools and re-normalizes every sample's frames into one N_s x d matrix.
EmbeddingMatrix pooled_audio(std::span<const FrameEmbeddings> frames, std::size_t threads = 1);

} // namespace pat
