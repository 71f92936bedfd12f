#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pat/matrix.hpp"

namespace pat {

/// Per-prompt relevance weights from the weighted prompt ensemble.
struct PromptWeights {
    std::vector<std::string> prompt_ids;
    /// Cumulative max-logit score of each prompt over the evaluation set.
    std::vector<double> scores;
    /// softmax(scores / temperature); nonnegative, sums to 1.
    std::vector<double> weights;
    double temperature = 1.0;
};

struct EnsembleResult {
    PromptWeights weights;
    /// Ensembled class embeddings (M x d), rows re-normalized.
    EmbeddingMatrix text;
};

/// Cosine logits between unit-norm audio rows (N_s x d) and class rows (M x d).
/// Rows must have unit norm within 1e-3 or be all-zero.
LogitMatrix compute_logits(const EmbeddingMatrix& audio, const EmbeddingMatrix& text);

/// Sum over samples of the row maximum, accumulated in float64 in sample order.
double prompt_score(const LogitMatrix& logits);

/// softmax(scores / temperature). Temperature must be positive and finite.
std::vector<double> softmax_weights(std::span<const double> scores, double temperature);

/// Pre-normalization mixture sum_p weights[p] * banks[p], in float64.
DenseMatrix mix_banks(std::span<const EmbeddingMatrix> banks, std::span<const double> weights);

/// Scores every prompt bank against the pooled audio, softmax-normalizes the
/// scores and returns the weighted mixture of banks with unit rows.
///
/// Scoring is transductive: `audio` should hold every (unlabeled) sample of
/// the evaluation set. `prompt_ids` defaults to "0", "1", ... when empty.
/// Prompts are scored in parallel on up to `threads` workers; the result does
/// not depend on the thread count.
EnsembleResult weighted_prompt_ensemble(std::span<const EmbeddingMatrix> banks, const EmbeddingMatrix& audio,
                                        double temperature = 1.0, std::span<const std::string> prompt_ids = {},
                                        std::size_t threads = 1);

/// Plain mean of the banks with unit rows. All-zero results are kept and reported.
EmbeddingMatrix uniform_prompt_ensemble(std::span<const EmbeddingMatrix> banks);

/// Incremental form of the prompt scores for audio that arrives in blocks.
/// Per-sample contributions are added in arrival order, so feeding the
/// samples in the same order as a batch call reproduces the batch scores
/// exactly. The banks must outlive the accumulator.
class PromptScoreAccumulator {
public:
    explicit PromptScoreAccumulator(std::span<const EmbeddingMatrix> banks,
                                    std::vector<std::string> prompt_ids = {});

    void add(const EmbeddingMatrix& audio_block);

    std::size_t samples_seen() const noexcept { return samples_; }
    const std::vector<double>& scores() const noexcept { return scores_; }

    EnsembleResult finish(double temperature = 1.0) const;

private:
    std::span<const EmbeddingMatrix> banks_;
    std::vector<std::string> ids_;
    std::vector<double> scores_;
    std::size_t samples_ = 0;
};

/// Returns indices of `weights` ordered by descending weight, ties by position.
std::vector<std::size_t> rank_by_weight(const PromptWeights& w);

} // namespace pat
