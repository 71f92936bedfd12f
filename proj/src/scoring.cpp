#include "pat/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pat/diagnostics.hpp"
#include "pat/kernels.hpp"
#include "pat/parallel.hpp"

namespace pat {
namespace {

void check_bank_shapes(std::span<const EmbeddingMatrix> banks) {
    if (banks.empty()) throw Error(ErrorKind::DimensionMismatch, "no prompt banks");
    const auto& first = banks.front();
    for (std::size_t p = 1; p < banks.size(); ++p) {
        if (banks[p].rows() != first.rows() || banks[p].cols() != first.cols()) {
            throw Error(ErrorKind::DimensionMismatch,
                        "bank " + std::to_string(p) + " is " + std::to_string(banks[p].rows()) + "x" +
                            std::to_string(banks[p].cols()) + ", expected " + std::to_string(first.rows()) + "x" +
                            std::to_string(first.cols()));
        }
    }
}

void check_unit_rows(const EmbeddingMatrix& m, const char* what) {
    if (!rows_are_unit_or_zero(m.values(), m.rows(), m.cols())) {
        throw Error(ErrorKind::NotNormalized, std::string(what) + " rows are not unit-norm");
    }
}

void check_audio(const EmbeddingMatrix& audio, std::size_t dim) {
    if (audio.rows() == 0) throw Error(ErrorKind::DimensionMismatch, "no audio samples");
    if (audio.cols() != dim) {
        throw Error(ErrorKind::DimensionMismatch, "audio dim " + std::to_string(audio.cols()) +
                                                      " != text dim " + std::to_string(dim));
    }
}

// Adds each sample's best logit to `total`, in sample order.
void accumulate_max_logits(const EmbeddingMatrix& audio, const EmbeddingMatrix& text, std::vector<double>& scratch,
                           double& total) {
    constexpr std::size_t block = 256;
    const std::size_t n = audio.rows();
    const std::size_t m = text.rows();
    const std::size_t d = text.cols();
    scratch.resize(block * m);
    for (std::size_t start = 0; start < n; start += block) {
        const std::size_t len = std::min(block, n - start);
        gemm_nt(audio.values().subspan(start * d, len * d), len, text.values(), m, d,
                std::span<double>(scratch).first(len * m));
        for (std::size_t i = 0; i < len; ++i) {
            const double* row = scratch.data() + i * m;
            total += *std::max_element(row, row + m);
        }
    }
}

std::vector<std::string> default_ids(std::size_t n, std::span<const std::string> given) {
    if (!given.empty()) {
        if (given.size() != n) {
            throw Error(ErrorKind::DimensionMismatch, std::to_string(given.size()) + " prompt ids for " +
                                                          std::to_string(n) + " banks");
        }
        return {given.begin(), given.end()};
    }
    std::vector<std::string> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = std::to_string(i);
    return ids;
}

EmbeddingMatrix normalized_mixture(std::span<const EmbeddingMatrix> banks, std::span<const double> weights,
                                   const char* what) {
    const DenseMatrix mix = mix_banks(banks, weights);
    EmbeddingMatrix out(mix.rows(), mix.cols());
    std::size_t zeros = 0;
    for (std::size_t j = 0; j < mix.rows(); ++j) {
        if (!normalize_into(mix.row(j), out.row(j))) ++zeros;
    }
    if (zeros > 0) warn(std::string(what) + ": " + std::to_string(zeros) + " class row(s) cancelled to zero");
    return out;
}

} // namespace

LogitMatrix compute_logits(const EmbeddingMatrix& audio, const EmbeddingMatrix& text) {
    if (audio.cols() != text.cols()) {
        throw Error(ErrorKind::DimensionMismatch, "audio dim " + std::to_string(audio.cols()) + " != text dim " +
                                                      std::to_string(text.cols()));
    }
    check_unit_rows(audio, "audio");
    check_unit_rows(text, "text");
    LogitMatrix out(audio.rows(), text.rows());
    gemm_nt(audio.values(), audio.rows(), text.values(), text.rows(), text.cols(), out.values());
    return out;
}

double prompt_score(const LogitMatrix& logits) {
    double total = 0.0;
    for (std::size_t i = 0; i < logits.rows(); ++i) {
        auto row = logits.row(i);
        total += *std::max_element(row.begin(), row.end());
    }
    return total;
}

std::vector<double> softmax_weights(std::span<const double> scores, double temperature) {
    if (!(temperature > 0.0) || !std::isfinite(temperature)) {
        throw Error(ErrorKind::InvalidArgument, "temperature must be positive and finite");
    }
    std::vector<double> scaled(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) scaled[i] = scores[i] / temperature;
    std::vector<double> w(scores.size());
    softmax(scaled, w);
    return w;
}

DenseMatrix mix_banks(std::span<const EmbeddingMatrix> banks, std::span<const double> weights) {
    check_bank_shapes(banks);
    if (weights.size() != banks.size()) {
        throw Error(ErrorKind::DimensionMismatch, "weight count != bank count");
    }
    DenseMatrix out(banks.front().rows(), banks.front().cols());
    auto acc = out.values();
    for (std::size_t p = 0; p < banks.size(); ++p) {
        const double w = weights[p];
        auto src = banks[p].values();
        for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += w * src[k];
    }
    return out;
}

EnsembleResult weighted_prompt_ensemble(std::span<const EmbeddingMatrix> banks, const EmbeddingMatrix& audio,
                                        double temperature, std::span<const std::string> prompt_ids,
                                        std::size_t threads) {
    check_bank_shapes(banks);
    check_audio(audio, banks.front().cols());
    check_unit_rows(audio, "audio");
    for (const auto& b : banks) check_unit_rows(b, "text bank");

    PromptWeights pw;
    pw.prompt_ids = default_ids(banks.size(), prompt_ids);
    pw.temperature = temperature;
    pw.scores.assign(banks.size(), 0.0);
    parallel_for(banks.size(), threads, [&](std::size_t p) {
        std::vector<double> scratch;
        accumulate_max_logits(audio, banks[p], scratch, pw.scores[p]);
    });
    pw.weights = softmax_weights(pw.scores, temperature);

    EmbeddingMatrix text = normalized_mixture(banks, pw.weights, "weighted_prompt_ensemble");
    return {std::move(pw), std::move(text)};
}

EmbeddingMatrix uniform_prompt_ensemble(std::span<const EmbeddingMatrix> banks) {
    check_bank_shapes(banks);
    const std::vector<double> weights(banks.size(), 1.0 / static_cast<double>(banks.size()));
    return normalized_mixture(banks, weights, "uniform_prompt_ensemble");
}

PromptScoreAccumulator::PromptScoreAccumulator(std::span<const EmbeddingMatrix> banks,
                                               std::vector<std::string> prompt_ids)
    : banks_(banks) {
    check_bank_shapes(banks_);
    for (const auto& b : banks_) check_unit_rows(b, "text bank");
    ids_ = default_ids(banks_.size(), prompt_ids);
    scores_.assign(banks_.size(), 0.0);
}

void PromptScoreAccumulator::add(const EmbeddingMatrix& audio_block) {
    if (audio_block.rows() == 0) return;
    check_audio(audio_block, banks_.front().cols());
    check_unit_rows(audio_block, "audio");
    std::vector<double> scratch;
    for (std::size_t p = 0; p < banks_.size(); ++p) accumulate_max_logits(audio_block, banks_[p], scratch, scores_[p]);
    samples_ += audio_block.rows();
}

EnsembleResult PromptScoreAccumulator::finish(double temperature) const {
    if (samples_ == 0) throw Error(ErrorKind::DimensionMismatch, "no audio samples accumulated");
    PromptWeights pw;
    pw.prompt_ids = ids_;
    pw.scores = scores_;
    pw.temperature = temperature;
    pw.weights = softmax_weights(pw.scores, temperature);
    EmbeddingMatrix text = normalized_mixture(banks_, pw.weights, "weighted_prompt_ensemble");
    return {std::move(pw), std::move(text)};
}

std::vector<std::size_t> rank_by_weight(const PromptWeights& w) {
    std::vector<std::size_t> order(w.weights.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return w.weights[a] > w.weights[b]; });
    return order;
}

} // namespace pat
