#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pat/matrix.hpp"

namespace pat {

/// Weights of the audio-guided and text-guided logit terms.
struct BetaPair {
    double beta_audio = 0.0;
    double beta_text = 0.0;

    friend bool operator==(const BetaPair&, const BetaPair&) = default;
};

/// Throws InvalidArgument unless both weights are finite and nonnegative.
void validate(const BetaPair& betas);

struct CmaOptions {
    /// Multiplies the attention map before both softmaxes. Diagnostic only;
    /// 1.0 feeds raw cosine correlations, which is the method as defined.
    double attention_scale = 1.0;
};

/// Frame/class correlations: C(i, j) = <frame_i, class_j>. Shape c x M.
AttentionMap attention_map(const FrameEmbeddings& frames, const EmbeddingMatrix& classes);

/// Per-frame audio-guided representations, softmax(C) * classes with the
/// softmax over classes for each frame. Shape c x d, before pooling.
DenseMatrix project_frames_onto_classes(const AttentionMap& c_map, const EmbeddingMatrix& classes,
                                        const CmaOptions& opts = {});

/// Audio-guided embedding: the projection above, mean-pooled over frames and
/// re-normalized. Shape 1 x d.
EmbeddingMatrix audio_guided(const AttentionMap& c_map, const EmbeddingMatrix& classes, const CmaOptions& opts = {});

/// Per-class text-guided representations, softmax(C^T) * frames with the
/// softmax over frames for each class. Shape M x d, before normalization.
DenseMatrix project_classes_onto_frames(const AttentionMap& c_map, const FrameEmbeddings& frames,
                                        const CmaOptions& opts = {});

/// Text-guided class embeddings with unit rows. Shape M x d.
EmbeddingMatrix text_guided(const AttentionMap& c_map, const FrameEmbeddings& frames, const CmaOptions& opts = {});

/// Mean of the frames, re-normalized. Shape 1 x d.
EmbeddingMatrix pool_frames(const FrameEmbeddings& frames);

/// The three logit rows that make up the combined prediction for one sample.
struct CmaTerms {
    std::vector<double> pred;  // pooled audio vs classes
    std::vector<double> audio; // audio-guided embedding vs classes
    std::vector<double> text;  // pooled audio vs text-guided classes
};

CmaTerms logit_terms(const EmbeddingMatrix& a_pooled, const EmbeddingMatrix& classes,
                     const EmbeddingMatrix& a_tilde, const EmbeddingMatrix& t_tilde);

/// pred + beta_audio * audio + beta_text * text, as a 1 x M row.
LogitMatrix combine_terms(const CmaTerms& terms, const BetaPair& betas);

LogitMatrix combined_logits(const EmbeddingMatrix& a_pooled, const EmbeddingMatrix& classes,
                            const EmbeddingMatrix& a_tilde, const EmbeddingMatrix& t_tilde, const BetaPair& betas);

/// Runs pooling, attention, both projections and the logit combination for
/// one sample and returns the logit terms (independent of the betas).
CmaTerms sample_terms(const FrameEmbeddings& frames, const EmbeddingMatrix& classes, const CmaOptions& opts = {});

struct Classification {
    LogitMatrix logits; // 1 x M
    std::size_t predicted = 0;
};

/// Index of the largest entry; the earliest index wins ties.
std::size_t argmax(std::span<const double> row);

/// Full per-sample pipeline. `frames` and `classes` must have unit (or zero) rows.
Classification classify_sample(const FrameEmbeddings& frames, const EmbeddingMatrix& classes, const BetaPair& betas,
                               const CmaOptions& opts = {});

} // namespace pat
