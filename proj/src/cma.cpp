#include "pat/cma.hpp"

#include <cmath>

#include "pat/diagnostics.hpp"
#include "pat/kernels.hpp"

namespace pat {
namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorKind::DimensionMismatch, what);
}

std::string shape(std::size_t r, std::size_t c) { return std::to_string(r) + "x" + std::to_string(c); }

EmbeddingMatrix normalized_row(std::span<const double> v, const char* what) {
    EmbeddingMatrix out(1, v.size());
    if (!normalize_into(v, out.row(0))) warn(std::string(what) + ": zero vector");
    return out;
}

std::vector<double> logits_row(const EmbeddingMatrix& a, const EmbeddingMatrix& classes) {
    std::vector<double> out(classes.rows());
    gemm_nt(a.values(), 1, classes.values(), classes.rows(), classes.cols(), out);
    return out;
}

} // namespace

void validate(const BetaPair& b) {
    if (!std::isfinite(b.beta_audio) || !std::isfinite(b.beta_text) || b.beta_audio < 0.0 || b.beta_text < 0.0) {
        throw Error(ErrorKind::InvalidArgument, "betas must be finite and >= 0");
    }
}

AttentionMap attention_map(const FrameEmbeddings& frames, const EmbeddingMatrix& classes) {
    require(frames.cols() == classes.cols(),
            "frame dim " + std::to_string(frames.cols()) + " != class dim " + std::to_string(classes.cols()));
    AttentionMap c(frames.rows(), classes.rows());
    gemm_nt(frames.values(), frames.rows(), classes.values(), classes.rows(), classes.cols(), c.values());
    return c;
}

DenseMatrix project_frames_onto_classes(const AttentionMap& c_map, const EmbeddingMatrix& classes,
                                        const CmaOptions& opts) {
    require(c_map.cols() == classes.rows(),
            "attention map " + shape(c_map.rows(), c_map.cols()) + " vs " + std::to_string(classes.rows()) + " classes");
    const std::size_t m = classes.rows();
    const std::size_t d = classes.cols();
    DenseMatrix out(c_map.rows(), d);
    std::vector<double> scaled(m), w(m);
    for (std::size_t i = 0; i < c_map.rows(); ++i) {
        for (std::size_t j = 0; j < m; ++j) scaled[j] = opts.attention_scale * c_map(i, j);
        softmax(scaled, w);
        auto dst = out.row(i);
        for (std::size_t j = 0; j < m; ++j) {
            auto cls = classes.row(j);
            for (std::size_t k = 0; k < d; ++k) dst[k] += w[j] * cls[k];
        }
    }
    return out;
}

EmbeddingMatrix audio_guided(const AttentionMap& c_map, const EmbeddingMatrix& classes, const CmaOptions& opts) {
    const DenseMatrix per_frame = project_frames_onto_classes(c_map, classes, opts);
    std::vector<double> pooled(per_frame.cols(), 0.0);
    for (std::size_t i = 0; i < per_frame.rows(); ++i) {
        auto r = per_frame.row(i);
        for (std::size_t k = 0; k < pooled.size(); ++k) pooled[k] += r[k];
    }
    const double inv = 1.0 / static_cast<double>(per_frame.rows());
    for (double& v : pooled) v *= inv;
    return normalized_row(pooled, "audio_guided");
}

DenseMatrix project_classes_onto_frames(const AttentionMap& c_map, const FrameEmbeddings& frames,
                                        const CmaOptions& opts) {
    require(c_map.rows() == frames.rows(),
            "attention map " + shape(c_map.rows(), c_map.cols()) + " vs " + std::to_string(frames.rows()) + " frames");
    const std::size_t c = frames.rows();
    const std::size_t d = frames.cols();
    DenseMatrix out(c_map.cols(), d);
    std::vector<double> scaled(c), w(c);
    for (std::size_t j = 0; j < c_map.cols(); ++j) {
        for (std::size_t i = 0; i < c; ++i) scaled[i] = opts.attention_scale * c_map(i, j);
        softmax(scaled, w);
        auto dst = out.row(j);
        for (std::size_t i = 0; i < c; ++i) {
            auto fr = frames.row(i);
            for (std::size_t k = 0; k < d; ++k) dst[k] += w[i] * fr[k];
        }
    }
    return out;
}

EmbeddingMatrix text_guided(const AttentionMap& c_map, const FrameEmbeddings& frames, const CmaOptions& opts) {
    const DenseMatrix raw = project_classes_onto_frames(c_map, frames, opts);
    EmbeddingMatrix out(raw.rows(), raw.cols());
    std::size_t zeros = 0;
    for (std::size_t j = 0; j < raw.rows(); ++j) {
        if (!normalize_into(raw.row(j), out.row(j))) ++zeros;
    }
    if (zeros > 0) warn("text_guided: " + std::to_string(zeros) + " zero class row(s)");
    return out;
}

EmbeddingMatrix pool_frames(const FrameEmbeddings& frames) {
    std::vector<double> mean(frames.cols(), 0.0);
    for (std::size_t i = 0; i < frames.rows(); ++i) {
        auto r = frames.row(i);
        for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += r[k];
    }
    const double inv = 1.0 / static_cast<double>(frames.rows());
    for (double& v : mean) v *= inv;
    return normalized_row(mean, "pool_frames");
}

CmaTerms logit_terms(const EmbeddingMatrix& a_pooled, const EmbeddingMatrix& classes, const EmbeddingMatrix& a_tilde,
                     const EmbeddingMatrix& t_tilde) {
    const std::size_t d = classes.cols();
    require(a_pooled.rows() == 1 && a_pooled.cols() == d, "pooled audio must be 1x" + std::to_string(d));
    require(a_tilde.rows() == 1 && a_tilde.cols() == d, "audio-guided embedding must be 1x" + std::to_string(d));
    require(t_tilde.rows() == classes.rows() && t_tilde.cols() == d,
            "text-guided bank " + shape(t_tilde.rows(), t_tilde.cols()) + " vs classes " +
                shape(classes.rows(), classes.cols()));
    return {logits_row(a_pooled, classes), logits_row(a_tilde, classes), logits_row(a_pooled, t_tilde)};
}

LogitMatrix combine_terms(const CmaTerms& t, const BetaPair& betas) {
    require(t.audio.size() == t.pred.size() && t.text.size() == t.pred.size(), "logit terms differ in length");
    LogitMatrix out(1, t.pred.size());
    for (std::size_t j = 0; j < t.pred.size(); ++j) {
        out(0, j) = t.pred[j] + betas.beta_audio * t.audio[j] + betas.beta_text * t.text[j];
    }
    return out;
}

LogitMatrix combined_logits(const EmbeddingMatrix& a_pooled, const EmbeddingMatrix& classes,
                            const EmbeddingMatrix& a_tilde, const EmbeddingMatrix& t_tilde, const BetaPair& betas) {
    return combine_terms(logit_terms(a_pooled, classes, a_tilde, t_tilde), betas);
}

CmaTerms sample_terms(const FrameEmbeddings& frames, const EmbeddingMatrix& classes, const CmaOptions& opts) {
    require(frames.rows() >= 1, "sample has no frames");
    const EmbeddingMatrix a_pooled = pool_frames(frames);
    const AttentionMap c_map = attention_map(frames, classes);
    const EmbeddingMatrix a_tilde = audio_guided(c_map, classes, opts);
    const EmbeddingMatrix t_tilde = text_guided(c_map, frames, opts);
    return logit_terms(a_pooled, classes, a_tilde, t_tilde);
}

std::size_t argmax(std::span<const double> row) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < row.size(); ++j) {
        if (row[j] > row[best]) best = j;
    }
    return best;
}

Classification classify_sample(const FrameEmbeddings& frames, const EmbeddingMatrix& classes, const BetaPair& betas,
                               const CmaOptions& opts) {
    validate(betas);
    Classification out;
    out.logits = combine_terms(sample_terms(frames, classes, opts), betas);
    out.predicted = argmax(out.logits.row(0));
    return out;
}

} // namespace pat
