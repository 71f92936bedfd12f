#include <gtest/gtest.h>

#include <limits>

#include <cmath>
#include <numeric>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "pat/diagnostics.hpp"
#include "pat/error.hpp"
#include "pat/scoring.hpp"

using namespace pat;

namespace {

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error";
    return ErrorKind::Io;
}

// Audio e1, e2 in 3-d. Bank 0 has max logits 0.6 and 0.8 (score 1.4); bank 1
// has 0.2 and 0.2 (score 0.4).
struct TwoScoreFixture {
    EmbeddingMatrix audio = fixtures::rows({{1, 0, 0}, {0, 1, 0}});
    std::vector<EmbeddingMatrix> banks;
    TwoScoreFixture() {
        const float z = static_cast<float>(std::sqrt(0.92));
        banks.push_back(fixtures::rows({{0.6f, 0.8f, 0}, {-0.6f, -0.8f, 0}}));
        banks.push_back(fixtures::rows({{0.2f, 0.2f, z}, {-0.2f, -0.2f, -z}}));
    }
};

std::vector<oracle::Mat> to_mats(const std::vector<EmbeddingMatrix>& banks) {
    std::vector<oracle::Mat> out;
    for (const auto& b : banks) out.push_back(oracle::to_mat(b));
    return out;
}

} // namespace

TEST(Logits, HandExamples) {
    const auto text = fixtures::rows({{1, 0}, {0, 1}});
    auto l = compute_logits(fixtures::rows({{1, 0}}), text);
    EXPECT_EQ(l(0, 0), 1.0);
    EXPECT_EQ(l(0, 1), 0.0);

    l = compute_logits(fixtures::rows({{0.6f, 0.8f}}), text);
    EXPECT_NEAR(l(0, 0), 0.6, 1e-7);
    EXPECT_NEAR(l(0, 1), 0.8, 1e-7);

    std::mt19937_64 rng(1);
    const auto t = fixtures::random_unit(rng, 4, 9);
    const auto self = compute_logits(EmbeddingMatrix(1, 9, std::vector<float>(t.row(2).begin(), t.row(2).end())), t);
    EXPECT_NEAR(self(0, 2), 1.0, 1e-6);
}

TEST(Logits, Errors) {
    const auto text = fixtures::rows({{1, 0}, {0, 1}});
    EXPECT_EQ(kind_of([&] { compute_logits(fixtures::rows({{1, 0, 0}}), text); }), ErrorKind::DimensionMismatch);
    EXPECT_EQ(kind_of([&] { compute_logits(fixtures::rows({{3, 4}}), text); }), ErrorKind::NotNormalized);
    EXPECT_EQ(kind_of([&] { compute_logits(fixtures::rows({{1, 0}}), fixtures::rows({{2, 0}})); }),
              ErrorKind::NotNormalized);
    // Zero rows are allowed.
    EXPECT_NO_THROW(compute_logits(fixtures::rows({{0, 0}}), text));
}

TEST(PromptScore, HandExamples) {
    EXPECT_DOUBLE_EQ(prompt_score(LogitMatrix(2, 2, {0.5, 0.2, 0.1, 0.9})), 1.4);
    EXPECT_DOUBLE_EQ(prompt_score(LogitMatrix(1, 3, {0.3, 0.3, 0.3})), 0.3);
    EXPECT_DOUBLE_EQ(prompt_score(LogitMatrix(3, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1})), 3.0);
}

TEST(PromptScore, MonotoneInEveryEntry) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> v(12);
        for (auto& x : v) x = u(rng);
        const LogitMatrix base(4, 3, v);
        const double s0 = prompt_score(base);
        for (std::size_t k = 0; k < v.size(); ++k) {
            auto w = v;
            w[k] += std::abs(u(rng));
            EXPECT_GE(prompt_score(LogitMatrix(4, 3, w)), s0);
        }
    }
}

TEST(Softmax, HandExample) {
    const std::vector<double> s = {1.4, 0.4};
    const auto w = softmax_weights(s, 1.0);
    EXPECT_NEAR(w[0], 0.7311, 1e-4);
    EXPECT_NEAR(w[1], 0.2689, 1e-4);
    EXPECT_NEAR(w[0], 1.0 / (1.0 + std::exp(-1.0)), 1e-15);
}

TEST(Softmax, ShiftInvariance) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-20, 20);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> s(1 + trial % 9);
        for (auto& x : s) x = u(rng);
        const auto w = softmax_weights(s, 1.0);
        for (double c : {-500.0, -3.0, 0.25, 1e3}) {
            auto t = s;
            for (auto& x : t) x += c;
            const auto v = softmax_weights(t, 1.0);
            for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(v[i], w[i], 1e-6);
        }
    }
}

TEST(Softmax, TemperatureLimits) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = fixtures::uniform(rng, 2, 8);
        const auto audio = fixtures::random_unit(rng, fixtures::uniform(rng, 3, 20), 6);
        std::vector<EmbeddingMatrix> banks;
        for (std::size_t p = 0; p < n; ++p) banks.push_back(fixtures::random_unit(rng, 4, 6));

        const auto cold = weighted_prompt_ensemble(banks, audio, 1e-3).weights;
        std::vector<double> sorted = cold.scores;
        std::sort(sorted.rbegin(), sorted.rend());
        if (sorted[0] - sorted[1] > 0.01) {
            const auto best = std::max_element(cold.scores.begin(), cold.scores.end()) - cold.scores.begin();
            EXPECT_GT(cold.weights[static_cast<std::size_t>(best)], 0.999);
        }

        const auto hot = weighted_prompt_ensemble(banks, audio, 1e3).weights;
        for (double w : hot.weights) EXPECT_NEAR(w * static_cast<double>(n), 1.0, 0.05);
    }
}

TEST(Softmax, RejectsBadTemperature) {
    const std::vector<double> s = {1.0, 2.0};
    for (double t : {0.0, -1.0, std::nan(""), std::numeric_limits<double>::infinity()}) {
        EXPECT_EQ(kind_of([&] { softmax_weights(s, t); }), ErrorKind::InvalidArgument);
    }
}

TEST(Wpe, SinglePrompt) {
    const auto bank = fixtures::rows({{3, 4}, {0, 2}});
    const std::vector<EmbeddingMatrix> banks = {l2_normalize_rows(bank)};
    const auto r = weighted_prompt_ensemble(banks, fixtures::rows({{1, 0}}));
    ASSERT_EQ(r.weights.weights.size(), 1u);
    EXPECT_EQ(r.weights.weights[0], 1.0);
    EXPECT_EQ(r.weights.prompt_ids[0], "0");
    EXPECT_FLOAT_EQ(r.text(0, 0), 0.6f);
    EXPECT_FLOAT_EQ(r.text(1, 1), 1.0f);
}

TEST(Wpe, IdenticalBanksSplitEvenly) {
    std::mt19937_64 rng(6);
    const auto b = fixtures::random_unit(rng, 3, 5);
    const std::vector<EmbeddingMatrix> banks = {b, b};
    const auto r = weighted_prompt_ensemble(banks, fixtures::random_unit(rng, 7, 5));
    EXPECT_DOUBLE_EQ(r.weights.weights[0], 0.5);
    EXPECT_DOUBLE_EQ(r.weights.weights[1], 0.5);
}

TEST(Wpe, ScoresOfOnePointFourAndZeroPointFour) {
    TwoScoreFixture f;
    const std::vector<std::string> ids = {"loud", "quiet"};
    const auto r = weighted_prompt_ensemble(f.banks, f.audio, 1.0, ids);
    EXPECT_NEAR(r.weights.scores[0], 1.4, 1e-6);
    EXPECT_NEAR(r.weights.scores[1], 0.4, 1e-6);
    EXPECT_NEAR(r.weights.weights[0], 0.7311, 1e-4);
    EXPECT_NEAR(r.weights.weights[1], 0.2689, 1e-4);
    EXPECT_EQ(r.weights.prompt_ids, ids);
}

TEST(Wpe, MatchesOracle) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = fixtures::uniform(rng, 1, 10), m = fixtures::uniform(rng, 1, 5),
                          d = fixtures::uniform(rng, 2, 8), ns = fixtures::uniform(rng, 1, 20);
        std::vector<EmbeddingMatrix> banks;
        for (std::size_t p = 0; p < n; ++p) banks.push_back(fixtures::random_unit(rng, m, d));
        const auto audio = fixtures::random_unit(rng, ns, d);
        const auto r = weighted_prompt_ensemble(banks, audio, 1.0);
        const auto o = oracle::weighted_ensemble(to_mats(banks), oracle::to_mat(audio), 1.0);
        EXPECT_LE(oracle::max_abs_diff(r.weights.weights, o.weights), 1e-5);
        EXPECT_LE(oracle::max_abs_diff(oracle::to_mat(r.text), o.t_avg), 1e-5);
    }
}

TEST(Wpe, PermutingPromptsPermutesWeights) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = fixtures::uniform(rng, 2, 8);
        std::vector<EmbeddingMatrix> banks;
        for (std::size_t p = 0; p < n; ++p) banks.push_back(fixtures::random_unit(rng, 3, 6));
        const auto audio = fixtures::random_unit(rng, 10, 6);
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<EmbeddingMatrix> shuffled;
        for (auto i : perm) shuffled.push_back(banks[i]);

        const auto a = weighted_prompt_ensemble(banks, audio);
        const auto b = weighted_prompt_ensemble(shuffled, audio);
        for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(b.weights.weights[k], a.weights.weights[perm[k]], 1e-6);
        EXPECT_LE(oracle::max_abs_diff(oracle::to_mat(a.text), oracle::to_mat(b.text)), 1e-6);
    }
}

TEST(Wpe, MixtureRowsLieInConvexHull) {
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = fixtures::uniform(rng, 1, 4), d = fixtures::uniform(rng, 3, 6);
        std::vector<EmbeddingMatrix> banks;
        for (std::size_t p = 0; p < n; ++p) banks.push_back(fixtures::random_unit(rng, 3, d));
        const auto audio = fixtures::random_unit(rng, 5, d);
        const auto w = weighted_prompt_ensemble(banks, audio).weights;
        const auto mixed = oracle::to_mat(mix_banks(banks, w.weights));
        for (std::size_t j = 0; j < 3; ++j) {
            oracle::Mat points;
            for (const auto& b : banks) points.push_back(oracle::to_mat(b)[j]);
            EXPECT_TRUE(oracle::in_convex_hull(mixed[j], points)) << trial << " row " << j;
        }
    }
}

TEST(Wpe, ParallelScoringMatchesSequential) {
    std::mt19937_64 rng(12);
    std::vector<EmbeddingMatrix> banks;
    for (int p = 0; p < 9; ++p) banks.push_back(fixtures::random_unit(rng, 6, 16));
    const auto audio = fixtures::random_unit(rng, 700, 16);
    const auto seq = weighted_prompt_ensemble(banks, audio, 1.0, {}, 1);
    const auto par = weighted_prompt_ensemble(banks, audio, 1.0, {}, 4);
    EXPECT_EQ(seq.weights.scores, par.weights.scores);
    EXPECT_EQ(seq.text, par.text);
}

TEST(Wpe, ErrorsOnShapeMismatch) {
    std::mt19937_64 rng(13);
    const auto audio = fixtures::random_unit(rng, 3, 4);
    std::vector<EmbeddingMatrix> banks = {fixtures::random_unit(rng, 2, 4), fixtures::random_unit(rng, 3, 4)};
    EXPECT_EQ(kind_of([&] { weighted_prompt_ensemble(banks, audio); }), ErrorKind::DimensionMismatch);
    banks = {fixtures::random_unit(rng, 2, 5)};
    EXPECT_EQ(kind_of([&] { weighted_prompt_ensemble(banks, audio); }), ErrorKind::DimensionMismatch);
    EXPECT_EQ(kind_of([&] { weighted_prompt_ensemble(std::vector<EmbeddingMatrix>{}, audio); }),
              ErrorKind::DimensionMismatch);
}

TEST(Uniform, SingleBankAndCancellation) {
    const std::vector<EmbeddingMatrix> one = {fixtures::rows({{3, 4}, {1, 0}})};
    const auto u = uniform_prompt_ensemble(one);
    EXPECT_FLOAT_EQ(u(0, 0), 0.6f);
    EXPECT_FLOAT_EQ(u(0, 1), 0.8f);

    ScopedWarningCapture warnings;
    const std::vector<EmbeddingMatrix> opposite = {fixtures::rows({{0.6f, 0.8f}, {1, 0}}),
                                                   fixtures::rows({{-0.6f, -0.8f}, {0, 1}})};
    const auto c = uniform_prompt_ensemble(opposite);
    EXPECT_EQ(c(0, 0), 0.0f);
    EXPECT_EQ(c(0, 1), 0.0f);
    EXPECT_NEAR(c(1, 0), std::sqrt(0.5), 1e-6);
    EXPECT_EQ(warnings.messages().size(), 1u);
}

TEST(Uniform, EqualsWeightedWhenScoresTie) {
    // Row permutations of one bank all have the same prompt score.
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t m = fixtures::uniform(rng, 2, 5), n = fixtures::uniform(rng, 2, 6);
        const auto base = fixtures::random_unit(rng, m, 7);
        std::vector<EmbeddingMatrix> banks;
        for (std::size_t p = 0; p < n; ++p) {
            std::vector<std::size_t> perm(m);
            std::iota(perm.begin(), perm.end(), 0);
            std::shuffle(perm.begin(), perm.end(), rng);
            std::vector<float> data;
            for (auto i : perm) data.insert(data.end(), base.row(i).begin(), base.row(i).end());
            banks.emplace_back(m, 7, std::move(data));
        }
        const auto audio = fixtures::random_unit(rng, 9, 7);
        const auto w = weighted_prompt_ensemble(banks, audio);
        for (double x : w.weights.weights) ASSERT_NEAR(x, 1.0 / static_cast<double>(n), 1e-12);
        const auto u = uniform_prompt_ensemble(banks);
        EXPECT_LE(oracle::max_abs_diff(oracle::to_mat(u), oracle::to_mat(w.text)), 1e-6);
        EXPECT_LE(oracle::max_abs_diff(oracle::to_mat(u), oracle::uniform_ensemble(to_mats(banks))), 1e-6);
    }
}

TEST(Streaming, MatchesBatchExactly) {
    std::mt19937_64 rng(15);
    std::vector<EmbeddingMatrix> banks;
    for (int p = 0; p < 5; ++p) banks.push_back(fixtures::random_unit(rng, 4, 8));
    const auto audio = fixtures::random_unit(rng, 37, 8);
    const auto batch = weighted_prompt_ensemble(banks, audio, 0.5);

    PromptScoreAccumulator acc(banks);
    std::size_t start = 0;
    for (std::size_t block : {1, 5, 10, 21}) {
        std::vector<float> rows(audio.values().begin() + static_cast<std::ptrdiff_t>(start * 8),
                                audio.values().begin() + static_cast<std::ptrdiff_t>((start + block) * 8));
        acc.add(EmbeddingMatrix(block, 8, std::move(rows)));
        start += block;
    }
    ASSERT_EQ(acc.samples_seen(), 37u);
    EXPECT_EQ(acc.scores(), batch.weights.scores);
    const auto streamed = acc.finish(0.5);
    EXPECT_EQ(streamed.weights.weights, batch.weights.weights);
    EXPECT_EQ(streamed.text, batch.text);

    PromptScoreAccumulator empty(banks);
    EXPECT_THROW(empty.finish(), Error);
}

TEST(Ranking, DescendingWithStableTies) {
    PromptWeights w;
    w.prompt_ids = {"a", "b", "c", "d"};
    w.weights = {0.2, 0.4, 0.2, 0.2};
    EXPECT_EQ(rank_by_weight(w), (std::vector<std::size_t>{1, 0, 2, 3}));
}
