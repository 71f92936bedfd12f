#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "pat/datastore.hpp"
#include "pat/manifest.hpp"
#include "pat/matrix.hpp"

namespace pat {

// Clustered embedding fixtures for tests, benchmarks and demos. Each class has
// a random unit "center"; prompt banks perturb the centers, and each sample's
// frames perturb the center(s) of its true class(es).
struct SyntheticSpec {
    std::size_t samples = 20;
    std::size_t classes = 3;
    std::size_t prompts = 4;
    std::size_t dim = 8;
    std::size_t frames = 4;
    double frame_noise = 0.3;
    double prompt_noise = 0.3;
    TaskType task = TaskType::SingleLabel;
    std::uint64_t seed = 1;
};

struct SyntheticDataset {
    DatasetManifest manifest;
    PromptDatastore datastore;
    std::vector<EmbeddingMatrix> text_banks; // row-normalized
    std::vector<FrameEmbeddings> frames;     // row-normalized
};

SyntheticDataset make_synthetic(const SyntheticSpec& spec);

/// Writes manifest.json, datastore.json, embeddings/<sample id>.pate and
/// text_banks/<prompt id>.pate under `root`.
void write_synthetic(const SyntheticDataset& ds, const std::filesystem::path& root);

} // namespace pat
