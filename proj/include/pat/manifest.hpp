#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pat/matrix.hpp"

namespace pat {

enum class TaskType { SingleLabel, MultiLabel };

std::string_view to_string(TaskType task);

struct Sample {
    std::string id;
    /// Class index for single-label tasks, 0/1 vector of length M for multi-label.
    std::variant<std::size_t, std::vector<std::uint8_t>> truth;
    /// Path of the sample's frame embeddings, relative to the embeddings root.
    std::string embedding_ref;
};

struct DatasetManifest {
    std::string dataset_name;
    TaskType task = TaskType::SingleLabel;
    std::vector<std::string> labels;
    std::vector<Sample> samples;

    std::size_t num_classes() const noexcept { return labels.size(); }
};

/// Parses and validates a manifest JSON document.
/// Schema errors name the offending field path, e.g. "samples[3].truth".
DatasetManifest parse_manifest(std::string_view json_text);
DatasetManifest read_manifest(const std::filesystem::path& path);

/// Checks label uniqueness, M >= 2 and every sample's truth against M.
void validate_manifest(const DatasetManifest& manifest);

/// Loads every sample's frame embeddings (row-normalized) in manifest order.
/// A missing or unreadable file raises MissingEmbedding naming the sample id.
std::vector<FrameEmbeddings> load_sample_frames(const DatasetManifest& manifest,
                                                const std::filesystem::path& embeddings_root,
                                                std::size_t threads = 1);

} // namespace pat
