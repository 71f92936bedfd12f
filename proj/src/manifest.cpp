#include "pat/manifest.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "pat/parallel.hpp"
#include "pat/tensor_io.hpp"

namespace pat {
namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& field, const std::string& what) {
    throw Error(ErrorKind::SchemaError, field + ": " + what);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) schema_error(path + key, "missing");
    return *it;
}

std::string require_string(const json& obj, const std::string& key, const std::string& path) {
    const json& v = require(obj, key, path);
    if (!v.is_string()) schema_error(path + key, "expected a string");
    return v.get<std::string>();
}

} // namespace

std::string_view to_string(TaskType task) {
    return task == TaskType::SingleLabel ? "single_label" : "multi_label";
}

void validate_manifest(const DatasetManifest& m) {
    const std::size_t n_classes = m.labels.size();
    if (n_classes < 2) {
        throw Error(ErrorKind::SchemaError, "labels: need at least 2 classes, got " + std::to_string(n_classes));
    }
    std::unordered_set<std::string> seen;
    for (const auto& label : m.labels) {
        if (!seen.insert(label).second) throw Error(ErrorKind::DuplicateLabel, "\"" + label + "\"");
    }
    for (std::size_t i = 0; i < m.samples.size(); ++i) {
        const auto& s = m.samples[i];
        const std::string where = "samples[" + std::to_string(i) + "] (" + s.id + ")";
        if (m.task == TaskType::SingleLabel) {
            const auto* idx = std::get_if<std::size_t>(&s.truth);
            if (!idx) throw Error(ErrorKind::SchemaError, where + ".truth: expected a class index");
            if (*idx >= n_classes) {
                throw Error(ErrorKind::TruthOutOfRange,
                            where + ": index " + std::to_string(*idx) + " not in [0, " + std::to_string(n_classes) + ")");
            }
        } else {
            const auto* vec = std::get_if<std::vector<std::uint8_t>>(&s.truth);
            if (!vec) throw Error(ErrorKind::SchemaError, where + ".truth: expected a binary vector");
            if (vec->size() != n_classes) {
                throw Error(ErrorKind::TruthOutOfRange, where + ": truth vector length " + std::to_string(vec->size()) +
                                                            " != " + std::to_string(n_classes));
            }
        }
    }
}

DatasetManifest parse_manifest(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::SchemaError, std::string("<root>: ") + e.what());
    }
    if (!doc.is_object()) schema_error("<root>", "expected an object");

    DatasetManifest m;
    m.dataset_name = require_string(doc, "dataset_name", "");

    const std::string task = require_string(doc, "task", "");
    if (task == "single_label") {
        m.task = TaskType::SingleLabel;
    } else if (task == "multi_label") {
        m.task = TaskType::MultiLabel;
    } else {
        schema_error("task", "expected \"single_label\" or \"multi_label\", got \"" + task + "\"");
    }

    const json& labels = require(doc, "labels", "");
    if (!labels.is_array()) schema_error("labels", "expected an array");
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!labels[i].is_string()) schema_error("labels[" + std::to_string(i) + "]", "expected a string");
        m.labels.push_back(labels[i].get<std::string>());
    }

    const json& samples = require(doc, "samples", "");
    if (!samples.is_array()) schema_error("samples", "expected an array");
    m.samples.reserve(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const std::string path = "samples[" + std::to_string(i) + "].";
        const json& s = samples[i];
        if (!s.is_object()) schema_error("samples[" + std::to_string(i) + "]", "expected an object");

        Sample sample;
        sample.id = require_string(s, "id", path);
        sample.embedding_ref = require_string(s, "embedding_ref", path);
        const json& truth = require(s, "truth", path);
        if (truth.is_number_integer()) {
            const auto v = truth.get<std::int64_t>();
            if (v < 0) throw Error(ErrorKind::TruthOutOfRange, path + "truth: negative index " + std::to_string(v));
            sample.truth = static_cast<std::size_t>(v);
        } else if (truth.is_array()) {
            std::vector<std::uint8_t> bits;
            bits.reserve(truth.size());
            for (std::size_t j = 0; j < truth.size(); ++j) {
                const json& b = truth[j];
                if (!b.is_number_integer() || (b.get<std::int64_t>() != 0 && b.get<std::int64_t>() != 1)) {
                    schema_error(path + "truth[" + std::to_string(j) + "]", "expected 0 or 1");
                }
                bits.push_back(static_cast<std::uint8_t>(b.get<std::int64_t>()));
            }
            sample.truth = std::move(bits);
        } else {
            schema_error(path + "truth", "expected an integer or an array of 0/1");
        }
        m.samples.push_back(std::move(sample));
    }

    validate_manifest(m);
    return m;
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open manifest " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_manifest(buf.str());
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.detail());
    }
}

std::vector<FrameEmbeddings> load_sample_frames(const DatasetManifest& manifest,
                                                const std::filesystem::path& embeddings_root,
                                                std::size_t threads) {
    std::vector<FrameEmbeddings> frames(manifest.samples.size());
    parallel_for(manifest.samples.size(), threads, [&](std::size_t i) {
        const auto& s = manifest.samples[i];
        const auto path = embeddings_root / s.embedding_ref;
        if (!std::filesystem::is_regular_file(path)) {
            throw Error(ErrorKind::MissingEmbedding, "sample " + s.id + ": no file at " + path.string());
        }
        try {
            frames[i] = l2_normalize_rows(read_frame_embeddings(path));
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::Io) {
                throw Error(ErrorKind::MissingEmbedding, "sample " + s.id + ": " + e.detail());
            }
            throw Error(e.kind(), "sample " + s.id + ": " + e.detail());
        }
    });
    return frames;
}

} // namespace pat
