#include "pat/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include <json.hpp>

#include "pat/tensor_io.hpp"

namespace pat {
namespace {

std::vector<float> gaussian(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<float> v(n);
    for (auto& x : v) x = static_cast<float>(dist(rng));
    return v;
}

std::vector<float> unit(std::vector<float> v) {
    double sq = 0.0;
    for (float x : v) sq += static_cast<double>(x) * x;
    const double norm = std::sqrt(sq);
    if (norm > 0.0) {
        for (auto& x : v) x = static_cast<float>(x / norm);
    }
    return v;
}

} // namespace

SyntheticDataset make_synthetic(const SyntheticSpec& spec) {
    if (spec.classes < 2 || spec.prompts < 1 || spec.dim < 1 || spec.frames < 1 || spec.samples < 1) {
        throw Error(ErrorKind::InvalidArgument, "synthetic spec needs classes >= 2 and positive sizes");
    }
    std::mt19937_64 rng(spec.seed);
    const std::size_t d = spec.dim;

    std::vector<std::vector<float>> centers(spec.classes);
    for (auto& c : centers) c = unit(gaussian(rng, d));

    SyntheticDataset out;
    auto& m = out.manifest;
    m.dataset_name = "synthetic";
    m.task = spec.task;
    for (std::size_t j = 0; j < spec.classes; ++j) m.labels.push_back("class_" + std::to_string(j));

    out.datastore.version = "synthetic-" + std::to_string(spec.seed);
    for (std::size_t p = 0; p < spec.prompts; ++p) {
        char id[32];
        std::snprintf(id, sizeof id, "p%04zu", p);
        out.datastore.prompts.push_back({id, "A synthetic sound " + std::to_string(p) + " of <label>", PromptOrigin::User});
        std::vector<float> bank(spec.classes * d);
        for (std::size_t j = 0; j < spec.classes; ++j) {
            auto noise = gaussian(rng, d);
            std::vector<float> row(d);
            for (std::size_t k = 0; k < d; ++k) {
                row[k] = centers[j][k] + static_cast<float>(spec.prompt_noise / std::sqrt(double(d))) * noise[k];
            }
            row = unit(std::move(row));
            std::copy(row.begin(), row.end(), bank.begin() + static_cast<std::ptrdiff_t>(j * d));
        }
        out.text_banks.emplace_back(spec.classes, d, std::move(bank));
    }

    std::uniform_int_distribution<std::size_t> pick(0, spec.classes - 1);
    for (std::size_t i = 0; i < spec.samples; ++i) {
        char id[32];
        std::snprintf(id, sizeof id, "s%05zu", i);
        Sample s;
        s.id = id;
        s.embedding_ref = "embeddings/" + s.id + ".pate";

        std::vector<std::size_t> present;
        if (spec.task == TaskType::SingleLabel) {
            present.push_back(pick(rng));
            s.truth = present.front();
        } else {
            std::vector<std::uint8_t> bits(spec.classes, 0);
            const std::size_t k = 1 + pick(rng) % std::min<std::size_t>(3, spec.classes);
            for (std::size_t t = 0; t < k; ++t) bits[pick(rng)] = 1;
            for (std::size_t j = 0; j < spec.classes; ++j) {
                if (bits[j]) present.push_back(j);
            }
            s.truth = std::move(bits);
        }

        std::vector<float> frames(spec.frames * d);
        for (std::size_t f = 0; f < spec.frames; ++f) {
            const auto& center = centers[present[f % present.size()]];
            auto noise = gaussian(rng, d);
            std::vector<float> row(d);
            for (std::size_t k = 0; k < d; ++k) {
                row[k] = center[k] + static_cast<float>(spec.frame_noise / std::sqrt(double(d))) * noise[k];
            }
            row = unit(std::move(row));
            std::copy(row.begin(), row.end(), frames.begin() + static_cast<std::ptrdiff_t>(f * d));
        }
        out.frames.emplace_back(spec.frames, d, std::move(frames));
        m.samples.push_back(std::move(s));
    }
    validate_manifest(m);
    return out;
}

void write_synthetic(const SyntheticDataset& ds, const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    using nlohmann::json;
    fs::create_directories(root / "embeddings");
    fs::create_directories(root / "text_banks");

    json manifest;
    manifest["dataset_name"] = ds.manifest.dataset_name;
    manifest["task"] = std::string(to_string(ds.manifest.task));
    manifest["labels"] = ds.manifest.labels;
    manifest["samples"] = json::array();
    for (std::size_t i = 0; i < ds.manifest.samples.size(); ++i) {
        const auto& s = ds.manifest.samples[i];
        json truth = std::holds_alternative<std::size_t>(s.truth)
                         ? json(std::get<std::size_t>(s.truth))
                         : json(std::vector<int>(std::get<1>(s.truth).begin(), std::get<1>(s.truth).end()));
        manifest["samples"].push_back({{"id", s.id}, {"truth", truth}, {"embedding_ref", s.embedding_ref}});
        write_tensor(ds.frames[i], root / s.embedding_ref);
    }
    std::ofstream(root / "manifest.json") << manifest.dump(2) << '\n';

    json store;
    store["version"] = ds.datastore.version;
    store["prompts"] = json::array();
    for (std::size_t p = 0; p < ds.datastore.size(); ++p) {
        const auto& t = ds.datastore.prompts[p];
        store["prompts"].push_back({{"id", t.id}, {"template", t.text}});
        write_tensor(ds.text_banks[p], root / "text_banks" / (t.id + ".pate"));
    }
    std::ofstream(root / "datastore.json") << store.dump(2) << '\n';
}

} // namespace pat
