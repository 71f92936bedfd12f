#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "pat/matrix.hpp"
#include "pat/tensor_io.hpp"

namespace fixtures {

inline std::vector<float> gaussian(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<float> v(n);
    for (auto& x : v) x = static_cast<float>(dist(rng));
    return v;
}

inline pat::EmbeddingMatrix random_unit(std::mt19937_64& rng, std::size_t rows, std::size_t dim) {
    return pat::l2_normalize_rows(pat::EmbeddingMatrix(rows, dim, gaussian(rng, rows * dim)));
}

inline pat::FrameEmbeddings random_frames(std::mt19937_64& rng, std::size_t rows, std::size_t dim) {
    return pat::l2_normalize_rows(pat::FrameEmbeddings(rows, dim, gaussian(rng, rows * dim)));
}

inline std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline pat::EmbeddingMatrix rows(std::vector<std::vector<float>> r) {
    std::vector<float> flat;
    for (const auto& row : r) flat.insert(flat.end(), row.begin(), row.end());
    return pat::EmbeddingMatrix(r.size(), r.empty() ? 0 : r[0].size(), std::move(flat));
}

inline pat::FrameEmbeddings frame_rows(std::vector<std::vector<float>> r) {
    std::vector<float> flat;
    for (const auto& row : r) flat.insert(flat.end(), row.begin(), row.end());
    return pat::FrameEmbeddings(r.size(), r[0].size(), std::move(flat));
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::uint64_t counter = 0;
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("pat-" + tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::filesystem::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << text;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace fixtures
