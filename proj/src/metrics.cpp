#include "pat/eval.hpp"

#include <algorithm>
#include <numeric>

#include "pat/diagnostics.hpp"

namespace pat {

double accuracy(std::span<const std::size_t> predictions, const DatasetManifest& manifest) {
    if (manifest.task != TaskType::SingleLabel) {
        throw Error(ErrorKind::TaskMismatch, "accuracy needs a single_label dataset");
    }
    if (predictions.empty() || predictions.size() != manifest.samples.size()) {
        throw Error(ErrorKind::LengthMismatch, std::to_string(predictions.size()) + " predictions for " +
                                                   std::to_string(manifest.samples.size()) + " samples");
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i] == std::get<std::size_t>(manifest.samples[i].truth)) ++correct;
    }
    return 100.0 * static_cast<double>(correct) / static_cast<double>(predictions.size());
}

std::optional<double> average_precision(std::span<const double> scores, std::span<const std::uint8_t> positives) {
    if (scores.size() != positives.size()) {
        throw Error(ErrorKind::LengthMismatch, "scores and labels differ in length");
    }
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    std::size_t hits = 0;
    double precision_sum = 0.0;
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        if (positives[order[rank]]) {
            ++hits;
            precision_sum += static_cast<double>(hits) / static_cast<double>(rank + 1);
        }
    }
    if (hits == 0) return std::nullopt;
    return precision_sum / static_cast<double>(hits);
}

double mean_average_precision(const LogitMatrix& scores, const DatasetManifest& manifest) {
    if (manifest.task != TaskType::MultiLabel) {
        throw Error(ErrorKind::TaskMismatch, "mAP needs a multi_label dataset");
    }
    const std::size_t n = manifest.samples.size();
    const std::size_t m = manifest.num_classes();
    if (scores.rows() != n || scores.cols() != m) {
        throw Error(ErrorKind::LengthMismatch, "score matrix " + std::to_string(scores.rows()) + "x" +
                                                   std::to_string(scores.cols()) + " for " + std::to_string(n) +
                                                   " samples and " + std::to_string(m) + " classes");
    }

    std::vector<double> column(n);
    std::vector<std::uint8_t> truth(n);
    double ap_sum = 0.0;
    std::size_t counted = 0;
    std::vector<std::string> skipped;
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            column[i] = scores(i, j);
            truth[i] = std::get<std::vector<std::uint8_t>>(manifest.samples[i].truth)[j];
        }
        if (auto ap = average_precision(column, truth)) {
            ap_sum += *ap;
            ++counted;
        } else {
            skipped.push_back(manifest.labels[j]);
        }
    }
    if (counted == 0) throw Error(ErrorKind::NoPositives, "no class has a positive sample");
    if (!skipped.empty()) {
        std::string names;
        for (const auto& s : skipped) names += (names.empty() ? "" : ", ") + s;
        warn("mAP: skipped " + std::to_string(skipped.size()) + " class(es) without positives: " + names);
    }
    return (ap_sum / static_cast<double>(counted)) * 100.0;
}

} // namespace pat
