#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pat/eval.hpp"
#include "pat/scoring.hpp"

namespace pat {

/// [{"prompt_id", "score", "weight"}] sorted by descending weight.
nlohmann::json weights_to_json(const PromptWeights& w);

nlohmann::json report_to_json(const EvaluationReport& r);
EvaluationReport report_from_json(const nlohmann::json& j);

/// One JSON line. Run metadata (timestamps) goes under "metadata" so that the
/// rest of the line is reproducible byte for byte.
std::string report_line(const EvaluationReport& r, const nlohmann::json& metadata = nlohmann::json::object());

/// Reads every non-empty line of a JSON-lines report file.
std::vector<EvaluationReport> read_report_lines(const std::filesystem::path& path);

/// Grid file: [[b_audio, b_text], ...] or [{"beta_audio", "beta_text"}, ...].
BetaGrid parse_grid(std::string_view json_text);
BetaGrid read_grid(const std::filesystem::path& path);

/// Markdown table of treated-minus-baseline deltas.
///
/// Reports are grouped by (dataset, condition). The first report of each group
/// is its baseline; later reports in the group are treatments. Rows are
/// datasets; each condition contributes a baseline column followed by one
/// column per treatment, whose cells read "94.80 (+3.00)". Every treatment
/// must use its baseline's metric (MetricMismatch otherwise).
std::string comparison_table(std::span<const EvaluationReport> reports);

/// Signed two-decimal delta, e.g. "+3.00", "-0.11", "+0.00".
std::string format_delta(double delta);

} // namespace pat
