#include "pat/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace pat {
namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, std::string("cannot open ") + what + " " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

template <class T>
T field(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw Error(ErrorKind::SchemaError, std::string("report.") + key + ": missing");
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw Error(ErrorKind::SchemaError, std::string("report.") + key + ": wrong type");
    }
}

} // namespace

json weights_to_json(const PromptWeights& w) {
    json out = json::array();
    for (std::size_t idx : rank_by_weight(w)) {
        out.push_back({{"prompt_id", w.prompt_ids[idx]}, {"score", w.scores[idx]}, {"weight", w.weights[idx]}});
    }
    return out;
}

json report_to_json(const EvaluationReport& r) {
    json j;
    j["dataset_name"] = r.dataset_name;
    j["condition"] = r.condition;
    j["method"] = std::string(to_string(r.method));
    j["metric_name"] = std::string(to_string(r.metric));
    j["value"] = r.value;
    j["betas"] = {{"beta_audio", r.betas.beta_audio}, {"beta_text", r.betas.beta_text}};
    j["temperature"] = r.temperature;
    j["prompt_weights_ref"] = r.prompt_weights_ref ? json(*r.prompt_weights_ref) : json(nullptr);
    j["n_samples"] = r.n_samples;
    j["n_prompts"] = r.n_prompts;
    j["datastore_version"] = r.datastore_version;
    j["split"] = r.split;
    j["runs"] = r.runs;
    return j;
}

EvaluationReport report_from_json(const json& j) {
    if (!j.is_object()) throw Error(ErrorKind::SchemaError, "report: expected an object");
    EvaluationReport r;
    r.dataset_name = field<std::string>(j, "dataset_name");
    r.condition = field<std::string>(j, "condition");
    r.method = parse_method(field<std::string>(j, "method"));
    r.metric = parse_metric(field<std::string>(j, "metric_name"));
    r.value = field<double>(j, "value");
    if (!(r.value >= 0.0 && r.value <= 100.0)) throw Error(ErrorKind::SchemaError, "report.value: not in [0, 100]");
    const json betas = field<json>(j, "betas");
    r.betas = {field<double>(betas, "beta_audio"), field<double>(betas, "beta_text")};
    r.temperature = field<double>(j, "temperature");
    if (auto it = j.find("prompt_weights_ref"); it != j.end() && it->is_string()) {
        r.prompt_weights_ref = it->get<std::string>();
    }
    r.n_samples = field<std::size_t>(j, "n_samples");
    if (r.n_samples == 0) throw Error(ErrorKind::SchemaError, "report.n_samples: must be >= 1");
    r.n_prompts = field<std::size_t>(j, "n_prompts");
    r.datastore_version = field<std::string>(j, "datastore_version");
    r.split = field<std::string>(j, "split");
    r.runs = field<std::size_t>(j, "runs");
    return r;
}

std::string report_line(const EvaluationReport& r, const json& metadata) {
    json j = report_to_json(r);
    j["metadata"] = metadata;
    return j.dump();
}

std::vector<EvaluationReport> read_report_lines(const std::filesystem::path& path) {
    const std::string text = read_file(path, "report file");
    std::vector<EvaluationReport> out;
    std::istringstream lines(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(report_from_json(json::parse(line)));
        } catch (const json::parse_error& e) {
            throw Error(ErrorKind::SchemaError, path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        } catch (const Error& e) {
            throw Error(e.kind(), path.string() + ":" + std::to_string(lineno) + ": " + e.detail());
        }
    }
    return out;
}

BetaGrid parse_grid(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::InvalidArgument, std::string("grid: ") + e.what());
    }
    if (!doc.is_array()) throw Error(ErrorKind::InvalidArgument, "grid: expected a list of beta pairs");
    BetaGrid grid;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const json& e = doc[i];
        const std::string where = "grid[" + std::to_string(i) + "]";
        if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
            grid.pairs.push_back({e[0].get<double>(), e[1].get<double>()});
        } else if (e.is_object() && e.contains("beta_audio") && e.contains("beta_text") && e["beta_audio"].is_number() &&
                   e["beta_text"].is_number()) {
            grid.pairs.push_back({e["beta_audio"].get<double>(), e["beta_text"].get<double>()});
        } else {
            throw Error(ErrorKind::InvalidArgument, where + ": expected [beta_audio, beta_text]");
        }
    }
    validate(grid);
    return grid;
}

BetaGrid read_grid(const std::filesystem::path& path) { return parse_grid(read_file(path, "grid file")); }

std::string format_delta(double delta) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%+.2f", delta);
    std::string s = buf;
    if (s == "-0.00") s = "+0.00";
    return s;
}

std::string comparison_table(std::span<const EvaluationReport> reports) {
    if (reports.size() < 2) throw Error(ErrorKind::InvalidArgument, "need at least two reports to compare");

    std::vector<std::string> datasets;
    std::vector<std::string> conditions;
    std::map<std::pair<std::string, std::string>, std::vector<const EvaluationReport*>> groups;
    for (const auto& r : reports) {
        if (std::find(datasets.begin(), datasets.end(), r.dataset_name) == datasets.end()) {
            datasets.push_back(r.dataset_name);
        }
        if (std::find(conditions.begin(), conditions.end(), r.condition) == conditions.end()) {
            conditions.push_back(r.condition);
        }
        groups[{r.dataset_name, r.condition}].push_back(&r);
    }

    // Column layout per condition: baseline label, then one label per treatment slot.
    struct ConditionColumns {
        std::string baseline;
        std::vector<std::string> treatments;
    };
    std::vector<ConditionColumns> columns(conditions.size());
    bool any_treatment = false;
    for (std::size_t c = 0; c < conditions.size(); ++c) {
        for (const auto& ds : datasets) {
            auto it = groups.find({ds, conditions[c]});
            if (it == groups.end()) continue;
            const auto& g = it->second;
            if (columns[c].baseline.empty()) columns[c].baseline = std::string(to_string(g.front()->method));
            for (std::size_t k = 1; k < g.size(); ++k) {
                any_treatment = true;
                (void)compare_conditions(*g.front(), *g[k]);
                if (columns[c].treatments.size() < k) columns[c].treatments.push_back(std::string(to_string(g[k]->method)));
            }
        }
    }
    if (!any_treatment) {
        throw Error(ErrorKind::InvalidArgument, "no report shares a dataset and condition with another");
    }

    std::ostringstream out;
    out << "| Dataset | Metric |";
    for (std::size_t c = 0; c < conditions.size(); ++c) {
        out << ' ' << conditions[c] << ' ' << columns[c].baseline << " |";
        for (const auto& t : columns[c].treatments) out << ' ' << conditions[c] << ' ' << t << " |";
    }
    out << "\n|---|---|";
    for (const auto& col : columns) {
        out << "---:|";
        for (std::size_t k = 0; k < col.treatments.size(); ++k) out << "---:|";
    }
    out << '\n';

    for (const auto& ds : datasets) {
        std::string metric;
        std::ostringstream cells;
        for (std::size_t c = 0; c < conditions.size(); ++c) {
            auto it = groups.find({ds, conditions[c]});
            const std::vector<const EvaluationReport*> empty;
            const auto& g = it == groups.end() ? empty : it->second;
            if (!g.empty() && metric.empty()) metric = std::string(to_string(g.front()->metric));
            cells << ' ' << (g.empty() ? "-" : format_value(g.front()->value)) << " |";
            for (std::size_t k = 1; k <= columns[c].treatments.size(); ++k) {
                if (k < g.size()) {
                    const auto d = compare_conditions(*g.front(), *g[k]);
                    cells << ' ' << format_value(d.treated_value) << " (" << format_delta(d.delta) << ") |";
                } else {
                    cells << " - |";
                }
            }
        }
        out << "| " << ds << " | " << metric << " |" << cells.str() << '\n';
    }
    return out.str();
}

} // namespace pat
