#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "pat/datastore.hpp"
#include "pat/error.hpp"
#include "pat/eval.hpp"
#include "pat/manifest.hpp"
#include "pat/report_io.hpp"
#include "pat/tensor_io.hpp"

namespace pat::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Mirrors the command-line flags one to one; a --config file may set any of them.
struct RunConfig {
    std::string manifest_path;
    std::string datastore_path;
    std::string embeddings_dir;
    std::string text_banks_dir;
    std::string method = "pat";
    double beta_audio = 0.01;
    double beta_text = 0.1;
    double temperature = 1.0;
    double attention_scale = 1.0;
    std::string grid_path;
    std::size_t threads = 0;
    std::string output_path;
    std::string weights_out;
    std::string condition = "clean";
    std::string split;
    std::vector<std::string> report_paths;
};

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorKind::InvalidArgument, msg); }

void require_path(const std::string& value, const char* flag, bool directory) {
    if (value.empty()) config_error(std::string(flag) + " is required");
    const bool ok = directory ? fs::is_directory(value) : fs::is_regular_file(value);
    if (!ok) config_error(std::string(flag) + ": " + value + " does not exist");
}

void require_output(const RunConfig& cfg) {
    if (cfg.output_path.empty()) config_error("--out is required");
}

void validate_numbers(const RunConfig& cfg) {
    validate(BetaPair{cfg.beta_audio, cfg.beta_text});
    if (!std::isfinite(cfg.temperature) || cfg.temperature <= 0.0) config_error("--temperature must be > 0");
    if (!std::isfinite(cfg.attention_scale)) config_error("--attention-scale must be finite");
}

std::string timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_text(const fs::path& path, const std::string& text, bool append = false) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

/// Loaded dataset shared by every data-driven subcommand.
struct Workspace {
    DatasetManifest manifest;
    PromptDatastore datastore;
    std::vector<EmbeddingMatrix> banks;
    std::vector<FrameEmbeddings> frames;

    EvalInputs inputs() const { return {manifest, datastore, banks, frames}; }
};

Workspace load_workspace(const RunConfig& cfg) {
    require_path(cfg.manifest_path, "--manifest", false);
    require_path(cfg.text_banks_dir, "--text-banks", true);
    const std::string store = cfg.datastore_path.empty() ? seed_datastore_path().string() : cfg.datastore_path;
    require_path(store, "--datastore", false);
    const fs::path emb_root = cfg.embeddings_dir.empty() ? fs::path(cfg.manifest_path).parent_path()
                                                         : fs::path(cfg.embeddings_dir);
    if (!cfg.embeddings_dir.empty()) require_path(cfg.embeddings_dir, "--embeddings", true);

    Workspace ws;
    ws.manifest = read_manifest(cfg.manifest_path);
    ws.datastore = cfg.datastore_path.empty() ? load_seed_datastore() : load_datastore(store);
    ws.frames = load_sample_frames(ws.manifest, emb_root, cfg.threads);
    ws.banks = load_text_banks(ws.datastore, cfg.text_banks_dir, ws.manifest.num_classes(), cfg.threads);
    return ws;
}

EvalOptions eval_options(const RunConfig& cfg) {
    EvalOptions o;
    o.method = parse_method(cfg.method);
    o.betas = {cfg.beta_audio, cfg.beta_text};
    o.temperature = cfg.temperature;
    o.condition = cfg.condition;
    o.split = cfg.split.empty() ? "unspecified" : cfg.split;
    o.threads = cfg.threads;
    o.cma.attention_scale = cfg.attention_scale;
    return o;
}

void cmd_score_prompts(const RunConfig& cfg, std::ostream& out) {
    require_output(cfg);
    validate_numbers(cfg);
    const Workspace ws = load_workspace(cfg);
    const EmbeddingMatrix audio = pooled_audio(ws.frames, cfg.threads);
    const auto ids = ws.datastore.ids();
    const auto res = weighted_prompt_ensemble(ws.banks, audio, cfg.temperature, ids, cfg.threads);
    write_text(cfg.output_path, weights_to_json(res.weights).dump(2) + "\n");
    out << "wrote weights for " << ids.size() << " prompts to " << cfg.output_path << '\n';
}

void cmd_ensemble(const RunConfig& cfg, std::ostream& out) {
    require_output(cfg);
    validate_numbers(cfg);
    const Workspace ws = load_workspace(cfg);
    EvalOptions o = eval_options(cfg);
    // The ensemble is the class bank each method classifies against; alignment
    // does not change it.
    o.betas = {};
    const auto res = evaluate_dataset(ws.inputs(), o);
    write_tensor(res.class_embeddings, cfg.output_path);
    if (res.weights && !cfg.weights_out.empty()) {
        write_text(cfg.weights_out, weights_to_json(*res.weights).dump(2) + "\n");
    }
    out << "wrote " << res.class_embeddings.rows() << "x" << res.class_embeddings.cols() << " class bank to "
        << cfg.output_path << '\n';
}

void cmd_classify(const RunConfig& cfg, std::ostream& out) {
    require_output(cfg);
    validate_numbers(cfg);
    const Workspace ws = load_workspace(cfg);
    const auto res = evaluate_dataset(ws.inputs(), eval_options(cfg));
    std::string lines;
    for (std::size_t i = 0; i < ws.manifest.samples.size(); ++i) {
        auto row = res.logits.row(i);
        json j;
        j["id"] = ws.manifest.samples[i].id;
        j["predicted"] = res.predictions[i];
        j["label"] = ws.manifest.labels[res.predictions[i]];
        j["logits"] = std::vector<double>(row.begin(), row.end());
        lines += j.dump() + "\n";
    }
    write_text(cfg.output_path, lines);
    out << "classified " << res.predictions.size() << " samples into " << cfg.output_path << '\n';
}

void cmd_evaluate(const RunConfig& cfg, std::ostream& out) {
    require_output(cfg);
    validate_numbers(cfg);
    const Workspace ws = load_workspace(cfg);
    auto res = evaluate_dataset(ws.inputs(), eval_options(cfg));
    if (res.weights && !cfg.weights_out.empty()) {
        write_text(cfg.weights_out, weights_to_json(*res.weights).dump(2) + "\n");
        res.report.prompt_weights_ref = cfg.weights_out;
    }
    write_text(cfg.output_path, report_line(res.report, {{"created_at", timestamp()}}) + "\n", true);
    char value[32];
    std::snprintf(value, sizeof value, "%.2f", res.report.value);
    out << ws.manifest.dataset_name << " " << to_string(res.report.method) << " " << to_string(res.report.metric)
        << " = " << value << '\n';
}

void cmd_tune(const RunConfig& cfg, std::ostream& out) {
    require_output(cfg);
    validate_numbers(cfg);
    require_path(cfg.grid_path, "--grid", false);
    if (cfg.split.empty()) config_error("--split is required: name the split the betas are tuned on");
    const BetaGrid grid = read_grid(cfg.grid_path);
    const Workspace ws = load_workspace(cfg);
    const auto res = grid_search_betas(ws.inputs(), grid, eval_options(cfg));

    json doc;
    doc["best"] = {{"beta_audio", res.best.beta_audio}, {"beta_text", res.best.beta_text}};
    doc["best_report"] = report_to_json(res.best_report);
    doc["reports"] = json::array();
    for (const auto& r : res.reports) doc["reports"].push_back(report_to_json(r));
    doc["metadata"] = {{"created_at", timestamp()}};
    write_text(cfg.output_path, doc.dump(2) + "\n");
    out << "best betas (" << res.best.beta_audio << ", " << res.best.beta_text << ") over " << grid.pairs.size()
        << " pairs\n";
}

void cmd_compare(const RunConfig& cfg, std::ostream& out) {
    std::vector<EvaluationReport> reports;
    for (const auto& p : cfg.report_paths) {
        if (!fs::is_regular_file(p)) config_error("report file " + p + " does not exist");
        auto more = read_report_lines(p);
        reports.insert(reports.end(), more.begin(), more.end());
    }
    const std::string table = comparison_table(reports);
    if (cfg.output_path.empty()) {
        out << table;
    } else {
        write_text(cfg.output_path, table);
    }
}

int exit_code_for(ErrorCategory c) {
    switch (c) {
    case ErrorCategory::Config: return exit_config;
    case ErrorCategory::Data: return exit_data;
    case ErrorCategory::Numeric: return exit_numeric;
    }
    return exit_data;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Training-free alignment of audio and text embeddings for zero-shot classification"};
    app.name("pat-align");
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "TOML/INI file supplying any flag; command-line flags take precedence");

    app.add_option("--manifest", cfg.manifest_path, "Dataset manifest (JSON)");
    app.add_option("--datastore", cfg.datastore_path, "Prompt datastore (JSON); defaults to the bundled seed store");
    app.add_option("--embeddings", cfg.embeddings_dir, "Root for the manifest's embedding_ref paths");
    app.add_option("--text-banks", cfg.text_banks_dir, "Directory of <prompt id>.pate text banks");
    app.add_option("--method", cfg.method, "zs | pe | wpe | pe-cma | pat")
        ->check(CLI::IsMember({"zs", "pe", "wpe", "pe-cma", "pe+cma", "pat"}));
    app.add_option("--beta-audio", cfg.beta_audio, "Weight of the audio-guided logits");
    app.add_option("--beta-text", cfg.beta_text, "Weight of the text-guided logits");
    app.add_option("--temperature", cfg.temperature, "Divisor applied to prompt scores before the softmax");
    app.add_option("--attention-scale", cfg.attention_scale, "Diagnostic multiplier on the attention map");
    app.add_option("--grid", cfg.grid_path, "Beta grid (JSON list of [beta_audio, beta_text])");
    app.add_option("--threads", cfg.threads, "Worker threads (0 = all cores)");
    app.add_option("--out", cfg.output_path, "Output file");
    app.add_option("--weights-out", cfg.weights_out, "Also write the prompt weights export here");
    app.add_option("--condition", cfg.condition, "Condition name stamped into reports");
    app.add_option("--split", cfg.split, "Name of the data split used (required by tune)");

    auto* score = app.add_subcommand("score-prompts", "Score prompts and write the weights export");
    auto* ensemble = app.add_subcommand("ensemble", "Write the class embedding bank for a method");
    auto* classify = app.add_subcommand("classify", "Write per-sample predictions as JSON lines");
    auto* evaluate = app.add_subcommand("evaluate", "Append an evaluation report line");
    auto* tune = app.add_subcommand("tune", "Grid-search the logit weights");
    auto* compare = app.add_subcommand("compare", "Markdown table of deltas between reports");
    compare->add_option("reports", cfg.report_paths, "Report files (JSON lines)")->required()->expected(1, -1);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_config;
    }

    try {
        if (*score) cmd_score_prompts(cfg, out);
        else if (*ensemble) cmd_ensemble(cfg, out);
        else if (*classify) cmd_classify(cfg, out);
        else if (*evaluate) cmd_evaluate(cfg, out);
        else if (*tune) cmd_tune(cfg, out);
        else if (*compare) cmd_compare(cfg, out);
        return exit_ok;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.category());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_data;
    }
}

} // namespace pat::cli
