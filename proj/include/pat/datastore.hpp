#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pat {

inline constexpr std::string_view label_slot = "<label>";

enum class PromptOrigin { Seed, User };

struct PromptTemplate {
    std::string id;
    /// Contains "<label>" exactly once and no other "<...>" slot.
    std::string text;
    PromptOrigin origin = PromptOrigin::User;
};

struct PromptDatastore {
    std::vector<PromptTemplate> prompts;
    std::string version;

    std::size_t size() const noexcept { return prompts.size(); }
    std::vector<std::string> ids() const;
};

/// Validates one template: exactly one label slot, no other angle-bracket slot.
void validate_template(const PromptTemplate& t);

/// Accepts either a bare list `[{"id", "template"}]` or an object
/// `{"version": str, "prompts": [...]}`. A bare list gets a content-hash version.
PromptDatastore parse_datastore(std::string_view json_text, PromptOrigin origin = PromptOrigin::User);
PromptDatastore load_datastore(const std::filesystem::path& path, PromptOrigin origin = PromptOrigin::User);

/// Path of the seed store shipped with the project (set at build time).
std::filesystem::path seed_datastore_path();
PromptDatastore load_seed_datastore();

/// Replaces the label slot with `label` verbatim.
std::string expand_template(const PromptTemplate& t, std::string_view label);

/// Grid of prompt texts, indexed [prompt][label] in datastore x label order.
std::vector<std::vector<std::string>> render_prompt_matrix(const PromptDatastore& ds,
                                                           std::span<const std::string> labels);

/// Keeps the first `count` prompts (datastore order). Used for prompt-count sweeps.
PromptDatastore take_prompts(const PromptDatastore& ds, std::size_t count);

} // namespace pat
