#include "pat/datastore.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "pat/error.hpp"

#ifndef PAT_SEED_STORE_PATH
#define PAT_SEED_STORE_PATH "data/seed_prompts.json"
#endif

namespace pat {
namespace {

using nlohmann::json;

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
    std::size_t n = 0;
    for (auto pos = haystack.find(needle); pos != std::string_view::npos; pos = haystack.find(needle, pos + needle.size())) {
        ++n;
    }
    return n;
}

std::string content_version(const std::vector<PromptTemplate>& prompts) {
    // FNV-1a over ids and templates; stable across platforms.
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&](std::string_view s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
        h ^= 0xff;
        h *= 1099511628211ull;
    };
    for (const auto& p : prompts) {
        mix(p.id);
        mix(p.text);
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a-%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace

std::vector<std::string> PromptDatastore::ids() const {
    std::vector<std::string> out;
    out.reserve(prompts.size());
    for (const auto& p : prompts) out.push_back(p.id);
    return out;
}

void validate_template(const PromptTemplate& t) {
    const std::size_t slots = count_occurrences(t.text, label_slot);
    if (slots == 0) throw Error(ErrorKind::MissingLabelSlot, "prompt " + t.id + ": \"" + t.text + "\"");
    if (slots > 1) throw Error(ErrorKind::MultipleLabelSlots, "prompt " + t.id + ": \"" + t.text + "\"");

    // Any other <...> span is an attribute/source slot that should have been
    // filled at curation time.
    std::string rest = t.text;
    rest.erase(rest.find(label_slot), label_slot.size());
    const auto open = rest.find('<');
    if (open != std::string::npos && rest.find('>', open) != std::string::npos) {
        throw Error(ErrorKind::UnresolvedSlot, "prompt " + t.id + ": \"" + t.text + "\"");
    }
}

PromptDatastore parse_datastore(std::string_view json_text, PromptOrigin origin) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::SchemaError, std::string("<root>: ") + e.what());
    }

    PromptDatastore ds;
    const json* list = &doc;
    if (doc.is_object()) {
        auto v = doc.find("version");
        if (v != doc.end()) {
            if (!v->is_string()) throw Error(ErrorKind::SchemaError, "version: expected a string");
            ds.version = v->get<std::string>();
        }
        auto p = doc.find("prompts");
        if (p == doc.end()) throw Error(ErrorKind::SchemaError, "prompts: missing");
        list = &*p;
    }
    if (!list->is_array()) throw Error(ErrorKind::SchemaError, "expected a list of prompts");

    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < list->size(); ++i) {
        const json& e = (*list)[i];
        const std::string where = "[" + std::to_string(i) + "]";
        if (!e.is_object()) throw Error(ErrorKind::SchemaError, where + ": expected an object");
        auto id = e.find("id");
        auto tmpl = e.find("template");
        if (id == e.end() || !id->is_string()) throw Error(ErrorKind::SchemaError, where + ".id: expected a string");
        if (tmpl == e.end() || !tmpl->is_string()) {
            throw Error(ErrorKind::SchemaError, where + ".template: expected a string");
        }
        PromptTemplate t{id->get<std::string>(), tmpl->get<std::string>(), origin};
        if (!seen.insert(t.id).second) throw Error(ErrorKind::DuplicateId, "prompt id \"" + t.id + "\"");
        validate_template(t);
        ds.prompts.push_back(std::move(t));
    }
    if (ds.version.empty()) ds.version = content_version(ds.prompts);
    return ds;
}

PromptDatastore load_datastore(const std::filesystem::path& path, PromptOrigin origin) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open datastore " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_datastore(buf.str(), origin);
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.detail());
    }
}

std::filesystem::path seed_datastore_path() { return PAT_SEED_STORE_PATH; }

PromptDatastore load_seed_datastore() { return load_datastore(seed_datastore_path(), PromptOrigin::Seed); }

std::string expand_template(const PromptTemplate& t, std::string_view label) {
    std::string out = t.text;
    const auto pos = out.find(label_slot);
    if (pos != std::string::npos) out.replace(pos, label_slot.size(), label);
    return out;
}

std::vector<std::vector<std::string>> render_prompt_matrix(const PromptDatastore& ds,
                                                           std::span<const std::string> labels) {
    std::unordered_set<std::string_view> seen;
    for (const auto& l : labels) {
        if (!seen.insert(l).second) throw Error(ErrorKind::DuplicateLabel, "\"" + l + "\"");
    }
    std::vector<std::vector<std::string>> grid;
    grid.reserve(ds.prompts.size());
    for (const auto& p : ds.prompts) {
        auto& row = grid.emplace_back();
        row.reserve(labels.size());
        for (const auto& l : labels) row.push_back(expand_template(p, l));
    }
    return grid;
}

PromptDatastore take_prompts(const PromptDatastore& ds, std::size_t count) {
    if (count == 0 || count > ds.size()) {
        throw Error(ErrorKind::InvalidArgument, "prompt count " + std::to_string(count) + " not in [1, " +
                                                    std::to_string(ds.size()) + "]");
    }
    PromptDatastore out;
    out.prompts.assign(ds.prompts.begin(), ds.prompts.begin() + static_cast<std::ptrdiff_t>(count));
    out.version = ds.version + "/first-" + std::to_string(count);
    return out;
}

} // namespace pat
