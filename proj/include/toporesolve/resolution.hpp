#ifndef TOPORESOLVE_RESOLUTION_HPP
#define TOPORESOLVE_RESOLUTION_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "toporesolve/corpus.hpp"
#include "toporesolve/gazetteer.hpp"

namespace toporesolve {

/// One candidate location for a toponym, carrying its hierarchy chain.
struct Interpretation {
    const GazetteerEntry* entry = nullptr;
    HierarchyChain chain;
};

/// Mentions of the same normalized surface form one group; a group gets a
/// single interpretation (one-sense-per-referent).
struct MentionGroup {
    std::string normalized_surface;
    std::string surface;                      // first-seen raw surface
    std::vector<std::size_t> mention_indices; // into Document::toponyms
    std::vector<std::size_t> token_indices;   // first token of each mention
};

namespace detail {

// Deterministic tie-break used throughout: population desc, id asc.
inline bool prefer_interpretation(const Interpretation& a, const Interpretation& b) {
    if (a.entry->population != b.entry->population)
        return a.entry->population > b.entry->population;
    return a.entry->id < b.entry->id;
}

}  // namespace detail

enum class Source { Preliminary, CBH, SHS, Fallback };

inline const char* source_name(Source s) {
    switch (s) {
        case Source::Preliminary: return "preliminary";
        case Source::CBH: return "cbh";
        case Source::SHS: return "shs";
        case Source::Fallback: return "fallback";
    }
    return "?";
}

struct ResolvedToponym {
    MentionGroup group;
    std::optional<Interpretation> interpretation;
    double confidence = 0.0;
    Source source = Source::Fallback;
};

/// Groups in first-occurrence order; token indices sorted and unique.
inline std::vector<MentionGroup> mention_groups(const Document& doc) {
    std::vector<MentionGroup> groups;
    std::map<std::string, std::size_t> index_by_surface;
    for (std::size_t mi = 0; mi < doc.toponyms.size(); ++mi) {
        const ToponymMention& m = doc.toponyms[mi];
        std::string key = normalize_name(m.surface);
        auto [it, inserted] = index_by_surface.emplace(key, groups.size());
        if (inserted) {
            groups.push_back(MentionGroup{key, m.surface, {}, {}});
        }
        MentionGroup& g = groups[it->second];
        g.mention_indices.push_back(mi);
        g.token_indices.push_back(m.token_index);
    }
    for (MentionGroup& g : groups) {
        std::sort(g.token_indices.begin(), g.token_indices.end());
        g.token_indices.erase(std::unique(g.token_indices.begin(), g.token_indices.end()),
                              g.token_indices.end());
    }
    return groups;
}

/// Gazetteer candidates for a group, hierarchy attached, ascending id.
inline std::vector<Interpretation> candidates(const MentionGroup& group, const Gazetteer& g) {
    std::vector<Interpretation> out;
    for (const GazetteerEntry* e : g.lookup_normalized(group.normalized_surface))
        out.push_back(Interpretation{e, g.hierarchy_of(*e)});
    return out;
}

/// Stable JSON payload shared by the CLI and the HTTP endpoint.
inline nlohmann::ordered_json resolutions_to_json(const std::vector<ResolvedToponym>& resolved) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const ResolvedToponym& r : resolved) {
        nlohmann::ordered_json j;
        j["surface"] = r.group.surface;
        j["normalized"] = r.group.normalized_surface;
        j["mentions"] = r.group.mention_indices;
        if (r.interpretation) {
            j["geonames_id"] = r.interpretation->entry->id;
            j["name"] = r.interpretation->entry->name;
            j["latitude"] = r.interpretation->entry->latitude;
            j["longitude"] = r.interpretation->entry->longitude;
        } else {
            j["geonames_id"] = nullptr;
            j["name"] = nullptr;
            j["latitude"] = nullptr;
            j["longitude"] = nullptr;
        }
        j["confidence"] = r.confidence;
        j["source"] = source_name(r.source);
        arr.push_back(std::move(j));
    }
    return arr;
}

}  // namespace toporesolve

#endif  // TOPORESOLVE_RESOLUTION_HPP
