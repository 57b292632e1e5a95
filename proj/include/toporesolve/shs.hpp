#ifndef TOPORESOLVE_SHS_HPP
#define TOPORESOLVE_SHS_HPP

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "toporesolve/resolution.hpp"

namespace toporesolve {

/// Root id of the synthetic set that groups interpretations with no
/// defined ancestor (typically countries).
inline constexpr GeonamesId kWorldRootId = 0;

struct SetChild {
    Interpretation interp;
    std::string surface;    // normalized surface of the group it came from
    bool mentioned = true;  // children are added because their surface is mentioned
};

/// One parent node with its mentioned children; the unit of the covering
/// problem.
struct HierarchySet {
    GeonamesId root_id = kWorldRootId;
    std::optional<Interpretation> root_interp;  // absent for the world root
    std::vector<std::string> root_surfaces;     // universe surfaces the root's names match
    bool root_mentioned = false;
    std::vector<SetChild> children;
    double weight = 1.0;
    std::int64_t total_population = 0;  // over mentioned nodes
};

struct CoverProblem {
    std::vector<std::string> universe;  // mention-group surfaces, first-seen order
    std::vector<HierarchySet> sets;
};

struct CoverAssignment {
    std::size_t set_index = 0;
    Interpretation interp;
};

struct Cover {
    std::vector<std::size_t> chosen;
    std::map<std::string, std::optional<CoverAssignment>> assignment;
};

namespace detail {

// Surfaces any node of the set can resolve (root included, mentioned or not).
inline void collect_matchable(const HierarchySet& s, std::set<std::string>& out) {
    for (const std::string& r : s.root_surfaces) out.insert(r);
    for (const SetChild& c : s.children) out.insert(c.surface);
}

// Surfaces the set can actually cover: via a mentioned node.
inline std::set<std::string> coverable(const HierarchySet& s) {
    std::set<std::string> out;
    if (s.root_mentioned)
        for (const std::string& r : s.root_surfaces) out.insert(r);
    for (const SetChild& c : s.children)
        if (c.mentioned) out.insert(c.surface);
    return out;
}

inline std::int64_t mentioned_population(const HierarchySet& s) {
    std::int64_t pop = 0;
    if (s.root_mentioned && s.root_interp) pop += s.root_interp->entry->population;
    for (const SetChild& c : s.children)
        if (c.mentioned) pop += c.interp.entry->population;
    return pop;
}

// Best mentioned node of `s` matching `surface`: population desc, id asc.
inline std::optional<Interpretation> best_matching_node(const HierarchySet& s,
                                                        const std::string& surface) {
    std::optional<Interpretation> best;
    auto consider = [&](const Interpretation& interp) {
        if (!best || prefer_interpretation(interp, *best)) best = interp;
    };
    for (const SetChild& c : s.children)
        if (c.mentioned && c.surface == surface) consider(c.interp);
    if (s.root_mentioned && s.root_interp &&
        std::find(s.root_surfaces.begin(), s.root_surfaces.end(), surface) !=
            s.root_surfaces.end())
        consider(*s.root_interp);
    return best;
}

inline void assign_from_set(Cover& cover, const CoverProblem& p, std::size_t si,
                            const std::set<std::string>& covered_here) {
    for (const std::string& surface : covered_here) {
        auto node = best_matching_node(p.sets[si], surface);
        if (node) cover.assignment[surface] = CoverAssignment{si, *node};
    }
}

}  // namespace detail

/// Build the covering problem: one set per distinct parent, where parent is
/// the nearest defined ancestor strictly above the interpretation (county,
/// else state, else country), or the synthetic world root when there is
/// none. A root that is itself an interpretation of some mentioned surface
/// gets its mentioned flag raised.
inline CoverProblem generate_sets(const Document& doc, const Gazetteer& g) {
    CoverProblem p;
    std::vector<MentionGroup> groups = mention_groups(doc);
    std::map<GeonamesId, std::size_t> set_by_root;

    auto parent_of = [&](const Interpretation& interp) -> GeonamesId {
        const GeonamesId leaf = interp.entry->id;
        if (interp.chain.county && *interp.chain.county != leaf) return *interp.chain.county;
        if (interp.chain.state && *interp.chain.state != leaf) return *interp.chain.state;
        if (interp.chain.country && *interp.chain.country != leaf) return *interp.chain.country;
        return kWorldRootId;
    };

    for (const MentionGroup& group : groups) {
        p.universe.push_back(group.normalized_surface);
        for (const Interpretation& interp : candidates(group, g)) {
            const GeonamesId root = parent_of(interp);
            auto [it, inserted] = set_by_root.emplace(root, p.sets.size());
            if (inserted) {
                HierarchySet s;
                s.root_id = root;
                if (root != kWorldRootId) {
                    const GazetteerEntry* e = g.find(root);
                    s.root_interp = Interpretation{e, g.hierarchy_of(*e)};
                }
                p.sets.push_back(std::move(s));
            }
            p.sets[it->second].children.push_back(
                SetChild{interp, group.normalized_surface, true});
        }
    }

    std::set<std::string> universe_set(p.universe.begin(), p.universe.end());
    for (HierarchySet& s : p.sets) {
        if (s.root_interp) {
            for (const std::string& n : g.name_set(*s.root_interp->entry))
                if (universe_set.count(n)) s.root_surfaces.push_back(n);
            std::sort(s.root_surfaces.begin(), s.root_surfaces.end());
            s.root_mentioned = !s.root_surfaces.empty();
        }
        s.total_population = detail::mentioned_population(s);
    }
    return p;
}

/// Greedy conflict-free cover: repeatedly pick the admissible set covering
/// the most uncovered surfaces (ties by larger mentioned population, then
/// smaller root id). A set stays admissible only while none of its nodes
/// could resolve an already-covered surface.
inline Cover greedy_cover(const CoverProblem& p) {
    Cover cover;
    for (const std::string& s : p.universe) cover.assignment[s] = std::nullopt;

    std::set<std::string> covered;
    std::vector<bool> used(p.sets.size(), false);

    while (true) {
        std::size_t best = p.sets.size();
        std::size_t best_gain = 0;
        std::set<std::string> best_cover;
        for (std::size_t si = 0; si < p.sets.size(); ++si) {
            if (used[si]) continue;
            std::set<std::string> matchable;
            detail::collect_matchable(p.sets[si], matchable);
            bool admissible = std::none_of(matchable.begin(), matchable.end(),
                                           [&](const std::string& s) { return covered.count(s); });
            if (!admissible) continue;
            std::set<std::string> cov = detail::coverable(p.sets[si]);
            const std::size_t gain = cov.size();  // admissible => all of them uncovered
            if (gain == 0) continue;
            bool better = false;
            if (best == p.sets.size() || gain > best_gain) {
                better = true;
            } else if (gain == best_gain) {
                const auto& a = p.sets[si];
                const auto& b = p.sets[best];
                if (a.total_population != b.total_population)
                    better = a.total_population > b.total_population;
                else
                    better = a.root_id < b.root_id;
            }
            if (better) {
                best = si;
                best_gain = gain;
                best_cover = std::move(cov);
            }
        }
        if (best == p.sets.size()) break;
        used[best] = true;
        cover.chosen.push_back(best);
        detail::assign_from_set(cover, p, best, best_cover);
        covered.insert(best_cover.begin(), best_cover.end());
    }
    std::sort(cover.chosen.begin(), cover.chosen.end());
    return cover;
}

/// Exhaustive conflict-free cover for small instances. Maximizes covered
/// surfaces, then minimizes total weight, then maximizes mentioned
/// population, then takes the lexicographically smallest index set.
inline Cover brute_force_cover(const CoverProblem& p, std::size_t limit = 16) {
    if (p.sets.size() > limit)
        throw std::invalid_argument("brute_force_cover: instance exceeds limit of " +
                                    std::to_string(limit) + " sets");

    std::vector<std::set<std::string>> matchable(p.sets.size());
    std::vector<std::set<std::string>> cov(p.sets.size());
    for (std::size_t si = 0; si < p.sets.size(); ++si) {
        detail::collect_matchable(p.sets[si], matchable[si]);
        cov[si] = detail::coverable(p.sets[si]);
    }

    // lexicographic order on the (ascending) chosen-index lists
    auto lex_less = [](std::uint32_t a, std::uint32_t b) {
        while (a != 0 && b != 0) {
            const unsigned ia = static_cast<unsigned>(__builtin_ctz(a));
            const unsigned ib = static_cast<unsigned>(__builtin_ctz(b));
            if (ia != ib) return ia < ib;
            a &= a - 1;
            b &= b - 1;
        }
        return a != 0 && b == 0 ? false : a == 0 && b != 0;
    };

    const std::uint32_t n_masks = 1u << p.sets.size();
    std::uint32_t best_mask = 0;  // empty subset is the initial best
    std::size_t best_covered = 0;
    double best_weight = 0.0;
    std::int64_t best_population = 0;

    for (std::uint32_t mask = 1; mask < n_masks; ++mask) {
        // conflict-free: no surface matchable from two chosen sets
        std::set<std::string> seen;
        bool conflict = false;
        for (std::size_t si = 0; si < p.sets.size() && !conflict; ++si) {
            if (!(mask >> si & 1)) continue;
            for (const std::string& s : matchable[si]) {
                if (!seen.insert(s).second) {
                    conflict = true;
                    break;
                }
            }
        }
        if (conflict) continue;

        std::set<std::string> covered;
        double weight = 0.0;
        std::int64_t population = 0;
        for (std::size_t si = 0; si < p.sets.size(); ++si) {
            if (!(mask >> si & 1)) continue;
            covered.insert(cov[si].begin(), cov[si].end());
            weight += p.sets[si].weight;
            population += p.sets[si].total_population;
        }

        bool better;
        if (covered.size() != best_covered)
            better = covered.size() > best_covered;
        else if (weight != best_weight)
            better = weight < best_weight;
        else if (population != best_population)
            better = population > best_population;
        else
            better = lex_less(mask, best_mask);
        if (better) {
            best_mask = mask;
            best_covered = covered.size();
            best_weight = weight;
            best_population = population;
        }
    }

    Cover cover;
    for (const std::string& s : p.universe) cover.assignment[s] = std::nullopt;
    for (std::size_t si = 0; si < p.sets.size(); ++si) {
        if (!(best_mask >> si & 1)) continue;
        cover.chosen.push_back(si);
        detail::assign_from_set(cover, p, si, cov[si]);
    }
    return cover;
}

/// Covering-based resolution: covered surfaces take their assigned node,
/// everything else falls back to the most populated candidate.
inline std::vector<ResolvedToponym> resolve_shs(const Document& doc, const Gazetteer& g) {
    CoverProblem p = generate_sets(doc, g);
    Cover cover = greedy_cover(p);

    std::vector<ResolvedToponym> out;
    for (const MentionGroup& group : mention_groups(doc)) {
        ResolvedToponym r;
        r.group = group;
        auto it = cover.assignment.find(group.normalized_surface);
        if (it != cover.assignment.end() && it->second) {
            r.interpretation = it->second->interp;
            r.source = Source::SHS;
        } else {
            std::vector<Interpretation> cands = candidates(group, g);
            r.source = Source::Fallback;
            if (!cands.empty()) {
                std::size_t best = 0;
                for (std::size_t j = 1; j < cands.size(); ++j)
                    if (detail::prefer_interpretation(cands[j], cands[best])) best = j;
                r.interpretation = cands[best];
            }
        }
        out.push_back(std::move(r));
    }
    return out;
}

/// Oracle cross-check serialization.
inline nlohmann::ordered_json cover_problem_to_json(const CoverProblem& p) {
    nlohmann::ordered_json sets = nlohmann::ordered_json::array();
    for (const HierarchySet& s : p.sets) {
        nlohmann::ordered_json children = nlohmann::ordered_json::array();
        for (const SetChild& c : s.children)
            children.push_back(nlohmann::ordered_json{{"id", c.interp.entry->id},
                                                      {"surface", c.surface},
                                                      {"population", c.interp.entry->population}});
        sets.push_back(nlohmann::ordered_json{{"root", s.root_id},
                                              {"mentioned", s.root_mentioned},
                                              {"children", std::move(children)}});
    }
    return nlohmann::ordered_json{{"universe", p.universe}, {"sets", std::move(sets)}};
}

}  // namespace toporesolve

#endif  // TOPORESOLVE_SHS_HPP
