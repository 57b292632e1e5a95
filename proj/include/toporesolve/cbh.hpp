#ifndef TOPORESOLVE_CBH_HPP
#define TOPORESOLVE_CBH_HPP

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "toporesolve/resolution.hpp"

namespace toporesolve {

struct CbhConfig {
    int max_iterations = 2;
    std::vector<Division> divisions = {Division::County, Division::State, Division::Country};
};

/// A probability vector over a candidate list, or "undefined" when the
/// evidence it is built from is absent (zero denominator).
using ProbabilityVector = std::optional<std::vector<double>>;

namespace detail {

inline std::vector<std::size_t> ancestor_mentions(const Document& doc, const Gazetteer& g,
                                                  const GazetteerEntry& ancestor) {
    return mentions_of(doc, g.name_set(ancestor));
}

// Max of 1/TD over (ancestor mention, toponym mention) pairs, TD > 0.
inline double max_inverse_distance(const std::vector<std::size_t>& ancestor_tokens,
                                   const std::vector<std::size_t>& toponym_tokens) {
    double best = 0.0;
    for (std::size_t a : ancestor_tokens)
        for (std::size_t t : toponym_tokens) {
            std::size_t td = term_distance(a, t);
            if (td == 0) continue;  // self-overlap carries no evidence
            best = std::max(best, 1.0 / static_cast<double>(td));
        }
    return best;
}

}  // namespace detail

/// Score-by-ancestor-proximity disambiguation. Each interpretation sums,
/// over its chain ancestors (parent upward), the best inverse term
/// distance between an ancestor mention and a toponym mention; the top
/// score wins, ties going to the larger population then smaller id.
inline std::vector<ResolvedToponym> preliminary_resolve(const Document& doc, const Gazetteer& g) {
    std::vector<ResolvedToponym> out;
    for (const MentionGroup& group : mention_groups(doc)) {
        std::vector<Interpretation> cands = candidates(group, g);
        ResolvedToponym r;
        r.group = group;
        if (cands.empty()) {
            r.source = Source::Fallback;
            out.push_back(std::move(r));
            continue;
        }
        double best_score = -1.0;
        std::size_t best = 0;
        for (std::size_t j = 0; j < cands.size(); ++j) {
            const Interpretation& cand = cands[j];
            double score = 0.0;
            for (Division d : kAllDivisions) {
                const GazetteerEntry* anc = g.ancestor_at(cand.chain, d);
                if (!anc || anc->id == cand.entry->id) continue;  // start at the parent
                score += detail::max_inverse_distance(detail::ancestor_mentions(doc, g, *anc),
                                                      group.token_indices);
            }
            if (score > best_score ||
                (score == best_score && detail::prefer_interpretation(cand, cands[best]))) {
                best_score = score;
                best = j;
            }
        }
        r.interpretation = cands[best];
        r.confidence = 0.0;  // preliminary scores are unnormalized
        r.source = Source::Preliminary;
        out.push_back(std::move(r));
    }
    return out;
}

/// Inheritance hypothesis: candidates weighted by how often their ancestor
/// at division d is mentioned in the document.
inline ProbabilityVector p_inh(const Document& doc, const MentionGroup&, Division d,
                               std::span<const Interpretation> cands, const Gazetteer& g) {
    std::vector<double> counts(cands.size(), 0.0);
    double total = 0.0;
    for (std::size_t j = 0; j < cands.size(); ++j) {
        const GazetteerEntry* anc = g.ancestor_at(cands[j].chain, d);
        if (!anc) continue;
        counts[j] = static_cast<double>(detail::ancestor_mentions(doc, g, *anc).size());
        total += counts[j];
    }
    if (total <= 0.0) return std::nullopt;
    for (double& c : counts) c /= total;
    return counts;
}

/// Near-location hypothesis: candidates weighted by inverse term distance
/// from the toponym to the closest mention of their ancestor at d.
inline ProbabilityVector p_near(const Document& doc, const MentionGroup& group, Division d,
                                std::span<const Interpretation> cands, const Gazetteer& g) {
    std::vector<double> sims(cands.size(), 0.0);
    double total = 0.0;
    for (std::size_t j = 0; j < cands.size(); ++j) {
        const GazetteerEntry* anc = g.ancestor_at(cands[j].chain, d);
        if (!anc) continue;
        sims[j] = detail::max_inverse_distance(detail::ancestor_mentions(doc, g, *anc),
                                               group.token_indices);
        total += sims[j];
    }
    if (total <= 0.0) return std::nullopt;
    for (double& s : sims) s /= total;
    return sims;
}

/// Normalized-entropy complement: 1 for a one-hot vector, 0 for uniform.
inline double entropy_weight(std::span<const double> p) {
    const std::size_t n = p.size();
    if (n <= 1) return 1.0;
    double h = 0.0;
    for (double x : p)
        if (x > 0.0) h -= x * std::log2(x);
    double j = 1.0 - h / std::log2(static_cast<double>(n));
    return std::clamp(j, 0.0, 1.0);
}

/// Entropy-weighted blend of the two hypotheses. When only one side is
/// defined the blend degenerates to that side; both undefined stays
/// undefined.
inline ProbabilityVector p_cb(const Document& doc, const MentionGroup& group, Division d,
                              std::span<const Interpretation> cands, const Gazetteer& g) {
    ProbabilityVector near = p_near(doc, group, d, cands, g);
    ProbabilityVector inh = p_inh(doc, group, d, cands, g);
    if (!near && !inh) return std::nullopt;
    if (near && !inh) return near;
    if (!near && inh) return inh;
    const double j = entropy_weight(*near);
    std::vector<double> blend(cands.size(), 0.0);
    for (std::size_t k = 0; k < cands.size(); ++k)
        blend[k] = j * (*near)[k] + (1.0 - j) * (*inh)[k];
    return blend;
}

/// Iterative refinement of the preliminary assignment, one pass per
/// division from finest to coarsest, bounded by max_iterations. Confidence
/// is the best defined blended probability of the final pick across
/// divisions; groups with no defined evidence keep the preliminary result.
inline std::vector<ResolvedToponym> resolve_cbh(const Document& doc, const Gazetteer& g,
                                                const CbhConfig& cfg = {}) {
    std::vector<ResolvedToponym> resolved = preliminary_resolve(doc, g);
    if (cfg.max_iterations <= 0) return resolved;

    std::vector<std::vector<Interpretation>> cands_by_group;
    cands_by_group.reserve(resolved.size());
    for (const ResolvedToponym& r : resolved) cands_by_group.push_back(candidates(r.group, g));

    for (int k = 0; k < cfg.max_iterations; ++k) {
        for (Division d : cfg.divisions) {
            for (std::size_t gi = 0; gi < resolved.size(); ++gi) {
                const auto& cands = cands_by_group[gi];
                if (cands.empty()) continue;
                ProbabilityVector pv = p_cb(doc, resolved[gi].group, d, cands, g);
                if (!pv) continue;
                std::size_t best = 0;
                for (std::size_t j = 1; j < cands.size(); ++j) {
                    if ((*pv)[j] > (*pv)[best] ||
                        ((*pv)[j] == (*pv)[best] &&
                         detail::prefer_interpretation(cands[j], cands[best])))
                        best = j;
                }
                resolved[gi].interpretation = cands[best];
            }
        }
    }

    for (std::size_t gi = 0; gi < resolved.size(); ++gi) {
        const auto& cands = cands_by_group[gi];
        if (cands.empty() || !resolved[gi].interpretation) continue;
        double confidence = -1.0;
        for (Division d : cfg.divisions) {
            ProbabilityVector pv = p_cb(doc, resolved[gi].group, d, cands, g);
            if (!pv) continue;
            for (std::size_t j = 0; j < cands.size(); ++j) {
                if (cands[j].entry->id == resolved[gi].interpretation->entry->id)
                    confidence = std::max(confidence, (*pv)[j]);
            }
        }
        if (confidence >= 0.0) {
            resolved[gi].confidence = confidence;
            resolved[gi].source = Source::CBH;
        }
        // otherwise: evidence undefined at every division; preliminary stands
    }
    return resolved;
}

}  // namespace toporesolve

#endif  // TOPORESOLVE_CBH_HPP
