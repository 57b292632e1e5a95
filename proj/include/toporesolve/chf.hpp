#ifndef TOPORESOLVE_CHF_HPP
#define TOPORESOLVE_CHF_HPP

#include <stdexcept>

#include "toporesolve/cbh.hpp"
#include "toporesolve/shs.hpp"

namespace toporesolve {

struct ChfConfig {
    double tau = 0.55;
    CbhConfig cbh;
};

/// Fuse precomputed per-group results: the context-bound pick wins only
/// when its confidence exceeds tau, otherwise the covering pick stands.
inline std::vector<ResolvedToponym> fuse_chf(const std::vector<ResolvedToponym>& cbh,
                                             const std::vector<ResolvedToponym>& shs,
                                             double tau) {
    if (tau < 0.0 || tau > 1.0) throw std::invalid_argument("tau must be in [0, 1]");
    if (cbh.size() != shs.size())
        throw std::invalid_argument("fuse_chf: mismatched group counts");
    std::vector<ResolvedToponym> out;
    out.reserve(cbh.size());
    for (std::size_t i = 0; i < cbh.size(); ++i) {
        if (cbh[i].group.normalized_surface != shs[i].group.normalized_surface)
            throw std::invalid_argument("fuse_chf: mismatched groups");
        out.push_back(cbh[i].confidence > tau ? cbh[i] : shs[i]);
    }
    return out;
}

inline std::vector<ResolvedToponym> resolve_chf(const Document& doc, const Gazetteer& g,
                                                const ChfConfig& cfg = {}) {
    return fuse_chf(resolve_cbh(doc, g, cfg.cbh), resolve_shs(doc, g), cfg.tau);
}

}  // namespace toporesolve

#endif  // TOPORESOLVE_CHF_HPP
