#ifndef TOPORESOLVE_EVAL_HPP
#define TOPORESOLVE_EVAL_HPP

#include <iomanip>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "toporesolve/chf.hpp"
#include "toporesolve/geo.hpp"
#include "toporesolve/resolution.hpp"

namespace toporesolve {

enum class EvalMode { Resol, GeoTag };
enum class Correctness { DistanceThreshold, BoundingBox };

inline constexpr double kStrictThresholdKm = 16.09;  // 10 miles
inline constexpr double kRelaxedThresholdKm = 161.0;

struct EvalConfig {
    EvalMode mode = EvalMode::Resol;
    Correctness correctness = Correctness::DistanceThreshold;
    double threshold_km = kRelaxedThresholdKm;
};

struct Metrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double mean_error_km = 0.0;
    std::size_t gold = 0;
    std::size_t predicted = 0;
    std::size_t correct = 0;
    std::size_t unresolvable_gold = 0;
};

class EvalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A recognized span per document, for GeoTag-style matching.
using SpanList = std::vector<std::pair<std::size_t, std::size_t>>;

namespace detail {

struct ResolvedGold {
    LatLon coords;
    std::optional<BoundingBox> box;
};

inline std::optional<ResolvedGold> resolve_gold(const GoldAnnotation& gold, const Gazetteer& g) {
    if (gold.gazetteer_id) {
        if (const GazetteerEntry* e = g.find(*gold.gazetteer_id))
            return ResolvedGold{e->coordinates(), e->bounding_box};
    }
    if (gold.latitude && gold.longitude &&
        valid_coordinates(*gold.latitude, *gold.longitude))
        return ResolvedGold{LatLon{*gold.latitude, *gold.longitude}, std::nullopt};
    return std::nullopt;
}

inline bool spans_overlap(std::size_t a_start, std::size_t a_end, const SpanList& spans) {
    for (const auto& [s, e] : spans)
        if (e > a_start && s < a_end) return true;
    return false;
}

}  // namespace detail

inline bool is_correct(const Interpretation& pred, const GoldAnnotation& gold,
                       const Gazetteer& g, const EvalConfig& cfg) {
    auto rg = detail::resolve_gold(gold, g);
    if (!rg) throw EvalError("is_correct: gold annotation is unresolvable");
    const LatLon p = pred.entry->coordinates();
    if (cfg.correctness == Correctness::BoundingBox && rg->box)
        return in_bounding_box(p, *rg->box);
    return haversine_km(p, rg->coords) <= cfg.threshold_km;
}

/// Score predictions against gold annotations, one scored unit per
/// gold-annotated mention. Gold entries that resolve to nothing are kept
/// out of both denominators and reported separately.
inline Metrics evaluate(std::span<const Document> corpus,
                        std::span<const std::vector<ResolvedToponym>> predictions,
                        const Gazetteer& g, const EvalConfig& cfg = {},
                        const std::vector<SpanList>* recognized = nullptr) {
    if (corpus.size() != predictions.size())
        throw EvalError("evaluate: prediction list does not match corpus size");
    if (recognized && recognized->size() != corpus.size())
        throw EvalError("evaluate: recognized spans do not match corpus size");

    Metrics m;
    double error_sum = 0.0;
    std::size_t error_count = 0;

    for (std::size_t di = 0; di < corpus.size(); ++di) {
        const Document& doc = corpus[di];
        std::vector<MentionGroup> groups = mention_groups(doc);
        const auto& preds = predictions[di];
        if (preds.size() != groups.size())
            throw EvalError("evaluate: predictions misaligned for document '" + doc.doc_id + "'");
        for (std::size_t gi = 0; gi < groups.size(); ++gi)
            if (preds[gi].group.normalized_surface != groups[gi].normalized_surface)
                throw EvalError("evaluate: predictions misaligned for document '" + doc.doc_id +
                                "'");

        for (std::size_t gi = 0; gi < groups.size(); ++gi) {
            const ResolvedToponym& pred = preds[gi];
            for (std::size_t mi : groups[gi].mention_indices) {
                const ToponymMention& mention = doc.toponyms[mi];
                if (!mention.gold) continue;
                auto rg = detail::resolve_gold(*mention.gold, g);
                if (!rg) {
                    ++m.unresolvable_gold;
                    continue;
                }
                ++m.gold;
                if (!pred.interpretation) continue;
                if (cfg.mode == EvalMode::GeoTag && recognized &&
                    !detail::spans_overlap(mention.char_start, mention.char_end,
                                           (*recognized)[di]))
                    continue;  // without recognized spans, annotated spans stand in
                ++m.predicted;
                const double err =
                    haversine_km(pred.interpretation->entry->coordinates(), rg->coords);
                error_sum += err;
                ++error_count;
                if (is_correct(*pred.interpretation, *mention.gold, g, cfg)) ++m.correct;
            }
        }
    }

    m.precision = m.predicted ? static_cast<double>(m.correct) / m.predicted : 0.0;
    m.recall = m.gold ? static_cast<double>(m.correct) / m.gold : 0.0;
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    m.mean_error_km = error_count ? error_sum / error_count : 0.0;
    return m;
}

/// Resolve the whole corpus with one resolver. `resolver` is one of
/// preliminary | cbh | shs | chf.
inline std::vector<std::vector<ResolvedToponym>> resolve_corpus(
    std::span<const Document> corpus, const Gazetteer& g, const std::string& resolver,
    const ChfConfig& cfg = {}) {
    std::vector<std::vector<ResolvedToponym>> out;
    out.reserve(corpus.size());
    for (const Document& doc : corpus) {
        if (resolver == "preliminary")
            out.push_back(preliminary_resolve(doc, g));
        else if (resolver == "cbh")
            out.push_back(resolve_cbh(doc, g, cfg.cbh));
        else if (resolver == "shs")
            out.push_back(resolve_shs(doc, g));
        else if (resolver == "chf")
            out.push_back(resolve_chf(doc, g, cfg));
        else
            throw std::invalid_argument("unknown resolver: " + resolver);
    }
    return out;
}

/// Sweep the fusion threshold. CBH and SHS run once per document; only the
/// fusion and scoring repeat per tau.
inline std::vector<std::pair<double, Metrics>> tau_sweep(std::span<const Document> corpus,
                                                         const Gazetteer& g,
                                                         const CbhConfig& cbh_cfg,
                                                         const std::vector<double>& taus,
                                                         const EvalConfig& eval_cfg = {}) {
    for (std::size_t i = 1; i < taus.size(); ++i)
        if (taus[i] < taus[i - 1])
            throw std::invalid_argument("tau_sweep: taus must be sorted ascending");

    std::vector<std::vector<ResolvedToponym>> cbh, shs;
    for (const Document& doc : corpus) {
        cbh.push_back(resolve_cbh(doc, g, cbh_cfg));
        shs.push_back(resolve_shs(doc, g));
    }

    std::vector<std::pair<double, Metrics>> out;
    for (double tau : taus) {
        std::vector<std::vector<ResolvedToponym>> fused;
        fused.reserve(corpus.size());
        for (std::size_t di = 0; di < corpus.size(); ++di)
            fused.push_back(fuse_chf(cbh[di], shs[di], tau));
        out.emplace_back(tau, evaluate(corpus, fused, g, eval_cfg));
    }
    return out;
}

inline nlohmann::ordered_json metrics_to_json(const Metrics& m) {
    return nlohmann::ordered_json{{"precision", m.precision},
                                  {"recall", m.recall},
                                  {"f1", m.f1},
                                  {"mean_error_km", m.mean_error_km},
                                  {"gold", m.gold},
                                  {"predicted", m.predicted},
                                  {"correct", m.correct},
                                  {"unresolvable_gold", m.unresolvable_gold}};
}

inline std::string metrics_table(const Metrics& m) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(4);
    os << "precision        " << m.precision << '\n'
       << "recall           " << m.recall << '\n'
       << "f1               " << m.f1 << '\n'
       << std::setprecision(1)                      //
       << "mean_error_km    " << m.mean_error_km << '\n'
       << "gold             " << m.gold << '\n'
       << "predicted        " << m.predicted << '\n'
       << "correct          " << m.correct << '\n'
       << "unresolvable     " << m.unresolvable_gold << '\n';
    return os.str();
}

inline std::string sweep_csv(const std::vector<std::pair<double, Metrics>>& rows) {
    std::ostringstream os;
    os << "tau,precision,recall,f1\n";
    os << std::fixed << std::setprecision(6);
    for (const auto& [tau, m] : rows)
        os << tau << ',' << m.precision << ',' << m.recall << ',' << m.f1 << '\n';
    return os.str();
}

}  // namespace toporesolve

#endif  // TOPORESOLVE_EVAL_HPP
